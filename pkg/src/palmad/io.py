"""Reading and writing series and discord lists.

Floats are written with Python's shortest round-trip ``repr`` so files
are lossless and diff cleanly.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .core import DiscordRecord, MultiLengthDiscordSet, TimeSeries

DISCORD_HEADER = ["length", "index", "nn_dist", "nn_dist_sq", "score"]


class FormatError(ValueError):
    """A malformed input file; the message names the file and line."""


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_series(path, column: str | int | None = None) -> TimeSeries:
    """Read one value per line, or one column of a comma-separated file.

    A first line holding any non-numeric field is taken as a header.
    ``column`` is a header name or a 0-based position; by default the first
    column is used. Blank lines are skipped.
    """
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1)
                if row and any(f.strip() for f in row)]
    if not rows:
        raise FormatError(f"{path}: no values")

    pos = 0
    _, first = rows[0]
    header = None
    if not all(_is_number(f.strip()) for f in first):
        header = [f.strip() for f in first]
        rows = rows[1:]
    if column is not None:
        if header is not None and str(column) in header:
            pos = header.index(str(column))
        elif str(column).isdigit():
            pos = int(column)
        else:
            raise FormatError(f"{path}: no column {column!r}")
        if header is not None and pos >= len(header):
            raise FormatError(f"{path}: column {pos} out of range (header has {len(header)})")

    values = []
    for lineno, row in rows:
        if pos >= len(row):
            raise FormatError(f"{path}: line {lineno}: missing column {pos}")
        token = row[pos].strip()
        try:
            x = float(token)
        except ValueError:
            raise FormatError(f"{path}: line {lineno}: not a number: {token!r}") from None
        if not math.isfinite(x):
            raise FormatError(f"{path}: line {lineno}: non-finite value {token!r}")
        values.append(x)
    if len(values) < 3:
        raise FormatError(f"{path}: need at least 3 values, found {len(values)}")
    return TimeSeries(np.array(values))


def write_series(series, path) -> None:
    """One value per line; ``path`` may also be an open text file."""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    text = "".join(f"{float(x)!r}\n" for x in values)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def gen_randomwalk(n: int, seed: int | None = None) -> TimeSeries:
    """``x[0] = 0`` followed by cumulative standard-normal steps."""
    if n < 3:
        raise ValueError(f"random walk needs n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    steps = rng.standard_normal(n - 1)
    return TimeSeries(np.concatenate(([0.0], np.cumsum(steps))))


def write_discords(d: MultiLengthDiscordSet, path) -> None:
    """Rows sorted by length, then by distance (largest first), then index."""
    rows = sorted(d, key=lambda r: (r.length, -r.nn_dist_sq, r.index))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DISCORD_HEADER) + "\n")
        for r in rows:
            fh.write(f"{r.length},{r.index},{r.nn_dist!r},{r.nn_dist_sq!r},{r.score!r}\n")


def read_discords(path, min_length: int | None = None,
                  max_length: int | None = None) -> MultiLengthDiscordSet:
    """Inverse of :func:`write_discords`.

    The length range defaults to the lengths present; an empty file needs
    both bounds.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != DISCORD_HEADER:
            raise FormatError(f"{path}: line 1: expected header {','.join(DISCORD_HEADER)}")
        per_length: dict[int, list[DiscordRecord]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(DISCORD_HEADER):
                raise FormatError(f"{path}: line {lineno}: expected {len(DISCORD_HEADER)} fields")
            try:
                length, index = int(row[0]), int(row[1])
                nn_dist_sq = float(row[3])
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: malformed row") from None
            if length < 3 or index < 1 or not 0.0 <= nn_dist_sq <= 4.0 * length:
                raise FormatError(f"{path}: line {lineno}: values out of range")
            per_length.setdefault(length, []).append(DiscordRecord(index, length, nn_dist_sq))
    if per_length:
        min_length = min(per_length) if min_length is None else min_length
        max_length = max(per_length) if max_length is None else max_length
    elif min_length is None or max_length is None:
        raise FormatError(f"{path}: no discords; the length range must be given")
    out = MultiLengthDiscordSet(min_length, max_length)
    out.per_length.update(sorted(per_length.items()))
    return out
