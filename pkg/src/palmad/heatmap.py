"""Discord heatmap over (length, start index) and the interest ranking.

A cell holds ``nn_dist_sq / (2 m)`` for the discord of length ``m`` starting
at that index, and 0 where no discord was recorded. Squared z-normalised
distances lie in ``[0, 4m]``, so every score lies in ``[0, 2]`` whatever
the length, which is what makes rows of different lengths comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MultiLengthDiscordSet

#: Largest possible score (a pair of exactly anti-correlated subsequences).
MAX_SCORE = 2.0


@dataclass(frozen=True)
class Heatmap:
    """Scores for lengths ``min_length..max_length`` (rows, ascending) and
    start indices ``1..n - min_length`` (columns)."""

    min_length: int
    max_length: int
    n: int
    scores: np.ndarray

    @property
    def lengths(self) -> np.ndarray:
        return np.arange(self.min_length, self.max_length + 1)

    def cell(self, length: int, index: int) -> float:
        """Score at a length and a 1-based start index."""
        return float(self.scores[length - self.min_length, index - 1])


def build_heatmap(d: MultiLengthDiscordSet, n: int) -> Heatmap:
    """Fill the score matrix from every recorded discord.

    The matrix has ``n - min_length`` columns, so a discord of the shortest
    length starting at the very last index ``n - min_length + 1`` has no cell
    and is left out.
    """
    rows = d.max_length - d.min_length + 1
    cols = n - d.min_length
    if rows < 1 or cols < 1:
        raise ValueError(f"empty heatmap for lengths {d.min_length}..{d.max_length}, n={n}")
    scores = np.zeros((rows, cols))
    for m, records in d.per_length.items():
        if not d.min_length <= m <= d.max_length:
            raise ValueError(f"discord length {m} outside {d.min_length}..{d.max_length}")
        for rec in records:
            if rec.index > cols:
                continue
            scores[m - d.min_length, rec.index - 1] = rec.nn_dist_sq / (2.0 * m)
    return Heatmap(d.min_length, d.max_length, n, scores)


def rank_discords(h: Heatmap, k: int) -> list[tuple[int, int, float]]:
    """The ``k`` most interesting discords as ``(index, length, score)``.

    Each column is represented by its best length (the shortest one on a
    tie); columns are ordered by that score, then by index. Columns without
    any discord are never reported, so fewer than ``k`` rows may come back.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    best_row = np.argmax(h.scores, axis=0)  # first maximum = shortest length
    best = h.scores[best_row, np.arange(h.scores.shape[1])]
    cols = np.flatnonzero(best > 0.0)
    order = cols[np.lexsort((cols, -best[cols]))][:k]
    return [(int(c) + 1, int(best_row[c]) + h.min_length, float(best[c])) for c in order]


# --- export ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "0" if x == 0.0 else repr(float(x))


def write_heatmap_csv(h: Heatmap, path) -> None:
    """One row per length (ascending), shortest round-trip decimals."""
    with open(path, "w", newline="") as fh:
        for row in h.scores:
            fh.write(",".join(_fmt(x) for x in row))
            fh.write("\n")


def read_heatmap_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def to_gray(h: Heatmap) -> np.ndarray:
    """8-bit intensities, ``round(score / 2 * 255)``."""
    return np.rint(np.clip(h.scores, 0.0, MAX_SCORE) / MAX_SCORE * 255).astype(np.uint8)


def write_pgm(h: Heatmap, path) -> None:
    """Binary portable graymap, one pixel row per length."""
    img = to_gray(h)
    rows, cols = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    # header: magic and three integers separated by whitespace, then exactly
    # one whitespace byte before the pixels (which may themselves look blank)
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        if end == pos:
            raise ValueError(f"{path}: truncated graymap header")
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary graymap")
    cols, rows, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maximum value {maxval}")
    return np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=pos + 1).reshape(rows, cols)


def write_ranking_csv(ranking, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("rank,index,length,score\n")
        for rank, (index, length, score) in enumerate(ranking, start=1):
            fh.write(f"{rank},{index},{length},{_fmt(score)}\n")
