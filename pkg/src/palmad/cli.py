"""Command-line front end.

Commands::

    palmad gen-rw       --n N --seed S --output walk.txt
    palmad discover     --input walk.txt --minl 8 --maxl 32 --topk 3 --output discords.csv
    palmad heatmap      --input discords.csv --n N --topk 6 --output prefix
    palmad oracle-check --input walk.txt --minl 8 --maxl 32 [--discords discords.csv]
    palmad bench        --n 2000,4000 --width 8,16 --seglen 128,256 --workers 1,2

Every command exits 0 on success and prints a one-line diagnostic with a
nonzero status otherwise.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import sys
import time

from .drag import brute_force_topk
from .heatmap import build_heatmap, rank_discords, write_heatmap_csv, write_pgm, write_ranking_csv
from .io import gen_randomwalk, load_series, read_discords, write_discords, write_series
from .merlin import merlin

ORACLE_MAX_N = 5000
PROG = "palmad"


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _check_range(args, n):
    if args.minl is None or args.maxl is None:
        raise UsageError("--minl and --maxl are required")
    if args.minl > args.maxl:
        raise UsageError(f"--minl {args.minl} exceeds --maxl {args.maxl}")
    if args.minl < 3 or 2 * args.maxl > n:
        raise UsageError(f"lengths must satisfy 3 <= minl <= maxl <= n/2 (n={n})")
    if args.topk < 1:
        raise UsageError("--topk must be >= 1")


def _run_merlin(series, args):
    return merlin(series, args.minl, args.maxl, top_k=args.topk, seglen=args.seglen, workers=args.workers)


# --- commands --------------------------------------------------------------

def cmd_gen_rw(args) -> int:
    _require(args, "n")
    series = gen_randomwalk(args.n, args.seed)
    write_series(series, args.output if args.output else sys.stdout)
    return 0


def cmd_discover(args) -> int:
    _require(args, "input", "output")
    series = load_series(args.input, args.column)
    _check_range(args, series.n)
    t0 = time.perf_counter()
    d = _run_merlin(series, args)
    elapsed = time.perf_counter() - t0
    write_discords(d, args.output)
    for m in d.lengths():
        print(f"length {m}: {len(d.per_length.get(m, []))} discords")
    if d.failed:
        print(f"failed lengths: {' '.join(map(str, d.failed))}")
    print(f"wall time: {elapsed:.3f} s")
    return 0


def _require(args, *names):
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"missing required option(s): {' '.join(missing)}")


def cmd_heatmap(args) -> int:
    _require(args, "input", "n", "output")
    d = read_discords(args.input, args.minl, args.maxl)
    h = build_heatmap(d, args.n)
    write_heatmap_csv(h, f"{args.output}.csv")
    write_pgm(h, f"{args.output}.pgm")
    ranking = rank_discords(h, args.topk)
    write_ranking_csv(ranking, f"{args.output}_rank.csv")
    rows, cols = h.scores.shape
    print(f"heatmap {rows} x {cols}; top {len(ranking)} written to {args.output}_rank.csv")
    return 0


def cmd_oracle_check(args) -> int:
    _require(args, "input")
    series = load_series(args.input, args.column)
    if series.n > ORACLE_MAX_N:
        raise UsageError(f"series has {series.n} values; the oracle check is limited to {ORACLE_MAX_N}")
    _check_range(args, series.n)
    if args.discords:
        d = read_discords(args.discords, args.minl, args.maxl)
    else:
        d = _run_merlin(series, args)
    failures = 0
    for m in d.lengths():
        got = d.per_length.get(m, [])
        want = brute_force_topk(series, m, args.topk)
        same_idx = [r.index for r in got] == [r.index for r in want]
        gap = max((abs(a.nn_dist - b.nn_dist) for a, b in zip(got, want)), default=0.0)
        tol = 1e-7 * max((r.nn_dist for r in want), default=0.0)
        ok = same_idx and gap <= tol
        failures += not ok
        detail = "" if same_idx else f" indices {[r.index for r in got]} != {[r.index for r in want]}"
        print(f"length {m}: {'PASS' if ok else 'FAIL'} max |nn_dist diff| = {gap:.3g}{detail}")
    print(f"{d.max_length - d.min_length + 1 - failures} passed, {failures} failed")
    return 1 if failures else 0


def cmd_bench(args) -> int:
    ns = args.n or [2000]
    widths = args.width or [8]
    seglens = args.seglen or [512]
    workers = args.workers or [1]
    minl = args.minl or 8
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "minl", "maxl", "seglen", "workers", "seconds", "discords", "seconds_per_discord"])
        for n, width, seglen, w in itertools.product(ns, widths, seglens, workers):
            maxl = minl + width - 1
            if 2 * maxl > n:
                raise UsageError(f"length range {minl}..{maxl} too long for n={n}")
            series = gen_randomwalk(n, args.seed)
            t0 = time.perf_counter()
            d = merlin(series, minl, maxl, top_k=args.topk, seglen=seglen, workers=w)
            elapsed = time.perf_counter() - t0
            count = len(d)
            writer.writerow([n, minl, maxl, seglen, w, f"{elapsed:.6f}", count,
                             f"{elapsed / count:.6f}" if count else ""])
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Discords of every length in a range.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, lists=False):
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--output", help="output path (or prefix for heatmap)")
        p.add_argument("--topk", type=int, default=1, help="discords kept per length (default 1)")
        if not lists:
            p.add_argument("--minl", type=int, help="shortest discord length")
            p.add_argument("--maxl", type=int, help="longest discord length")
            p.add_argument("--seglen", type=int, default=None,
                           help="segment width (default: chosen per length)")
            p.add_argument("--workers", type=int, default=None,
                           help="worker threads (default: all cores)")

    p = sub.add_parser("gen-rw", help="write a seeded random walk")
    p.add_argument("--n", type=int, help="number of values")
    common(p)
    p.set_defaults(func=cmd_gen_rw)

    p = sub.add_parser("discover", help="find discords and write them as CSV")
    p.add_argument("--input", help="series file")
    p.add_argument("--column", help="CSV column name or 0-based position")
    common(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("heatmap", help="heatmap and ranking from a discord CSV")
    p.add_argument("--input", help="discord CSV written by discover")
    p.add_argument("--n", type=int, help="length of the series the discords came from")
    common(p)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("oracle-check", help="compare discords with brute force")
    p.add_argument("--input", help="series file")
    p.add_argument("--column", help="CSV column name or 0-based position")
    p.add_argument("--discords", help="check this discord CSV instead of running a search")
    common(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("bench", help="time searches over parameter sweeps")
    p.add_argument("--n", type=_int_list, help="series lengths, comma-separated")
    p.add_argument("--width", type=_int_list, help="numbers of lengths in the range")
    p.add_argument("--seglen", type=_int_list, help="segment widths")
    p.add_argument("--workers", type=_int_list, help="worker counts")
    p.add_argument("--minl", type=int, default=8, help="shortest length (default 8)")
    common(p, lists=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
