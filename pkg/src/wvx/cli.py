"""Command-line interface.

Subcommands:

* ``build``  -- build an index from a dataset file and serialize it.
* ``query``  -- run a query file against a serialized index.
* ``gen``    -- generate a deterministic query file for a dataset.
* ``bench``  -- build, run a timed workload, and print one CSV row.
* ``verify`` -- check an index's answers against the brute-force oracle.

Exit codes: 0 success, 1 usage error, 2 data/format error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as bench_mod
from . import oracle, serial
from .bench import (
    CSV_HEADER,
    BenchConfig,
    SplitMix64,
    build_structure,
    gen_grid_queries,
    gen_queries,
    ingest,
    read_queries_csv,
    run_bench,
    write_queries_csv,
)
from .errors import DataFormatError, NotEnoughOccurrences
from .grid import Grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _add_dataset_args(p):
    p.add_argument("--input", required=True, help="dataset file")
    p.add_argument(
        "--format",
        default="text-ints",
        choices=bench_mod.FORMATS,
        help="dataset file format",
    )
    p.add_argument("--sigma", type=int, default=None, help="alphabet size override")


def _add_structure_args(p):
    p.add_argument("--structure", default="wm", choices=bench_mod.STRUCTURES)
    p.add_argument("--variant", default="strict", choices=("strict", "extended"))
    p.add_argument("--bitmap", default="plain", choices=("plain", "rrr"))
    p.add_argument("--sample", type=int, default=32, choices=(32, 64, 128))


def _load_sequence(args):
    data = ingest(args.input, args.format)
    if args.format in ("points-text", "mbr-text"):
        raise DataFormatError(f"{args.format} input holds points, not a sequence")
    seq = np.asarray(data, dtype=np.int64)
    sigma = args.sigma
    if sigma is None:
        sigma = int(seq.max()) + 1 if seq.size else 1
    return seq, sigma


def _cmd_build(args):
    seq, sigma = _load_sequence(args)
    struct = build_structure(
        seq, sigma, args.structure, args.variant, args.bitmap, args.sample
    )
    serial.save(struct, args.output)
    print(
        f"built {args.structure} n={len(seq)} sigma={sigma} "
        f"size_bits={struct.size_bits}"
    )
    return EXIT_OK


def _cmd_query(args):
    index = serial.load(args.index)
    queries = read_queries_csv(args.queries)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        for q in queries:
            if args.op == "access":
                res = index.access(q[0])
            elif args.op == "rank":
                res = index.rank(q[0], q[1])
            elif args.op == "select":
                try:
                    res = index.select(q[0], q[1])
                except NotEnoughOccurrences:
                    res = -1
            elif args.op == "count":
                x1, y1, x2, y2 = q
                res = index.count(x1, x2, y1, y2)
            else:  # report
                x1, y1, x2, y2 = q
                res = ";".join(f"{y}:{m}" for y, m in index.report(x1, x2, y1, y2))
            print(res, file=out)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _cmd_gen(args):
    data = ingest(args.input, args.format)
    if args.op in bench_mod.GRID_OPS:
        if args.format not in ("points-text", "mbr-text"):
            raise DataFormatError(f"{args.op} queries need a point dataset")
        per_class = max(1, args.count // len(bench_mod.GRID_AREA_FRACTIONS))
        queries = gen_grid_queries(data, per_class, args.seed)
    else:
        queries = gen_queries(np.asarray(data, dtype=np.int64), args.op, args.count, args.seed)
    write_queries_csv(args.output, args.op, queries)
    print(f"wrote {len(queries)} {args.op} queries to {args.output}")
    return EXIT_OK


def _cmd_bench(args):
    config = BenchConfig(
        structure=args.structure,
        variant=args.variant,
        bitmap=args.bitmap,
        sample_rate=args.sample,
        op=args.op,
        query_count=args.queries,
        repetitions=args.repetitions,
        seed=args.seed,
    )
    data = ingest(args.input, args.format)
    report = run_bench(config, data)
    row = report.csv_row()
    if args.output:
        with open(args.output, "a") as fh:
            fh.write(row + "\n")
    print(CSV_HEADER)
    print(row)
    return EXIT_OK


def _cmd_verify(args):
    data = ingest(args.input, args.format)
    rng = SplitMix64(args.seed)
    failures = 0
    checked = 0
    if args.format in ("points-text", "mbr-text"):
        grid = Grid(list(data), bitmap=args.bitmap, sample_rate=args.sample)
        seq = grid.y_seq
        queries = gen_grid_queries(data, max(1, args.queries // 4), args.seed)
        for x1, y1, x2, y2 in queries:
            c1, c2 = grid._columns(x1, x2)
            want_cnt, want_rep = oracle.naive_range(seq, c1, c2, y1, y2)
            got_cnt = grid.count(x1, x2, y1, y2)
            got_rep = grid.report(x1, x2, y1, y2)
            checked += 2
            if got_cnt != want_cnt or got_rep != want_rep:
                failures += 1
                print(f"mismatch on rectangle {(x1, y1, x2, y2)}", file=sys.stderr)
    else:
        seq = np.asarray(data, dtype=np.int64)
        if seq.size == 0:
            raise DataFormatError("cannot verify an empty sequence")
        sigma = args.sigma or int(seq.max()) + 1
        struct = build_structure(
            seq, sigma, args.structure, args.variant, args.bitmap, args.sample
        )
        n = int(seq.size)
        for _ in range(args.queries):
            i = rng.below(n) + 1
            a = int(seq[i - 1])
            checked += 3
            if struct.access(i) != oracle.naive_access(seq, i):
                failures += 1
                print(f"access mismatch at {i}", file=sys.stderr)
            if struct.rank(a, i) != oracle.naive_rank(seq, a, i):
                failures += 1
                print(f"rank mismatch at ({a}, {i})", file=sys.stderr)
            j = rng.below(oracle.naive_rank(seq, a, n)) + 1
            if struct.select(a, j) != oracle.naive_select(seq, a, j):
                failures += 1
                print(f"select mismatch at ({a}, {j})", file=sys.stderr)
    if failures:
        print(f"verify: {failures} mismatches over {checked} checks")
        return EXIT_VERIFY
    print(f"verify: ok ({checked} checks)")
    return EXIT_OK


def make_parser():
    parser = _Parser(prog="wvx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and serialize an index")
    _add_dataset_args(p)
    _add_structure_args(p)
    p.add_argument("--output", required=True, help="index file to write")
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("query", help="answer a query file with an index")
    p.add_argument("--index", required=True)
    p.add_argument(
        "--op",
        required=True,
        choices=bench_mod.SEQ_OPS + bench_mod.GRID_OPS,
    )
    p.add_argument("--queries", required=True, help="query CSV from `wvx gen`")
    p.add_argument("--output", default=None)
    p.set_defaults(fn=_cmd_query)

    p = sub.add_parser("gen", help="generate a deterministic query file")
    _add_dataset_args(p)
    p.add_argument(
        "--op",
        required=True,
        choices=bench_mod.SEQ_OPS + bench_mod.GRID_OPS,
    )
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("bench", help="time a query workload")
    _add_dataset_args(p)
    _add_structure_args(p)
    p.add_argument(
        "--op",
        default="access",
        choices=bench_mod.SEQ_OPS + bench_mod.GRID_OPS,
    )
    p.add_argument("--queries", type=int, default=100_000, help="queries per pass")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", default=None, help="append the CSV row to this file")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("verify", help="compare an index against the oracle")
    _add_dataset_args(p)
    _add_structure_args(p)
    p.add_argument("--queries", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
