"""Workload generation, dataset ingestion, and the timing harness.

Query streams are derived from a SplitMix64 generator so a fixed seed
yields byte-identical query files on any platform:

* access -- positions i uniform in [1, n].
* rank   -- i uniform in [1, n], a = S[i].
* select -- i uniform in [1, n], a = S[i], j uniform in [1, occ(a)].
* count/report -- rectangles covering a fixed fraction of the grid area
  (0.001%, 0.01%, 0.1% and 1% by default), side ratio uniform in
  [0.25, 2.25], placed uniformly at random.

Timing uses a monotonic clock, runs one untimed warm-up pass, and
reports the mean time per query (per reported item for report) over the
requested repetitions. Space is charged as serialized index bits per
sequence symbol. Everything is single-threaded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .grid import Grid, points_from_mbrs
from .wavelet_matrix import HuffmanWaveletMatrix, WaveletMatrix
from .wavelet_tree import (
    HuffmanPointerlessTree,
    PointerlessWaveletTree,
    PointerWaveletTree,
)

_M64 = (1 << 64) - 1

STRUCTURES = ("wtp", "wtnp", "wm", "hwtnp", "hwm")
SEQ_OPS = ("access", "rank", "select")
GRID_OPS = ("count", "report")
GRID_AREA_FRACTIONS = (0.00001, 0.0001, 0.001, 0.01)

CSV_HEADER = "structure,variant,bitmap,sample,op,bps,ns_per_query,n,sigma,seed"


class SplitMix64:
    """Tiny portable 64-bit generator; the one knob is the seed."""

    def __init__(self, seed):
        self._state = seed & _M64

    def next_u64(self):
        self._state = (self._state + 0x9E3779B97F4A7C15) & _M64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)

    def below(self, n):
        """Uniform-ish integer in [0, n) (modulo reduction)."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return self.next_u64() % n

    def uniform(self):
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


@dataclass
class BenchConfig:
    structure: str = "wm"
    variant: str = "strict"
    bitmap: str = "plain"
    sample_rate: int = 32
    op: str = "access"
    query_count: int = 100_000
    repetitions: int = 10
    seed: int = 1

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.bitmap not in ("plain", "rrr"):
            raise ValueError(f"unknown bitmap mode {self.bitmap!r}")
        if self.variant not in ("strict", "extended"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.op not in SEQ_OPS + GRID_OPS:
            raise ValueError(f"unknown op {self.op!r}")
        if self.op in GRID_OPS:
            if self.structure not in ("wm", "wtnp"):
                raise ValueError(f"{self.op} queries need a wm or wtnp structure")
            if self.variant != "strict":
                raise ValueError("grid workloads support only the strict variant")


@dataclass
class BenchReport:
    structure: str
    variant: str
    bitmap: str
    sample_rate: int
    op: str
    bps: float
    ns_per_query: float
    n: int
    sigma: int
    seed: int

    def csv_row(self):
        return (
            f"{self.structure},{self.variant},{self.bitmap},{self.sample_rate},"
            f"{self.op},{self.bps:.4f},{self.ns_per_query:.1f},{self.n},"
            f"{self.sigma},{self.seed}"
        )


def build_structure(seq, sigma, structure, variant="strict", bitmap="plain", sample_rate=32):
    if structure == "wtp":
        return PointerWaveletTree(seq, sigma, bitmap=bitmap, sample_rate=sample_rate)
    if structure == "wtnp":
        return PointerlessWaveletTree(
            seq, sigma, variant=variant, bitmap=bitmap, sample_rate=sample_rate
        )
    if structure == "wm":
        return WaveletMatrix(
            seq, sigma, variant=variant, bitmap=bitmap, sample_rate=sample_rate
        )
    if structure == "hwtnp":
        return HuffmanPointerlessTree(seq, sigma, bitmap=bitmap, sample_rate=sample_rate)
    if structure == "hwm":
        return HuffmanWaveletMatrix(seq, sigma, bitmap=bitmap, sample_rate=sample_rate)
    raise ValueError(f"unknown structure {structure!r}")


# -- query generation ---------------------------------------------------------


def gen_queries(seq, op, count, seed):
    """Deterministic query tuples for one operation over a sequence."""
    n = len(seq)
    if n == 0:
        raise ValueError("cannot generate queries for an empty sequence")
    rng = SplitMix64(seed)
    if op == "access":
        return [(rng.below(n) + 1,) for _ in range(count)]
    if op == "rank":
        out = []
        for _ in range(count):
            i = rng.below(n) + 1
            out.append((int(seq[i - 1]), i))
        return out
    if op == "select":
        arr = np.asarray(seq, dtype=np.int64)
        counts = np.bincount(arr)
        out = []
        for _ in range(count):
            i = rng.below(n) + 1
            a = int(seq[i - 1])
            out.append((a, rng.below(int(counts[a])) + 1))
        return out
    raise ValueError(f"unknown sequence op {op!r}")


def gen_grid_queries(points, count_per_class, seed, fractions=GRID_AREA_FRACTIONS):
    """Rectangles covering fixed fractions of the bounding area.

    Each rectangle's width/height ratio is uniform in [0.25, 2.25]; the
    rectangle is clamped to the bounding box. Coordinates are integers.
    """
    pts = list(points)
    if not pts:
        raise ValueError("cannot generate rectangles for an empty point set")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    w = max(1, x1 - x0)
    h = max(1, y1 - y0)
    rng = SplitMix64(seed)
    out = []
    for frac in fractions:
        area = frac * w * h
        for _ in range(count_per_class):
            ratio = 0.25 + rng.uniform() * 2.0
            rh = (area / ratio) ** 0.5
            rw = ratio * rh
            rw = min(rw, w)
            rh = min(rh, h)
            qx = x0 + rng.uniform() * (w - rw)
            qy = y0 + rng.uniform() * (h - rh)
            out.append(
                (int(qx), int(qy), int(qx + rw), int(qy + rh))
            )
    return out


def write_queries_csv(path, op, queries):
    headers = {
        "access": "i",
        "rank": "a,i",
        "select": "a,j",
        "count": "x1,y1,x2,y2",
        "report": "x1,y1,x2,y2",
    }
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(headers[op] + "\n")
        for q in queries:
            fh.write(",".join(str(v) for v in q) + "\n")


def read_queries_csv(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DataFormatError(f"{path}: empty query file")
    out = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            out.append(tuple(int(v) for v in ln.split(",")))
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad query line {ln!r}") from exc
    return out


# -- dataset ingestion --------------------------------------------------------

FORMATS = ("u32le", "text-ints", "points-text", "mbr-text")


def ingest(path, fmt):
    """Parse a dataset file into a symbol array or a point list."""
    if fmt == "u32le":
        with open(path, "rb") as fh:
            raw = fh.read()
        if len(raw) % 4:
            raise DataFormatError(
                f"{path}: length {len(raw)} is not a multiple of 4 bytes"
            )
        return np.frombuffer(raw, dtype="<u4").astype(np.int64)
    if fmt == "text-ints":
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()
        try:
            vals = [int(tok) for tok in text.split()]
        except ValueError as exc:
            raise DataFormatError(f"{path}: non-integer token: {exc}") from exc
        return np.asarray(vals, dtype=np.int64)
    if fmt in ("points-text", "mbr-text"):
        want = 2 if fmt == "points-text" else 4
        rows = []
        with open(path, "r", encoding="ascii") as fh:
            for lineno, ln in enumerate(fh, start=1):
                ln = ln.strip()
                if not ln:
                    continue
                toks = ln.split()
                if len(toks) != want:
                    raise DataFormatError(
                        f"{path}:{lineno}: expected {want} integers, got {len(toks)}"
                    )
                try:
                    rows.append(tuple(int(t) for t in toks))
                except ValueError as exc:
                    raise DataFormatError(
                        f"{path}:{lineno}: non-integer token"
                    ) from exc
        if fmt == "mbr-text":
            return points_from_mbrs(rows)
        return rows
    raise DataFormatError(f"unknown input format {fmt!r}")


# -- timing -------------------------------------------------------------------


def _run_queries(struct, op, queries):
    """Run a query batch; returns the number of produced items (for report)."""
    items = 0
    if op == "access":
        for (i,) in queries:
            struct.access(i)
        items = len(queries)
    elif op == "rank":
        for a, i in queries:
            struct.rank(a, i)
        items = len(queries)
    elif op == "select":
        for a, j in queries:
            struct.select(a, j)
        items = len(queries)
    elif op in GRID_OPS:
        fn = struct.count if op == "count" else struct.report
        for x1, y1, x2, y2 in queries:
            res = fn(x1, x2, y1, y2)
            items += len(res) if op == "report" else 1
    else:
        raise ValueError(f"unknown op {op!r}")
    return max(items, 1)


def run_bench(config, dataset):
    """Build per the config, run the query workload, and report space/time.

    ``dataset`` is a symbol array for sequence ops or a point list for
    grid ops. One untimed pass warms the caches; the timed passes are
    averaged.
    """
    cfg = config
    if cfg.op in GRID_OPS:
        points = list(dataset)
        grid = Grid(
            points,
            bitmap=cfg.bitmap,
            sample_rate=cfg.sample_rate,
        )
        if cfg.structure == "wtnp":
            struct = PointerlessWaveletTree(
                grid.y_seq,
                grid.y_max + 1,
                variant=cfg.variant,
                bitmap=cfg.bitmap,
                sample_rate=cfg.sample_rate,
            )
            size_bits = struct.size_bits
        else:
            struct = grid
            size_bits = grid.size_bits
        n = max(grid.m, 1)
        sigma = grid.y_max + 1
        per_class = max(1, cfg.query_count // len(GRID_AREA_FRACTIONS))
        queries = gen_grid_queries(points, per_class, cfg.seed)
        if cfg.structure == "wtnp":
            # translate once through the grid so both structures see columns
            translated = []
            for x1, y1, x2, y2 in queries:
                c1, c2 = grid._columns(x1, x2)
                if c1 <= c2:
                    translated.append((c1, y1, c2, y2))
            queries = translated or [(1, 0, 1, 0)]
    else:
        seq = np.asarray(dataset, dtype=np.int64)
        n = int(seq.size)
        sigma = int(seq.max()) + 1 if n else 1
        struct = build_structure(
            seq, sigma, cfg.structure, cfg.variant, cfg.bitmap, cfg.sample_rate
        )
        size_bits = struct.size_bits
        queries = gen_queries(seq, cfg.op, cfg.query_count, cfg.seed)

    _run_queries(struct, cfg.op, queries)  # warm-up, untimed
    total_ns = 0
    total_items = 0
    for _ in range(cfg.repetitions):
        t0 = time.perf_counter_ns()
        items = _run_queries(struct, cfg.op, queries)
        total_ns += time.perf_counter_ns() - t0
        total_items += items
    return BenchReport(
        structure=cfg.structure,
        variant=cfg.variant,
        bitmap=cfg.bitmap,
        sample_rate=cfg.sample_rate,
        op=cfg.op,
        bps=size_bits / n,
        ns_per_query=total_ns / max(total_items, 1),
        n=n,
        sigma=sigma,
        seed=cfg.seed,
    )
