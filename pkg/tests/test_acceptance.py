"""Acceptance suite.

One test per shipping criterion. Each prints a single
``ACCEPTANCE <id> ...: PASS`` / ``FAIL`` line (run pytest with ``-s`` to
see them live). C7 builds two indexes over ten million symbols and is
the long pole; everything else is desk-scale.
"""

import itertools
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import record_acceptance
from helpers import assert_query_equal
from wvx import serial
from wvx.bench import gen_grid_queries, gen_queries, write_queries_csv
from wvx.bitvector import bitvector
from wvx.errors import DataFormatError, NotEnoughOccurrences
from wvx.grid import Grid
from wvx.huffman import (
    SymbolStats,
    assign_canonical_codes,
    assign_matrix_codes,
    entropy_and_cost,
    huffman_code_lengths,
    reverse_bits,
)
from wvx.oracle import naive_range, optimal_code_cost
from wvx.wavelet_matrix import HuffmanWaveletMatrix, WaveletMatrix
from wvx.wavelet_tree import (
    HuffmanPointerlessTree,
    PointerlessWaveletTree,
    PointerWaveletTree,
)


@contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {label}: FAIL", flush=True)
        record_acceptance(f"ACCEPTANCE {label}: FAIL")
        raise
    else:
        print(f"\nACCEPTANCE {label}: PASS", flush=True)
        record_acceptance(f"ACCEPTANCE {label}: PASS")


def all_structures(seq, sigma, mode):
    return [
        ("wtp", PointerWaveletTree(seq, sigma, bitmap=mode)),
        ("wtnp-strict", PointerlessWaveletTree(seq, sigma, variant="strict", bitmap=mode)),
        ("wtnp-extended", PointerlessWaveletTree(seq, sigma, variant="extended", bitmap=mode)),
        ("wm-strict", WaveletMatrix(seq, sigma, variant="strict", bitmap=mode)),
        ("wm-extended", WaveletMatrix(seq, sigma, variant="extended", bitmap=mode)),
        ("hwtnp", HuffmanPointerlessTree(seq, sigma, bitmap=mode)),
        ("hwm", HuffmanWaveletMatrix(seq, sigma, bitmap=mode)),
    ]


def test_c1_oracle_equivalence():
    with criterion("C1 oracle equivalence (7 structures x 2 bitmaps)"):
        rng = random.Random(0xC1)
        combos = list(itertools.product((0, 1, 10, 1000, 10_000), (1, 2, 3, 5, 17, 256, 1000)))
        cases = [combos[k % len(combos)] for k in range(200)]
        for n, sigma in cases:
            seq = [rng.randrange(sigma) for _ in range(n)]
            for mode in ("plain", "rrr"):
                structs = all_structures(seq, sigma, mode)
                if n == 0:
                    for name, st in structs:
                        assert st.rank(sigma - 1, 0) == 0, name
                        with pytest.raises(IndexError):
                            st.access(1)
                        with pytest.raises(NotEnoughOccurrences):
                            st.select(0, 1)
                else:
                    assert_query_equal(structs, seq, sigma, rng, queries_per_op=9)


def test_c2_range_query_equivalence():
    with criterion("C2 range count/report vs brute force (1000 rectangles)"):
        rng = random.Random(0xC2)
        rect_budget = 1000
        for g in range(50):
            m = rng.randrange(1, 4097)
            y_max = rng.choice([7, 100, 999, 4095])
            pts = [(x + 1, rng.randrange(y_max + 1)) for x in range(m)]
            grid = Grid(pts)
            wtnp = PointerlessWaveletTree(grid.y_seq, y_max + 1, variant="strict")
            seq = grid.y_seq
            per_grid = rect_budget // 50
            for _ in range(per_grid):
                x1, x2 = sorted((rng.randrange(1, m + 1), rng.randrange(1, m + 1)))
                y1 = rng.randrange(-1, y_max + 2)
                y2 = rng.randrange(-1, y_max + 2)
                cnt, rep = naive_range(seq, x1, x2, y1, y2)
                assert grid.index.count(x1, x2, y1, y2) == cnt
                assert wtnp.count(x1, x2, y1, y2) == cnt
                got_wm = grid.index.report(x1, x2, y1, y2)
                got_wt = wtnp.report(x1, x2, y1, y2)
                assert got_wm == rep and got_wt == rep
                assert sum(mult for _, mult in got_wm) == cnt


def test_c3_space_accounting():
    with criterion("C3 space accounting (payload exact, index overhead <= 6.25%)"):
        rng = np.random.default_rng(0xC3)
        for n, sigma in ((50_000, 300), (20_000, 17), (65_536, 256)):
            seq = rng.integers(0, sigma, n)
            depth = max(1, (sigma - 1).bit_length())
            wm = WaveletMatrix(seq, sigma, bitmap="plain", sample_rate=32)
            assert wm.payload_bits == n * depth
            assert sum(wm.level_widths) == n * depth
            for bv in wm._levels:
                assert bv.index_bits / bv.payload_bits <= 0.0625
            hwm = HuffmanWaveletMatrix(seq, sigma)
            stats = SymbolStats.from_sequence(seq, sigma)
            coded = int((stats.counts * hwm.code_table.lengths).sum())
            assert hwm.payload_bits == coded
            hwtnp = HuffmanPointerlessTree(seq, sigma)
            assert hwtnp.payload_bits == coded
        for density in (0.02, 0.5, 0.97):
            bits = (rng.random(100_000) < density).astype(np.uint8)
            bv = bitvector(bits, "plain", 32)
            # the full serialized form also fits the budget at this size
            assert (bv.size_bits - bv.payload_bits) / bv.payload_bits <= 0.0625
            assert bv.index_bits / bv.payload_bits <= 0.0625


def test_c4_huffman_optimality_and_entropy_bound():
    with criterion("C4 code lengths optimal (500 trials) and L/n < H0+1"):
        rng = random.Random(0xC4)
        for _ in range(500):
            sigma = rng.randrange(1, 9)
            counts = [rng.randrange(0, 200) for _ in range(sigma)]
            if not any(counts):
                counts[rng.randrange(sigma)] = 1
            stats = SymbolStats(sigma, sum(counts), np.asarray(counts, dtype=np.int64))
            lengths = huffman_code_lengths(stats)
            cost = int((np.asarray(counts) * lengths).sum())
            assert cost == optimal_code_cost(counts), counts
            h0, total = entropy_and_cost(stats, lengths)
            assert total == cost
            if sum(1 for c in counts if c) >= 2:
                assert total / stats.n < h0 + 1, counts


def test_c5_code_assignment_structure():
    with criterion("C5 shuffle-compatible codes (500 profiles)"):
        rng = random.Random(0xC5)
        for _ in range(500):
            sigma = rng.randrange(1, 41)
            counts = [rng.randrange(0, 80) for _ in range(sigma)]
            if not any(counts):
                counts[rng.randrange(sigma)] = 1
            stats = SymbolStats(sigma, sum(counts), np.asarray(counts, dtype=np.int64))
            lengths = huffman_code_lengths(stats)
            tm = assign_matrix_codes(lengths)
            tc = assign_canonical_codes(lengths)
            coded = [(int(l), int(c)) for l, c in zip(tm.lengths, tm.codes) if l > 0]
            # prefix-free
            assert tm.is_prefix_free()
            # Kraft-complete (single-code convention: one code of length 1)
            if len(coded) == 1:
                assert coded[0][0] == 1
            else:
                ell_max = max(l for l, _ in coded)
                assert sum(1 << (ell_max - l) for l, _ in coded) == 1 << ell_max
            # identical length multiset to the canonical assignment
            assert sorted(tm.lengths.tolist()) == sorted(tc.lengths.tolist())
            # finished codes order after every running code at their depth
            for ell in {l for l, _ in coded}:
                finished = [c for l, c in coded if l == ell]
                running = [c >> (l - ell) for l, c in coded if l > ell]
                for cf in finished:
                    for cr in running:
                        assert reverse_bits(cf, ell) > reverse_bits(cr, ell)


def test_c6_final_level_ordering():
    with criterion("C6 last-level order = stable sort by bit-reversed symbol"):
        rng = random.Random(0xC6)
        for _ in range(100):
            n = rng.randrange(1, 300)
            sigma = rng.choice([2, 3, 5, 17, 33, 256])
            seq = [rng.randrange(sigma) for _ in range(n)]
            wm = WaveletMatrix(seq, sigma)
            got = [None] * n
            for i, p in enumerate(wm.final_positions()):
                got[p - 1] = seq[i]
            order = sorted(range(n), key=lambda i: (reverse_bits(seq[i], wm.depth), i))
            assert got == [seq[i] for i in order]


def _run_batch(struct, op, queries):
    if op == "access":
        fn = struct.access
        for (i,) in queries:
            fn(i)
    elif op == "rank":
        fn = struct.rank
        for a, i in queries:
            fn(a, i)
    else:
        fn = struct.select
        for a, j in queries:
            fn(a, j)


def test_c7_benchmark_direction():
    with criterion("C7 wavelet matrix no slower than levelwise tree at n=1e7"):
        n, sigma = 10_000_000, 1 << 16
        seq = np.random.default_rng(0xC7).integers(0, sigma, n, dtype=np.int64)
        wm = WaveletMatrix(seq, sigma, variant="extended", bitmap="plain", sample_rate=32)
        wtnp = PointerlessWaveletTree(
            seq, sigma, variant="extended", bitmap="plain", sample_rate=32
        )
        assert wm.payload_bits == wtnp.payload_bits == 16 * n
        reps = 3
        means = {}
        for op in ("access", "rank", "select"):
            queries = gen_queries(seq, op, 2500, seed=7)
            for name, struct in (("wm", wm), ("wtnp", wtnp)):
                _run_batch(struct, op, queries)  # warm, untimed
                t0 = time.perf_counter_ns()
                for _ in range(reps):
                    _run_batch(struct, op, queries)
                means[(name, op)] = (time.perf_counter_ns() - t0) / (reps * len(queries))
        for op in ("access", "rank", "select"):
            wm_ns, wt_ns = means[("wm", op)], means[("wtnp", op)]
            print(f"  {op}: wm {wm_ns:.0f} ns/query, wtnp {wt_ns:.0f} ns/query")
            assert wm_ns <= 1.00 * wt_ns, (op, means)


def test_c8_serialization_round_trips():
    with criterion("C8 serialize/deserialize round trips, bad magic rejected"):
        rng = random.Random(0xC8)
        for n, sigma in ((0, 5), (1, 1), (400, 60)):
            seq = [rng.randrange(sigma) for _ in range(n)]
            for name, struct in all_structures(seq, sigma, "plain"):
                clone = serial.load_bytes(struct.to_bytes())
                assert clone.to_bytes() == struct.to_bytes(), name
                if n:
                    assert_query_equal(
                        [(name, struct), (name + "'", clone)], seq, sigma, rng, 6
                    )
            if n:
                wm = WaveletMatrix(seq, sigma)
                clone = serial.load_bytes(wm.to_bytes())
                assert clone.count(1, n, 0, sigma - 1) == n
        bv = bitvector([1, 0, 1], "rrr")
        assert serial.load_bytes(bv.to_bytes()).to_bytes() == bv.to_bytes()
        blob = bytearray(WaveletMatrix([1, 2, 3], 4).to_bytes())
        blob[1] ^= 0x40
        with pytest.raises(DataFormatError):
            serial.load_bytes(bytes(blob))


def test_c9_query_generation_determinism(tmp_path):
    with criterion("C9 query files byte-identical under a fixed seed"):
        rng = random.Random(0xC9)
        seq = [rng.randrange(99) for _ in range(5000)]
        pts = [(rng.randrange(2000), rng.randrange(1500)) for _ in range(3000)]
        for op in ("access", "rank", "select"):
            p1 = tmp_path / f"{op}-1.csv"
            p2 = tmp_path / f"{op}-2.csv"
            write_queries_csv(p1, op, gen_queries(seq, op, 500, seed=424242))
            write_queries_csv(p2, op, gen_queries(seq, op, 500, seed=424242))
            assert p1.read_bytes() == p2.read_bytes()
            p3 = tmp_path / f"{op}-3.csv"
            write_queries_csv(p3, op, gen_queries(seq, op, 500, seed=424243))
            assert p1.read_bytes() != p3.read_bytes()
        g1, g2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
        write_queries_csv(g1, "count", gen_grid_queries(pts, 250, seed=7))
        write_queries_csv(g2, "count", gen_grid_queries(pts, 250, seed=7))
        assert g1.read_bytes() == g2.read_bytes()
