import random

import pytest

from helpers import assert_query_equal, random_sequence, skewed_sequence
from wvx.errors import NotEnoughOccurrences
from wvx.huffman import SymbolStats, reverse_bits
from wvx.oracle import naive_range
from wvx.wavelet_matrix import HuffmanWaveletMatrix, WaveletMatrix

S = [3, 1, 2, 0, 1]


def level_bits(struct, ell):
    bv = struct._levels[ell]
    return [bv.access(i) for i in range(1, len(bv) + 1)]


class TestBuild:
    def test_example_levels(self):
        wm = WaveletMatrix(S, 4)
        assert level_bits(wm, 0) == [1, 0, 1, 0, 0]
        assert level_bits(wm, 1) == [1, 0, 1, 1, 0]
        assert wm.zeros_per_level == [3, 2]
        assert wm.depth == 2

    def test_empty(self):
        wm = WaveletMatrix([], 4)
        assert wm.n == 0 and wm.level_widths == [0, 0]
        assert wm.rank(3, 0) == 0
        with pytest.raises(IndexError):
            wm.access(1)

    def test_constant(self):
        wm = WaveletMatrix([0, 0, 0], 2)
        assert level_bits(wm, 0) == [0, 0, 0]
        assert wm.zeros_per_level == [3]

    def test_symbol_out_of_range(self):
        with pytest.raises(ValueError):
            WaveletMatrix([4], 4)

    def test_depth_is_one_for_tiny_alphabets(self):
        assert WaveletMatrix([0], 1).depth == 1
        assert WaveletMatrix([1, 0], 2).depth == 1


class TestQueries:
    def test_access_examples(self):
        wm = WaveletMatrix(S, 4)
        assert wm.access(1) == 3
        assert wm.access(4) == 0
        assert WaveletMatrix([0], 1).access(1) == 0

    def test_rank_examples(self):
        wm = WaveletMatrix(S, 4)
        assert wm.rank(1, 5) == 2
        assert wm.rank(2, 5) == 1
        for a in range(4):
            assert wm.rank(a, 0) == 0

    def test_select_examples(self):
        wm = WaveletMatrix(S, 4)
        assert wm.select(1, 2) == 5
        assert wm.select(3, 1) == 1
        assert wm.select(0, 1) == 4
        with pytest.raises(NotEnoughOccurrences):
            wm.select(1, 3)

    def test_strict_and_extended_agree(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randrange(0, 250)
            sigma = rng.choice([2, 3, 5, 17, 90])
            seq = random_sequence(rng, n, sigma)
            strict = WaveletMatrix(seq, sigma, variant="strict")
            ext = WaveletMatrix(seq, sigma, variant="extended")
            assert_query_equal(
                [("wm-strict", strict), ("wm-extended", ext)], seq, sigma, rng
            )

    def test_oracle_equivalence_across_modes(self):
        rng = random.Random(29)
        for _ in range(20):
            n = rng.choice([1, 9, 140, 600])
            sigma = rng.choice([2, 5, 17, 256])
            seq = skewed_sequence(rng, n, sigma)
            structs = [
                (f"wm-{v}-{m}", WaveletMatrix(seq, sigma, variant=v, bitmap=m))
                for v in ("strict", "extended")
                for m in ("plain", "rrr")
            ]
            assert_query_equal(structs, seq, sigma, rng)

    def test_prefix_partition(self):
        rng = random.Random(7)
        seq = random_sequence(rng, 120, 9)
        wm = WaveletMatrix(seq, 9)
        for i in (0, 1, 17, 119, 120):
            assert sum(wm.rank(a, i) for a in range(9)) == i

    def test_select_rank_round_trip(self):
        rng = random.Random(19)
        seq = random_sequence(rng, 200, 6)
        wm = WaveletMatrix(seq, 6, variant="extended")
        for i in range(1, 201):
            a = seq[i - 1]
            r = wm.rank(a, i)
            assert wm.select(a, r) == i
        for _ in range(40):
            i = rng.randrange(1, 201)
            a = rng.randrange(6)
            r = wm.rank(a, i)
            if r:
                assert wm.select(a, r) <= i
                assert (wm.select(a, r) == i) == (seq[i - 1] == a)


class TestRangeQueries:
    def test_count_examples(self):
        wm = WaveletMatrix(S, 4)
        assert wm.count(1, 5, 0, 3) == 5
        assert wm.count(2, 3, 1, 2) == 2
        assert wm.count(1, 1, 0, 0) == 0
        assert wm.count(3, 2, 0, 3) == 0
        assert wm.count(1, 5, 3, 2) == 0

    def test_report_examples(self):
        wm = WaveletMatrix(S, 4)
        assert wm.report(2, 3, 1, 2) == [(1, 1), (2, 1)]
        assert wm.report(1, 5, 0, 3) == [(0, 1), (1, 2), (2, 1), (3, 1)]
        assert wm.report(4, 2, 0, 3) == []

    def test_against_brute_force(self):
        rng = random.Random(37)
        for _ in range(25):
            n = rng.randrange(1, 400)
            sigma = rng.choice([2, 3, 5, 17, 300])
            seq = random_sequence(rng, n, sigma)
            wm = WaveletMatrix(seq, sigma)
            for _ in range(20):
                x1, x2 = sorted(
                    (rng.randrange(1, n + 1), rng.randrange(1, n + 1))
                )
                y1 = rng.randrange(-2, sigma + 2)
                y2 = rng.randrange(-2, sigma + 2)
                cnt, rep = naive_range(seq, x1, x2, y1, y2)
                assert wm.count(x1, x2, y1, y2) == cnt
                got = wm.report(x1, x2, y1, y2)
                assert got == rep
                assert sum(m for _, m in got) == cnt

    def test_x_range_validation(self):
        wm = WaveletMatrix(S, 4)
        with pytest.raises(IndexError):
            wm.count(0, 3, 0, 3)
        with pytest.raises(IndexError):
            wm.count(1, 6, 0, 3)


class TestFinalOrdering:
    def test_last_level_is_stable_sort_by_reversed_bits(self):
        rng = random.Random(53)
        for _ in range(40):
            n = rng.randrange(1, 180)
            sigma = rng.choice([2, 3, 5, 17, 33])
            seq = random_sequence(rng, n, sigma)
            wm = WaveletMatrix(seq, sigma)
            pos = wm.final_positions()
            got = [None] * n
            for i, p in enumerate(pos):
                got[p - 1] = seq[i]
            order = sorted(
                range(n), key=lambda i: (reverse_bits(seq[i], wm.depth), i)
            )
            assert got == [seq[i] for i in order]

    def test_equal_prefix_blocks_stay_contiguous(self):
        # every fixed-width prefix class occupies an interval at its depth
        rng = random.Random(71)
        for _ in range(20):
            n = rng.randrange(1, 150)
            sigma = rng.choice([4, 6, 9, 32])
            seq = random_sequence(rng, n, sigma)
            wm = WaveletMatrix(seq, sigma)
            arrangement = list(seq)
            for ell in range(wm.depth):
                shift = wm.depth - ell
                keys = [a >> shift for a in arrangement]
                for prefix in set(keys):
                    hits = [k for k, key in enumerate(keys) if key == prefix]
                    assert hits == list(range(hits[0], hits[-1] + 1))
                bit = lambda a: (a >> (wm.depth - 1 - ell)) & 1
                arrangement = [a for a in arrangement if bit(a) == 0] + [
                    a for a in arrangement if bit(a) == 1
                ]


class TestHuffmanShaped:
    def test_example_levels(self):
        h = HuffmanWaveletMatrix([1, 1, 1, 0, 2])
        assert level_bits(h, 0) == [1, 1, 1, 0, 0]
        assert level_bits(h, 1) == [0, 1]
        assert h.zeros_per_level == [2, 1]
        assert h.payload_bits == 7

    def test_example_queries(self):
        h = HuffmanWaveletMatrix([1, 1, 1, 0, 2])
        assert h.access(4) == 0
        assert h.rank(1, 5) == 3
        assert h.select(2, 1) == 5

    def test_single_symbol(self):
        h = HuffmanWaveletMatrix([0, 0])
        assert h.level_widths == [2]
        assert level_bits(h, 0) == [0, 0]
        assert h.access(1) == 0 and h.rank(0, 2) == 2 and h.select(0, 2) == 2

    def test_empty(self):
        h = HuffmanWaveletMatrix([], sigma=5)
        assert h.n == 0 and h.level_widths == []
        assert h.rank(3, 0) == 0
        with pytest.raises(NotEnoughOccurrences):
            h.select(3, 1)

    def test_payload_is_total_code_length(self):
        rng = random.Random(61)
        for _ in range(30):
            n = rng.randrange(1, 400)
            sigma = rng.choice([2, 3, 17, 80])
            seq = skewed_sequence(rng, n, sigma)
            h = HuffmanWaveletMatrix(seq, sigma)
            stats = SymbolStats.from_sequence(seq, sigma)
            assert h.payload_bits == int((stats.counts * h.code_table.lengths).sum())
            widths = h.level_widths
            assert widths[0] == n
            assert all(widths[i] >= widths[i + 1] for i in range(len(widths) - 1))

    def test_oracle_equivalence(self):
        rng = random.Random(43)
        for _ in range(25):
            n = rng.randrange(1, 300)
            sigma = rng.choice([1, 2, 3, 17, 120])
            seq = skewed_sequence(rng, n, sigma)
            structs = [
                (f"hwm-{m}", HuffmanWaveletMatrix(seq, sigma, bitmap=m))
                for m in ("plain", "rrr")
            ]
            assert_query_equal(structs, seq, sigma, rng)

    def test_zero_count_symbol(self):
        h = HuffmanWaveletMatrix([0, 0, 2], sigma=4)
        assert h.rank(1, 3) == 0 and h.rank(3, 3) == 0
        with pytest.raises(NotEnoughOccurrences):
            h.select(1, 1)

    def test_terminated_runs_sit_at_the_right_end(self):
        # rebuild the shuffled order by hand; occurrences whose code just
        # ended must form one suffix run before each truncation
        rng = random.Random(83)
        for _ in range(30):
            n = rng.randrange(1, 250)
            sigma = rng.choice([3, 9, 40])
            seq = skewed_sequence(rng, n, sigma)
            h = HuffmanWaveletMatrix(seq, sigma)
            table = h.code_table
            cur = list(seq)
            for ell in range(h.depth):
                assert len(cur) == h.level_widths[ell]
                bits = [
                    (table.encode(a)[0] >> (table.encode(a)[1] - 1 - ell)) & 1
                    for a in cur
                ]
                nxt = [a for a, b in zip(cur, bits) if b == 0] + [
                    a for a, b in zip(cur, bits) if b == 1
                ]
                done = [table.length(a) == ell + 1 for a in nxt]
                if any(done):
                    first = done.index(True)
                    assert all(done[first:]), (seq, ell)
                cur = [a for a, d in zip(nxt, done) if not d]
