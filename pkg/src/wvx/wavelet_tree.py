"""Wavelet trees: pointer-based, levelwise, and canonical-code shaped.

These are the structures the wavelet matrix is measured against:

* ``PointerWaveletTree`` -- one bitmap per tree node, children stored
  as explicit objects. Fastest traversals, sigma-proportional pointer
  overhead.
* ``PointerlessWaveletTree`` -- bitmaps of equal depth concatenated into
  one bitmap per level; node boundaries are recomputed on the fly
  (``strict``) or looked up in a cumulative-count array (``extended``).
* ``HuffmanPointerlessTree`` -- the levelwise layout with canonical
  variable-length codes, so each level's bitmap only covers the
  occurrences whose codes are still running.

All trees split a symbol range [alpha, omega) at
alpha + 2^(ceil(lg(omega-alpha)) - 1), handle range queries over
(position, symbol) pairs, and agree with the wavelet matrix on every
query. Positions are 1-based.
"""

from __future__ import annotations

import numpy as np

from . import serial
from .bitvector import bitvector, bitvector_from_bytes
from .errors import NotEnoughOccurrences
from .huffman import (
    CodeTable,
    SymbolStats,
    assign_canonical_codes,
    huffman_code_lengths,
)
from .wavelet_matrix import _as_symbol_array

VARIANT_STRICT = "strict"
VARIANT_EXTENDED = "extended"


def _split_point(alpha, omega):
    return alpha + (1 << ((omega - alpha - 1).bit_length() - 1))


def tree_paths(sigma):
    """Root-to-leaf path (code value, length) of each symbol.

    Paths follow the midpoint split; for powers of two they reduce to
    the plain binary representation in ceil(lg sigma) bits.
    """
    codes = np.zeros(sigma, dtype=np.uint64)
    lens = np.zeros(sigma, dtype=np.int64)
    for a in range(sigma):
        alpha, omega = 0, sigma
        c = 0
        ell = 0
        while omega - alpha > 1:
            mid = _split_point(alpha, omega)
            c <<= 1
            if a >= mid:
                c |= 1
                alpha = mid
            else:
                omega = mid
            ell += 1
        codes[a] = c
        lens[a] = ell
    return codes, lens


def _build_prefix_sorted_levels(arr, codes, lens, bitmap, sample_rate, num_levels):
    """Level bitmaps of a levelwise tree with per-symbol path codes.

    Level ell holds bit ell of every occurrence whose path is longer
    than ell, in the order of a stable sort by the ell-bit path prefix.
    Occurrences of finished paths drop out, so widths never grow; levels
    past the deepest occurring path are empty bitmaps.
    """
    elem_codes = codes[arr]
    elem_lens = lens[arr]
    levels = []
    zcounts = []
    for ell in range(num_levels):
        active = elem_lens > ell
        sub_codes = elem_codes[active]
        sub_lens = elem_lens[active]
        prefix = sub_codes >> (sub_lens - ell).astype(np.uint64)
        order = np.argsort(prefix, kind="stable")
        bits = (
            (sub_codes[order] >> (sub_lens[order] - 1 - ell).astype(np.uint64))
            & np.uint64(1)
        ).astype(np.uint8)
        levels.append(bitvector(bits, bitmap, sample_rate))
        zcounts.append(int(bits.size - bits.sum(dtype=np.int64)))
    return levels, zcounts


class PointerWaveletTree:
    """Pointer-based wavelet tree; the reference structure and baseline."""

    class _Node:
        __slots__ = ("alpha", "omega", "nv", "bv", "left", "right")

        def __init__(self, alpha, omega, nv, bv=None, left=None, right=None):
            self.alpha = alpha
            self.omega = omega
            self.nv = nv
            self.bv = bv
            self.left = left
            self.right = right

        @property
        def is_leaf(self):
            return self.omega - self.alpha == 1

    def __init__(self, seq, sigma=None, *, bitmap="plain", sample_rate=32):
        arr, sigma = _as_symbol_array(seq, sigma)
        self.n = int(arr.size)
        self.sigma = sigma
        self._bitmap = bitmap
        self._sample_rate = sample_rate
        self._root = self._build(arr, 0, sigma)

    def _build(self, vals, alpha, omega):
        if omega - alpha == 1:
            return self._Node(alpha, omega, int(vals.size))
        mid = _split_point(alpha, omega)
        bits = vals >= mid
        bv = bitvector(bits.astype(np.uint8), self._bitmap, self._sample_rate)
        left = self._build(vals[~bits], alpha, mid)
        right = self._build(vals[bits], mid, omega)
        return self._Node(alpha, omega, int(vals.size), bv, left, right)

    def _check_symbol(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")

    def access(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        node = self._root
        while not node.is_leaf:
            if node.bv.access(i):
                i = node.bv.rank1(i)
                node = node.right
            else:
                i = node.bv.rank0(i)
                node = node.left
        return node.alpha

    def rank(self, a, i):
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        node = self._root
        while not node.is_leaf:
            if a >= _split_point(node.alpha, node.omega):
                i = node.bv.rank1(i)
                node = node.right
            else:
                i = node.bv.rank0(i)
                node = node.left
        return i

    def select(self, a, j):
        self._check_symbol(a)
        if j < 1:
            raise NotEnoughOccurrences(f"occurrence index {j} must be at least 1")
        frames = []
        node = self._root
        while not node.is_leaf:
            bit = a >= _split_point(node.alpha, node.omega)
            frames.append((node, bit))
            node = node.right if bit else node.left
        if j > node.nv:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested #{j} of symbol {a}, have {node.nv}"
            )
        for parent, bit in reversed(frames):
            j = parent.bv.select1(j) if bit else parent.bv.select0(j)
        return j

    def level_bit_totals(self):
        """Total stored bits of the node bitmaps at each depth."""
        totals = []

        def walk(node, depth):
            if node.is_leaf:
                return
            while len(totals) <= depth:
                totals.append(0)
            totals[depth] += len(node.bv)
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)

        walk(self._root, 0)
        return totals

    @property
    def payload_bits(self):
        return sum(self.level_bit_totals())

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_WTP)
        w.u16(serial.VERSION)
        w.u64(self.n)
        w.u64(self.sigma)

        def emit(node):
            if node.is_leaf:
                w.u8(1)
                w.u64(node.alpha)
                w.u64(node.nv)
            else:
                w.u8(0)
                w.u64(node.alpha)
                w.u64(node.omega)
                w.blob(node.bv.to_bytes())
                emit(node.left)
                emit(node.right)

        emit(self._root)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_WTP)
        r.expect_version()
        n = r.u64()
        sigma = r.u64()

        def read_node():
            if r.u8():
                alpha = r.u64()
                nv = r.u64()
                return cls._Node(alpha, alpha + 1, nv)
            alpha = r.u64()
            omega = r.u64()
            bv = bitvector_from_bytes(r.blob())
            left = read_node()
            right = read_node()
            return cls._Node(alpha, omega, len(bv), bv, left, right)

        tree = cls.__new__(cls)
        tree.n = n
        tree.sigma = sigma
        tree._bitmap = None
        tree._sample_rate = None
        tree._root = read_node()
        return tree


class PointerlessWaveletTree:
    """Levelwise wavelet tree without node pointers.

    The strict variant recomputes node boundaries with two extra rank
    calls per level; the extended variant stores cumulative symbol
    counts C (C[a] = occurrences of symbols smaller than a) and spends
    one extra rank instead.
    """

    def __init__(
        self,
        seq,
        sigma=None,
        *,
        variant=VARIANT_STRICT,
        bitmap="plain",
        sample_rate=32,
    ):
        if variant not in (VARIANT_STRICT, VARIANT_EXTENDED):
            raise ValueError(f"unknown variant {variant!r}")
        arr, sigma = _as_symbol_array(seq, sigma)
        codes, lens = tree_paths(sigma)
        levels, zcounts = _build_prefix_sorted_levels(
            arr, codes, lens, bitmap, sample_rate, num_levels=int(lens.max())
        )
        cum = None
        if variant == VARIANT_EXTENDED:
            counts = np.bincount(arr, minlength=sigma).astype(np.int64)
            cum = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
        self._init_core(int(arr.size), sigma, variant, levels, zcounts, cum)

    def _init_core(self, n, sigma, variant, levels, zcounts, cum):
        self.n = n
        self.sigma = sigma
        self.variant = variant
        self._levels = levels
        self._zeros = zcounts
        self._cum = cum

    def _check_symbol(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")

    # -- strict navigation -------------------------------------------------

    def access(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        if self.variant == VARIANT_EXTENDED:
            return self._access_extended(i)
        alpha, omega = 0, self.sigma
        p, e = 0, self.n
        ell = 0
        while omega - alpha > 1:
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            mid = _split_point(alpha, omega)
            if bv.access(p + i):
                i = bv.rank1(p + i) - (p - lo)
                p, alpha = p + m, mid
            else:
                i = bv.rank0(p + i) - lo
                e, omega = p + m, mid
            ell += 1
        return alpha

    def rank(self, a, i):
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        if self.variant == VARIANT_EXTENDED:
            return self._rank_extended(a, i)
        alpha, omega = 0, self.sigma
        p, e = 0, self.n
        ell = 0
        while omega - alpha > 1:
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            mid = _split_point(alpha, omega)
            if a >= mid:
                i = bv.rank1(p + i) - (p - lo)
                p, alpha = p + m, mid
            else:
                i = bv.rank0(p + i) - lo
                e, omega = p + m, mid
            ell += 1
        return i

    def select(self, a, j):
        self._check_symbol(a)
        if j < 1:
            raise NotEnoughOccurrences(f"occurrence index {j} must be at least 1")
        if self.variant == VARIANT_EXTENDED:
            return self._select_extended(a, j)
        alpha, omega = 0, self.sigma
        p, e = 0, self.n
        ell = 0
        frames = []
        while omega - alpha > 1:
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            mid = _split_point(alpha, omega)
            bit = a >= mid
            frames.append((bv, p, lo, bit))
            if bit:
                p, alpha = p + m, mid
            else:
                e, omega = p + m, mid
            ell += 1
        if j > e - p:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested #{j} of symbol {a}, have {e - p}"
            )
        for bv, p, lo, bit in reversed(frames):
            if bit:
                j = bv.select1((p - lo) + j) - p
            else:
                j = bv.select0(lo + j) - p
        return j

    # -- extended navigation ------------------------------------------------

    def _access_extended(self, i):
        alpha, omega = 0, self.sigma
        ell = 0
        while omega - alpha > 1:
            bv = self._levels[ell]
            p = int(self._cum[alpha])
            lo = bv.rank0(p)
            mid = _split_point(alpha, omega)
            if bv.access(p + i):
                i = bv.rank1(p + i) - (p - lo)
                alpha = mid
            else:
                i = bv.rank0(p + i) - lo
                omega = mid
            ell += 1
        return alpha

    def _rank_extended(self, a, i):
        alpha, omega = 0, self.sigma
        ell = 0
        while omega - alpha > 1:
            bv = self._levels[ell]
            p = int(self._cum[alpha])
            lo = bv.rank0(p)
            mid = _split_point(alpha, omega)
            if a >= mid:
                i = bv.rank1(p + i) - (p - lo)
                alpha = mid
            else:
                i = bv.rank0(p + i) - lo
                omega = mid
            ell += 1
        return i

    def _select_extended(self, a, j):
        occ = int(self._cum[a + 1] - self._cum[a])
        if j > occ:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested #{j} of symbol {a}, have {occ}"
            )
        frames = []
        alpha, omega = 0, self.sigma
        ell = 0
        while omega - alpha > 1:
            mid = _split_point(alpha, omega)
            bit = a >= mid
            frames.append((ell, alpha, bit))
            if bit:
                alpha = mid
            else:
                omega = mid
            ell += 1
        for ell, alpha_v, bit in reversed(frames):
            bv = self._levels[ell]
            p = int(self._cum[alpha_v])
            lo = bv.rank0(p)
            if bit:
                j = bv.select1((p - lo) + j) - p
            else:
                j = bv.select0(lo + j) - p
        return j

    # -- range queries -------------------------------------------------------

    def _check_rect(self, x1, x2):
        if x1 > x2:
            return False
        if x1 < 1 or x2 > self.n:
            raise IndexError(f"column range [{x1}, {x2}] out of range [1, {self.n}]")
        return True

    def count(self, x1, x2, y1, y2):
        if not self._check_rect(x1, x2) or y1 > y2:
            return 0
        return self._count(0, x1, x2, y1, y2, 0, self.n, 0, self.sigma)

    def _count(self, ell, x1, x2, y1, y2, p, e, alpha, omega):
        if x1 > x2 or omega - 1 < y1 or alpha > y2:
            return 0
        if y1 <= alpha and omega - 1 <= y2:
            return x2 - x1 + 1
        bv = self._levels[ell]
        lo = bv.rank0(p)
        hi = bv.rank0(e)
        m = hi - lo
        mid = _split_point(alpha, omega)
        lx1 = bv.rank0(p + x1 - 1) - lo + 1
        lx2 = bv.rank0(p + x2) - lo
        rx1 = x1 - lx1 + 1
        rx2 = x2 - lx2
        return self._count(
            ell + 1, lx1, lx2, y1, y2, p, p + m, alpha, mid
        ) + self._count(ell + 1, rx1, rx2, y1, y2, p + m, e, mid, omega)

    def report(self, x1, x2, y1, y2):
        out = []
        if self._check_rect(x1, x2) and y1 <= y2:
            self._report(0, x1, x2, y1, y2, 0, self.n, 0, self.sigma, out)
        return out

    def _report(self, ell, x1, x2, y1, y2, p, e, alpha, omega, out):
        if x1 > x2 or omega - 1 < y1 or alpha > y2:
            return
        if omega - alpha == 1:
            out.append((alpha, x2 - x1 + 1))
            return
        bv = self._levels[ell]
        lo = bv.rank0(p)
        hi = bv.rank0(e)
        m = hi - lo
        mid = _split_point(alpha, omega)
        lx1 = bv.rank0(p + x1 - 1) - lo + 1
        lx2 = bv.rank0(p + x2) - lo
        self._report(ell + 1, lx1, lx2, y1, y2, p, p + m, alpha, mid, out)
        self._report(
            ell + 1, x1 - lx1 + 1, x2 - lx2, y1, y2, p + m, e, mid, omega, out
        )

    # -- bookkeeping -----------------------------------------------------------

    @property
    def depth(self):
        return len(self._levels)

    @property
    def level_widths(self):
        return [len(bv) for bv in self._levels]

    @property
    def payload_bits(self):
        return sum(len(bv) for bv in self._levels)

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_WTNP)
        w.u16(serial.VERSION)
        w.u8(0 if self.variant == VARIANT_STRICT else 1)
        w.u64(self.n)
        w.u64(self.sigma)
        w.u16(len(self._levels))
        w.u64_array(np.asarray(self._zeros, dtype=np.uint64))
        if self.variant == VARIANT_EXTENDED:
            w.u64_array(self._cum)
        for bv in self._levels:
            w.blob(bv.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_WTNP)
        r.expect_version()
        variant = VARIANT_STRICT if r.u8() == 0 else VARIANT_EXTENDED
        n = r.u64()
        sigma = r.u64()
        nlevels = r.u16()
        zcounts = [int(z) for z in r.u64_array()]
        cum = None
        if variant == VARIANT_EXTENDED:
            cum = r.u64_array().astype(np.int64)
        levels = [bitvector_from_bytes(r.blob()) for _ in range(nlevels)]
        tree = cls.__new__(cls)
        tree._init_core(n, sigma, variant, levels, zcounts, cum)
        return tree


class HuffmanPointerlessTree:
    """Levelwise tree shaped by canonical variable-length codes.

    Canonical codes are stored as produced (shortest code is 0); the
    tree is navigated on the complemented bits, which lays longer codes
    out to the left so every level's finished codes sit in one run at
    the right end and deeper bitmaps simply shrink.
    """

    def __init__(self, seq, sigma=None, *, bitmap="plain", sample_rate=32):
        arr, sigma = _as_symbol_array(seq, sigma)
        n = int(arr.size)
        if n == 0:
            self._init_core(0, sigma, None, [], [], np.zeros(sigma, np.int64))
            return
        stats = SymbolStats.from_sequence(arr, sigma)
        table = assign_canonical_codes(huffman_code_lengths(stats))
        nav = self._nav_codes(table)
        levels, zcounts = _build_prefix_sorted_levels(
            arr, nav, table.lengths, bitmap, sample_rate, num_levels=table.ell_max
        )
        self._init_core(n, sigma, table, levels, zcounts, stats.counts.copy())

    @staticmethod
    def _nav_codes(table):
        lens = table.lengths.astype(np.uint64)
        mask = np.where(lens > 0, (np.uint64(1) << lens) - np.uint64(1), np.uint64(0))
        return (~table.codes & mask).astype(np.uint64)

    def _init_core(self, n, sigma, table, levels, zcounts, counts):
        self.n = n
        self.sigma = sigma
        self.code_table = table
        self._levels = levels
        self._zeros = zcounts
        self._counts = counts
        if table is not None:
            nav = self._nav_codes(table)
            self._nav = nav
            self._terminals = {
                (int(l), int(c)): a
                for a, (l, c) in enumerate(zip(table.lengths, nav))
                if l > 0
            }
        else:
            self._nav = None
            self._terminals = {}

    def _check_symbol(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")

    def access(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        p, e = 0, self.n
        path = 0
        terminals = self._terminals
        ell = 0
        while True:
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            if bv.access(p + i):
                i = bv.rank1(p + i) - (p - lo)
                p = p + m
                path = (path << 1) | 1
            else:
                i = bv.rank0(p + i) - lo
                e = p + m
                path = path << 1
            ell += 1
            sym = terminals.get((ell, path))
            if sym is not None:
                return sym

    def rank(self, a, i):
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        if self._counts[a] == 0 or i == 0:
            return 0
        nav = int(self._nav[a])
        ell_a = int(self.code_table.lengths[a])
        p, e = 0, self.n
        for ell in range(ell_a):
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            if (nav >> (ell_a - 1 - ell)) & 1:
                i = bv.rank1(p + i) - (p - lo)
                p = p + m
            else:
                i = bv.rank0(p + i) - lo
                e = p + m
        return i

    def select(self, a, j):
        self._check_symbol(a)
        occ = int(self._counts[a])
        if j < 1 or j > occ:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested #{j} of symbol {a}, have {occ}"
            )
        nav = int(self._nav[a])
        ell_a = int(self.code_table.lengths[a])
        p, e = 0, self.n
        frames = []
        for ell in range(ell_a):
            bv = self._levels[ell]
            lo = bv.rank0(p)
            hi = bv.rank0(e)
            m = hi - lo
            bit = (nav >> (ell_a - 1 - ell)) & 1
            frames.append((bv, p, lo, bit))
            if bit:
                p = p + m
            else:
                e = p + m
        for bv, p, lo, bit in reversed(frames):
            if bit:
                j = bv.select1((p - lo) + j) - p
            else:
                j = bv.select0(lo + j) - p
        return j

    @property
    def depth(self):
        return len(self._levels)

    @property
    def level_widths(self):
        return [len(bv) for bv in self._levels]

    @property
    def payload_bits(self):
        return sum(len(bv) for bv in self._levels)

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_HWTNP)
        w.u16(serial.VERSION)
        w.u8(1 if self.code_table is not None else 0)
        w.u64(self.n)
        w.u64(self.sigma)
        w.u16(len(self._levels))
        w.u64_array(np.asarray(self._zeros, dtype=np.uint64))
        w.u64_array(self._counts)
        if self.code_table is not None:
            w.blob(self.code_table.to_bytes())
        for bv in self._levels:
            w.blob(bv.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_HWTNP)
        r.expect_version()
        has_table = r.u8()
        n = r.u64()
        sigma = r.u64()
        nlevels = r.u16()
        zcounts = [int(z) for z in r.u64_array()]
        counts = r.u64_array().astype(np.int64)
        table = CodeTable.from_bytes(r.blob()) if has_table else None
        levels = [bitvector_from_bytes(r.blob()) for _ in range(nlevels)]
        tree = cls.__new__(cls)
        tree._init_core(n, sigma, table, levels, zcounts, counts)
        return tree
