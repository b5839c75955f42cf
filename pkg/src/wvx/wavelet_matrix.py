"""Wavelet matrices: balanced and entropy-shaped.

A wavelet matrix stores one bitmap per bit of the symbols, but instead
of keeping tree-node boundaries aligned between depths, every depth is
reordered by one global rule: positions whose bit is 0 all go left,
positions whose bit is 1 all go right. A single per-depth counter (the
number of 0s) then replaces all node boundary bookkeeping, which makes
the traversals cheaper than in a levelwise wavelet tree while keeping
every block of equal-prefix positions contiguous.

``WaveletMatrix`` uses the fixed-width decomposition of symbols into
``ceil(lg sigma)`` bits, most significant first. The ``extended``
variant additionally stores cumulative symbol counts in final-depth
order, trading sigma-proportional space for fewer rank calls.

``HuffmanWaveletMatrix`` replaces the fixed-width decomposition with the
shuffle-compatible optimal codes of
:func:`wvx.huffman.assign_matrix_codes`; occurrences stop contributing
bits once their code ends, so the total payload is exactly the coded
size of the sequence and deeper bitmaps shrink.

Positions are 1-based everywhere; all structures are immutable after
construction.
"""

from __future__ import annotations

import numpy as np

from . import serial
from .bitvector import bitvector, bitvector_from_bytes
from .errors import NotEnoughOccurrences
from .huffman import (
    SymbolStats,
    _reverse_bits_array,
    assign_matrix_codes,
    huffman_code_lengths,
    CodeTable,
)

VARIANT_STRICT = "strict"
VARIANT_EXTENDED = "extended"


def _as_symbol_array(seq, sigma):
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("sequence must be one-dimensional")
    if arr.size:
        if arr.min() < 0:
            raise ValueError("symbols must be non-negative")
        if sigma is not None and arr.max() >= sigma:
            raise ValueError(f"symbol {int(arr.max())} out of range [0, {sigma})")
    if sigma is None:
        sigma = int(arr.max()) + 1 if arr.size else 1
    if sigma < 1:
        raise ValueError("sigma must be at least 1")
    return arr, int(sigma)


def _depth_for(sigma):
    return max(1, (sigma - 1).bit_length())


def _resolve_level_modes(depth, bitmap, level_bitmaps):
    if level_bitmaps is None:
        return [bitmap] * depth
    modes = list(level_bitmaps)
    if len(modes) != depth:
        raise ValueError(f"expected {depth} per-level bitmap modes, got {len(modes)}")
    return modes


class WaveletMatrix:
    """Balanced wavelet matrix over symbols in [0, sigma)."""

    def __init__(
        self,
        seq,
        sigma=None,
        *,
        variant=VARIANT_STRICT,
        bitmap="plain",
        sample_rate=32,
        level_bitmaps=None,
    ):
        if variant not in (VARIANT_STRICT, VARIANT_EXTENDED):
            raise ValueError(f"unknown variant {variant!r}")
        arr, sigma = _as_symbol_array(seq, sigma)
        depth = _depth_for(sigma)
        modes = _resolve_level_modes(depth, bitmap, level_bitmaps)
        levels = []
        zcounts = []
        cur = arr.astype(np.uint64)
        for ell in range(depth):
            shift = np.uint64(depth - 1 - ell)
            bits = ((cur >> shift) & np.uint64(1)).astype(np.uint8)
            levels.append(bitvector(bits, modes[ell], sample_rate))
            zcounts.append(int(bits.size - bits.sum(dtype=np.int64)))
            if ell + 1 < depth:
                cur = np.concatenate((cur[bits == 0], cur[bits == 1]))
        self._init_core(
            n=int(arr.size),
            sigma=sigma,
            depth=depth,
            variant=variant,
            levels=levels,
            zcounts=zcounts,
        )
        if variant == VARIANT_EXTENDED:
            counts = np.bincount(arr, minlength=sigma).astype(np.int64)
            self._init_extended(counts)

    def _init_core(self, n, sigma, depth, variant, levels, zcounts):
        self.n = n
        self.sigma = sigma
        self.depth = depth
        self.variant = variant
        self._levels = levels
        self._zeros = zcounts
        self._cum = None
        self._inv_rank = None

    def _init_extended(self, counts):
        order = np.argsort(
            _reverse_bits_array(np.arange(self.sigma, dtype=np.uint64), self.depth),
            kind="stable",
        )
        self._cum = np.concatenate(
            ([0], np.cumsum(counts[order], dtype=np.int64))
        )
        inv_rank = np.empty(self.sigma, dtype=np.int64)
        inv_rank[order] = np.arange(self.sigma, dtype=np.int64)
        self._inv_rank = inv_rank

    # -- queries ---------------------------------------------------------

    def _check_symbol(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")

    def access(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        value = 0
        for ell in range(self.depth):
            bv = self._levels[ell]
            b = bv.access(i)
            value = (value << 1) | b
            i = self._zeros[ell] + bv.rank1(i) if b else bv.rank0(i)
        return value

    def rank(self, a, i):
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        if self.variant == VARIANT_EXTENDED:
            for ell in range(self.depth):
                bv = self._levels[ell]
                if (a >> (self.depth - 1 - ell)) & 1:
                    i = self._zeros[ell] + bv.rank1(i)
                else:
                    i = bv.rank0(i)
            return i - int(self._cum[self._inv_rank[a]])
        p = 0
        for ell in range(self.depth):
            bv = self._levels[ell]
            if (a >> (self.depth - 1 - ell)) & 1:
                z = self._zeros[ell]
                p = z + bv.rank1(p)
                i = z + bv.rank1(i)
            else:
                p = bv.rank0(p)
                i = bv.rank0(i)
        return i - p

    def select(self, a, j):
        self._check_symbol(a)
        if j < 1:
            raise NotEnoughOccurrences(f"occurrence index {j} must be at least 1")
        if self.variant == VARIANT_EXTENDED:
            k = int(self._inv_rank[a])
            occ = int(self._cum[k + 1] - self._cum[k])
            if j > occ:
                raise NotEnoughOccurrences(
                    f"not enough occurrences: requested #{j} of symbol {a}, have {occ}"
                )
            pos = int(self._cum[k]) + j
        else:
            p = 0
            i = self.n
            for ell in range(self.depth):
                bv = self._levels[ell]
                if (a >> (self.depth - 1 - ell)) & 1:
                    z = self._zeros[ell]
                    p = z + bv.rank1(p)
                    i = z + bv.rank1(i)
                else:
                    p = bv.rank0(p)
                    i = bv.rank0(i)
            if j > i - p:
                raise NotEnoughOccurrences(
                    f"not enough occurrences: requested #{j} of symbol {a}, have {i - p}"
                )
            pos = p + j
        for ell in range(self.depth - 1, -1, -1):
            bv = self._levels[ell]
            if (a >> (self.depth - 1 - ell)) & 1:
                pos = bv.select1(pos - self._zeros[ell])
            else:
                pos = bv.select0(pos)
        return pos

    # -- range queries ---------------------------------------------------

    def _check_rect(self, x1, x2):
        if x1 > x2:
            return False
        if x1 < 1 or x2 > self.n:
            raise IndexError(
                f"column range [{x1}, {x2}] out of range [1, {self.n}]"
            )
        return True

    def count(self, x1, x2, y1, y2):
        """Number of positions i in [x1, x2] with y1 <= S[i] <= y2."""
        if not self._check_rect(x1, x2) or y1 > y2:
            return 0
        return self._count(0, x1, x2, 0, y1, y2)

    def _count(self, ell, x1, x2, alpha, y1, y2):
        if x1 > x2:
            return 0
        hi = alpha + (1 << (self.depth - ell)) - 1
        if hi < y1 or alpha > y2:
            return 0
        if y1 <= alpha and hi <= y2:
            return x2 - x1 + 1
        bv = self._levels[ell]
        z = self._zeros[ell]
        r0a = bv.rank0(x1 - 1)
        r0b = bv.rank0(x2)
        lx1, lx2 = r0a + 1, r0b
        rx1, rx2 = z + (x1 - 1 - r0a) + 1, z + (x2 - r0b)
        half = 1 << (self.depth - ell - 1)
        return self._count(ell + 1, lx1, lx2, alpha, y1, y2) + self._count(
            ell + 1, rx1, rx2, alpha + half, y1, y2
        )

    def report(self, x1, x2, y1, y2):
        """Distinct symbols in the rectangle with multiplicities, ascending."""
        out = []
        if self._check_rect(x1, x2) and y1 <= y2:
            self._report(0, x1, x2, 0, y1, y2, out)
        return out

    def _report(self, ell, x1, x2, alpha, y1, y2, out):
        if x1 > x2:
            return
        hi = alpha + (1 << (self.depth - ell)) - 1
        if hi < y1 or alpha > y2:
            return
        if ell == self.depth:
            out.append((alpha, x2 - x1 + 1))
            return
        bv = self._levels[ell]
        z = self._zeros[ell]
        r0a = bv.rank0(x1 - 1)
        r0b = bv.rank0(x2)
        half = 1 << (self.depth - ell - 1)
        self._report(ell + 1, r0a + 1, r0b, alpha, y1, y2, out)
        self._report(
            ell + 1, z + (x1 - 1 - r0a) + 1, z + (x2 - r0b), alpha + half, y1, y2, out
        )

    # -- bookkeeping -----------------------------------------------------

    @property
    def zeros_per_level(self):
        return list(self._zeros)

    @property
    def level_widths(self):
        return [len(bv) for bv in self._levels]

    @property
    def payload_bits(self):
        return self.n * self.depth

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def final_positions(self):
        """Map each 1-based position to its slot in the virtual last depth."""
        out = np.empty(self.n, dtype=np.int64)
        for i in range(1, self.n + 1):
            pos = i
            for ell in range(self.depth):
                bv = self._levels[ell]
                if bv.access(pos):
                    pos = self._zeros[ell] + bv.rank1(pos)
                else:
                    pos = bv.rank0(pos)
            out[i - 1] = pos
        return out

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_WM)
        w.u16(serial.VERSION)
        w.u8(0 if self.variant == VARIANT_STRICT else 1)
        w.u64(self.n)
        w.u64(self.sigma)
        w.u16(self.depth)
        w.u64_array(np.asarray(self._zeros, dtype=np.uint64))
        if self.variant == VARIANT_EXTENDED:
            w.u64_array(self._cum)
            w.u64_array(self._inv_rank)
        for bv in self._levels:
            w.blob(bv.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_WM)
        r.expect_version()
        variant = VARIANT_STRICT if r.u8() == 0 else VARIANT_EXTENDED
        n = r.u64()
        sigma = r.u64()
        depth = r.u16()
        zcounts = [int(z) for z in r.u64_array()]
        cum = inv_rank = None
        if variant == VARIANT_EXTENDED:
            cum = r.u64_array().astype(np.int64)
            inv_rank = r.u64_array().astype(np.int64)
        levels = [bitvector_from_bytes(r.blob()) for _ in range(depth)]
        wm = cls.__new__(cls)
        wm._init_core(n, sigma, depth, variant, levels, zcounts)
        wm._cum = cum
        wm._inv_rank = inv_rank
        return wm


class HuffmanWaveletMatrix:
    """Wavelet matrix with shuffle-compatible optimal variable-length codes.

    Each occurrence of symbol a contributes one bit per code level, so
    bitmap widths shrink with depth and the payload equals the coded
    size of the sequence. Average query depth tracks the entropy of the
    symbol distribution rather than lg sigma.
    """

    def __init__(self, seq, sigma=None, *, bitmap="plain", sample_rate=32):
        arr, sigma = _as_symbol_array(seq, sigma)
        n = int(arr.size)
        if n == 0:
            self._init_core(0, sigma, None, [], [], np.zeros(sigma, np.int64), None)
            return
        stats = SymbolStats.from_sequence(arr, sigma)
        table = assign_matrix_codes(huffman_code_lengths(stats))
        lengths = table.lengths
        codes = table.codes
        leaf_off = np.zeros(sigma, dtype=np.int64)
        levels = []
        zcounts = []
        cur = arr
        for ell in range(table.ell_max):
            shift = (lengths[cur] - 1 - ell).astype(np.uint64)
            bits = ((codes[cur] >> shift) & np.uint64(1)).astype(np.uint8)
            levels.append(bitvector(bits, bitmap, sample_rate))
            zcounts.append(int(bits.size - bits.sum(dtype=np.int64)))
            nxt = np.concatenate((cur[bits == 0], cur[bits == 1]))
            done = lengths[nxt] == ell + 1
            term = np.flatnonzero(done)
            if term.size:
                syms, first = np.unique(nxt[term], return_index=True)
                leaf_off[syms] = term[first]
                cur = nxt[~done]
            else:
                cur = nxt
        self._init_core(
            n, sigma, table, levels, zcounts, stats.counts.copy(), leaf_off
        )

    def _init_core(self, n, sigma, table, levels, zcounts, counts, leaf_off):
        self.n = n
        self.sigma = sigma
        self.code_table = table
        self._levels = levels
        self._zeros = zcounts
        self._counts = counts
        self._leaf_off = leaf_off
        self._terminals = table.terminals if table is not None else {}

    # -- queries ---------------------------------------------------------

    def _check_symbol(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")

    def access(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        path = 0
        terminals = self._terminals
        for ell in range(len(self._levels)):
            bv = self._levels[ell]
            b = bv.access(i)
            path = (path << 1) | b
            sym = terminals.get((ell + 1, path))
            if sym is not None:
                return sym
            i = self._zeros[ell] + bv.rank1(i) if b else bv.rank0(i)
        raise AssertionError("bit path matched no code")

    def rank(self, a, i):
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        if self._counts[a] == 0 or i == 0:
            return 0
        code, ell_a = self.code_table.encode(a)
        for ell in range(ell_a):
            bv = self._levels[ell]
            if (code >> (ell_a - 1 - ell)) & 1:
                i = self._zeros[ell] + bv.rank1(i)
            else:
                i = bv.rank0(i)
        return i - int(self._leaf_off[a])

    def select(self, a, j):
        self._check_symbol(a)
        occ = int(self._counts[a])
        if j < 1 or j > occ:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested #{j} of symbol {a}, have {occ}"
            )
        code, ell_a = self.code_table.encode(a)
        pos = int(self._leaf_off[a]) + j
        for ell in range(ell_a - 1, -1, -1):
            bv = self._levels[ell]
            if (code >> (ell_a - 1 - ell)) & 1:
                pos = bv.select1(pos - self._zeros[ell])
            else:
                pos = bv.select0(pos)
        return pos

    # -- bookkeeping -----------------------------------------------------

    @property
    def depth(self):
        return len(self._levels)

    @property
    def level_widths(self):
        return [len(bv) for bv in self._levels]

    @property
    def zeros_per_level(self):
        return list(self._zeros)

    @property
    def payload_bits(self):
        return sum(len(bv) for bv in self._levels)

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_HWM)
        w.u16(serial.VERSION)
        w.u8(1 if self.code_table is not None else 0)
        w.u64(self.n)
        w.u64(self.sigma)
        w.u16(len(self._levels))
        w.u64_array(np.asarray(self._zeros, dtype=np.uint64))
        w.u64_array(self._counts)
        if self.code_table is not None:
            w.u64_array(self._leaf_off)
            w.blob(self.code_table.to_bytes())
        for bv in self._levels:
            w.blob(bv.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_HWM)
        r.expect_version()
        has_table = r.u8()
        n = r.u64()
        sigma = r.u64()
        nlevels = r.u16()
        zcounts = [int(z) for z in r.u64_array()]
        counts = r.u64_array().astype(np.int64)
        table = None
        leaf_off = None
        if has_table:
            leaf_off = r.u64_array().astype(np.int64)
            table = CodeTable.from_bytes(r.blob())
        levels = [bitvector_from_bytes(r.blob()) for _ in range(nlevels)]
        hwm = cls.__new__(cls)
        hwm._init_core(n, sigma, table, levels, zcounts, counts, leaf_off)
        return hwm
