"""Optimal prefix codes and code tables.

Provides the pieces that entropy-shaped sequence indexes are built from:

* ``huffman_code_lengths`` -- optimal code lengths from symbol counts
  (two-queue merge).
* ``assign_canonical_codes`` -- the classic canonical assignment where
  all codes of one length are consecutive values and the first code of
  the shortest length is 0.
* ``assign_matrix_codes`` -- an alternative optimal assignment whose
  codes stay compatible with the global zeros-left/ones-right shuffle
  used by :class:`wvx.wavelet_matrix.HuffmanWaveletMatrix`: at every
  depth, the occurrences of codes that terminate there end up in one
  contiguous run at the right end of the shuffled order.

Code bits are most-significant-first: a code ``(value, length)`` is the
top ``length`` bits of ``value``. The library-wide convention is that a
0 bit branches left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import serial

KIND_FIXED = "fixed"
KIND_CANONICAL = "canonical"
KIND_WM = "wm"

_KIND_CODES = {KIND_FIXED: 0, KIND_CANONICAL: 1, KIND_WM: 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


@dataclass(frozen=True, eq=False)
class SymbolStats:
    """Occurrence counts of symbols 0..sigma-1 in a sequence of length n."""

    sigma: int
    n: int
    counts: np.ndarray

    @classmethod
    def from_sequence(cls, seq, sigma=None):
        arr = np.asarray(seq, dtype=np.int64)
        if arr.size and arr.min() < 0:
            raise ValueError("symbols must be non-negative")
        if sigma is None:
            sigma = int(arr.max()) + 1 if arr.size else 1
        elif arr.size and int(arr.max()) >= sigma:
            raise ValueError(f"symbol {int(arr.max())} out of range [0, {sigma})")
        counts = np.bincount(arr, minlength=sigma).astype(np.int64)
        return cls(sigma=int(sigma), n=int(arr.size), counts=counts)


def reverse_bits(code, length):
    """Read a ``length``-bit code backwards (bit i becomes bit length-1-i)."""
    if not 0 <= code < (1 << length):
        raise ValueError(f"code {code} does not fit in {length} bits")
    r = 0
    for _ in range(length):
        r = (r << 1) | (code & 1)
        code >>= 1
    return r


def _reverse_bits_array(arr, length):
    a = np.asarray(arr, dtype=np.uint64)
    r = np.zeros_like(a)
    for _ in range(length):
        r = (r << np.uint64(1)) | (a & np.uint64(1))
        a = a >> np.uint64(1)
    return r


def huffman_code_lengths(stats):
    """Optimal prefix-free code lengths; 0 marks symbols with no occurrences.

    A lone present symbol gets length 1.
    """
    counts = np.asarray(stats.counts, dtype=np.int64)
    present = np.flatnonzero(counts > 0)
    if present.size == 0:
        raise ValueError("cannot build a code: all symbol counts are zero")
    lengths = np.zeros(counts.size, dtype=np.int64)
    if present.size == 1:
        lengths[present[0]] = 1
        return lengths
    # Two-queue merge: leaves sorted once, merged weights emerge sorted.
    order = present[np.argsort(counts[present], kind="stable")]
    leaf_weights = counts[order].tolist()
    k = len(leaf_weights)
    parent = [0] * (2 * k - 1)
    merged = []  # weights of internal nodes, ids k..2k-2
    li = mi = 0
    next_id = k

    def pop_min():
        nonlocal li, mi
        if li < k and (mi >= len(merged) or leaf_weights[li] <= merged[mi]):
            li += 1
            return li - 1, leaf_weights[li - 1]
        mi += 1
        return k + mi - 1, merged[mi - 1]

    while (k - li) + (len(merged) - mi) > 1:
        a, wa = pop_min()
        b, wb = pop_min()
        parent[a] = next_id
        parent[b] = next_id
        merged.append(wa + wb)
        next_id += 1
    root = next_id - 1
    depth = [0] * (2 * k - 1)
    for node in range(root - 1, -1, -1):
        depth[node] = depth[parent[node]] + 1
    lengths[order] = depth[:k]
    return lengths


def _check_kraft(lengths):
    present = np.flatnonzero(lengths > 0)
    if present.size == 0:
        raise ValueError("no coded symbols")
    if present.size == 1:
        if lengths[present[0]] != 1:
            raise ValueError("a lone symbol must have code length 1")
        return present, 1
    ell_max = int(lengths[present].max())
    total = sum(1 << (ell_max - int(lengths[a])) for a in present)
    if total != (1 << ell_max):
        raise ValueError("code lengths violate the Kraft equality")
    return present, ell_max


def _ncodes_by_length(lengths, present):
    ncodes = {}
    for a in present:
        ell = int(lengths[a])
        ncodes[ell] = ncodes.get(ell, 0) + 1
    return ncodes


@dataclass(eq=False)
class CodeTable:
    """Per-symbol variable-length codes plus layout metadata.

    ``codes[a]`` is the code value of symbol ``a`` (top ``lengths[a]``
    bits, most-significant-first); ``lengths[a] == 0`` means the symbol
    has no code. ``fst``/``last`` are populated for canonical tables
    only.
    """

    kind: str
    sigma: int
    lengths: np.ndarray
    codes: np.ndarray
    ell_min: int
    ell_max: int
    ncodes: dict = field(default_factory=dict)
    fst: dict = field(default_factory=dict)
    last: dict = field(default_factory=dict)

    def __post_init__(self):
        self._terminals = None

    def encode(self, a):
        """(code value, length) of symbol ``a``; raises for uncoded symbols."""
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")
        ell = int(self.lengths[a])
        if ell == 0:
            raise KeyError(f"symbol {a} has no code")
        return int(self.codes[a]), ell

    def length(self, a):
        if not 0 <= a < self.sigma:
            raise ValueError(f"symbol {a} out of range [0, {self.sigma})")
        return int(self.lengths[a])

    @property
    def terminals(self):
        """Map (length, code value) -> symbol, for decoding traversals."""
        if self._terminals is None:
            self._terminals = {
                (int(l), int(c)): int(a)
                for a, (l, c) in enumerate(zip(self.lengths, self.codes))
                if l > 0
            }
        return self._terminals

    def is_prefix_free(self):
        items = [
            (int(l), int(c)) for l, c in zip(self.lengths, self.codes) if l > 0
        ]
        for i, (l1, c1) in enumerate(items):
            for l2, c2 in items[i + 1 :]:
                lo = min(l1, l2)
                if (c1 >> (l1 - lo)) == (c2 >> (l2 - lo)):
                    return False
        return True

    def total_bits(self, counts):
        counts = np.asarray(counts, dtype=np.int64)
        return int((counts * self.lengths).sum())

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_CODETABLE)
        w.u16(serial.VERSION)
        w.u8(_KIND_CODES[self.kind])
        w.u64(self.sigma)
        for a in range(self.sigma):
            w.u8(int(self.lengths[a]))
            w.u64(int(self.codes[a]))
        return w.getvalue()

    @classmethod
    def from_bytes(cls, buf):
        r = serial.Reader(buf)
        r.expect_magic(serial.MAGIC_CODETABLE)
        r.expect_version()
        kind = _KIND_NAMES[r.u8()]
        sigma = r.u64()
        lengths = np.zeros(sigma, dtype=np.int64)
        codes = np.zeros(sigma, dtype=np.uint64)
        for a in range(sigma):
            lengths[a] = r.u8()
            codes[a] = r.u64()
        return cls._assemble(kind, sigma, lengths, codes)

    @classmethod
    def _assemble(cls, kind, sigma, lengths, codes):
        present = np.flatnonzero(lengths > 0)
        if present.size:
            ell_min = int(lengths[present].min())
            ell_max = int(lengths[present].max())
            ncodes = _ncodes_by_length(lengths, present)
        else:
            ell_min = ell_max = 0
            ncodes = {}
        table = cls(
            kind=kind,
            sigma=int(sigma),
            lengths=lengths,
            codes=codes,
            ell_min=ell_min,
            ell_max=ell_max,
            ncodes=ncodes,
        )
        if kind == KIND_CANONICAL:
            for a in present:
                ell = int(lengths[a])
                c = int(codes[a])
                table.fst[ell] = min(table.fst.get(ell, c), c)
                table.last[ell] = max(table.last.get(ell, c), c)
        return table


def assign_canonical_codes(lengths):
    """Canonical assignment: codes of one length are consecutive values.

    The first code of the shortest length is 0; the first code of the
    next populated length ell' after ell is (last[ell]+1) << (ell'-ell).
    Within a length, codes go to symbols in increasing symbol order.
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    present, ell_max = _check_kraft(lengths)
    codes = np.zeros(lengths.size, dtype=np.uint64)
    ncodes = _ncodes_by_length(lengths, present)
    ell_min = int(lengths[present].min())
    by_len = {ell: [] for ell in ncodes}
    for a in present:
        by_len[int(lengths[a])].append(int(a))
    fst, last = {}, {}
    c = 0
    for ell in range(ell_min, ell_max + 1):
        k = ncodes.get(ell, 0)
        if k:
            fst[ell] = c
            last[ell] = c + k - 1
            for a, val in zip(by_len[ell], range(c, c + k)):
                codes[a] = val
        c = (c + k) << 1
    table = CodeTable(
        kind=KIND_CANONICAL,
        sigma=int(lengths.size),
        lengths=lengths.copy(),
        codes=codes,
        ell_min=ell_min,
        ell_max=ell_max,
        ncodes=ncodes,
        fst=fst,
        last=last,
    )
    return table


def assign_matrix_codes(lengths):
    """Shuffle-compatible optimal assignment.

    Grows a candidate set levelwise, starting from {0, 1}. At depth ell
    the ncodes[ell] candidates whose bit-reversed value is largest are
    assigned (in increasing reversed-value order) to the length-ell
    symbols in increasing symbol order; every surviving candidate c is
    replaced by c:0 and c:1. Under the zeros-left shuffle this puts the
    occurrences of terminating codes in one run at the right end of
    every depth, so deeper bitmaps are plain prefixes of the shuffled
    order. Total work is linear in the number of coded symbols.
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    present, ell_max = _check_kraft(lengths)
    codes = np.zeros(lengths.size, dtype=np.uint64)
    ncodes = _ncodes_by_length(lengths, present)
    ell_min = int(lengths[present].min())
    if present.size == 1:
        # A lone coded symbol takes code "0" by convention.
        codes[present[0]] = 0
        return CodeTable(
            kind=KIND_WM,
            sigma=int(lengths.size),
            lengths=lengths.copy(),
            codes=codes,
            ell_min=1,
            ell_max=1,
            ncodes={1: 1},
        )
    by_len = {ell: [] for ell in ncodes}
    for a in present:
        by_len[int(lengths[a])].append(int(a))
    # Candidates kept sorted by reversed value: appending a 0 preserves
    # the reversed value, appending a 1 adds the new top bit, so the
    # doubled list [c:0...][c:1...] is again sorted.
    cands = [0, 1]
    for ell in range(1, ell_max + 1):
        k = ncodes.get(ell, 0)
        if k:
            take = cands[-k:]
            cands = cands[:-k]
            for a, c in zip(by_len[ell], take):
                codes[a] = c
        if ell < ell_max:
            cands = [c << 1 for c in cands] + [(c << 1) | 1 for c in cands]
    assert not cands
    return CodeTable(
        kind=KIND_WM,
        sigma=int(lengths.size),
        lengths=lengths.copy(),
        codes=codes,
        ell_min=ell_min,
        ell_max=ell_max,
        ncodes=ncodes,
    )


def fixed_length_codes(sigma):
    """Fixed-width table: symbol a gets its own value in ceil(lg sigma) bits."""
    if sigma < 1:
        raise ValueError("sigma must be at least 1")
    depth = max(1, (sigma - 1).bit_length())
    lengths = np.full(sigma, depth, dtype=np.int64)
    codes = np.arange(sigma, dtype=np.uint64)
    return CodeTable(
        kind=KIND_FIXED,
        sigma=int(sigma),
        lengths=lengths,
        codes=codes,
        ell_min=depth,
        ell_max=depth,
        ncodes={depth: int(sigma)},
    )


def entropy_and_cost(stats, lengths):
    """(zero-order entropy in bits/symbol, total coded bits).

    Uses the convention 0*lg(...) = 0 for absent symbols. For any
    optimal length assignment, total bits < n * (H0 + 1).
    """
    counts = np.asarray(stats.counts, dtype=np.float64)
    n = float(stats.n)
    h0 = 0.0
    if n > 0:
        pos = counts[counts > 0]
        h0 = float((pos / n * np.log2(n / pos)).sum())
    total = int((np.asarray(stats.counts, dtype=np.int64) * np.asarray(lengths)).sum())
    return h0, total
