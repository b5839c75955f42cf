"""Immutable bitvectors with rank and select.

Two representations share one query interface:

* ``PlainBitVector`` packs the bits into 64-bit words and keeps absolute
  rank samples every ``sample_rate`` words plus sparse select hints, so
  the index overhead stays within a few percent of the payload.
* ``RrrBitVector`` splits the bits into 15-bit blocks, storing for each
  block its popcount class (4 bits) and the lexicographic offset of the
  block within its class (variable width), with absolute samples every
  ``sample_rate`` blocks. Sparse or skewed bitmaps compress well below
  one bit per bit.

Positions are 1-based. ``rank(b, i)`` counts occurrences of bit ``b`` in
positions ``1..i`` (``i = 0`` is the legal empty prefix) and
``select(b, j)`` returns the position of the j-th occurrence of ``b``.
Both representations answer identically on the same bit content.

Instances are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math

import numpy as np

from . import serial
from .errors import NotEnoughOccurrences

_M64 = (1 << 64) - 1

# Number of 1-occurrences (or 0-occurrences) between select hints, as a
# multiple of the bits covered by one rank sample. Keeps hint space at
# half the rank-sample space in the worst case.
_HINT_SAMPLE_FACTOR = 2

_RRR_BLOCK = 15


def _normalize_bits(bits):
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bits must contain only 0 and 1")
    return arr


def _select_in_word(word, k):
    """0-based position of the k-th (1-based) set bit of a 64-bit word."""
    pos = 0
    for shift in (32, 16, 8, 4, 2, 1):
        low = word & ((1 << shift) - 1)
        c = low.bit_count()
        if k > c:
            k -= c
            word >>= shift
            pos += shift
    return pos


class _BitVectorBase:
    """Query interface shared by the plain and compressed representations."""

    mode = ""

    def __len__(self):
        return self._n

    @property
    def n(self):
        return self._n

    @property
    def ones(self):
        return self._ones

    @property
    def zeros(self):
        return self._n - self._ones

    @property
    def sample_rate(self):
        return self._sample_rate

    @property
    def payload_bits(self):
        """Logical bit count, the baseline for overhead accounting."""
        return self._n

    @property
    def size_bits(self):
        return 8 * len(self.to_bytes())

    def access(self, i):
        if not 1 <= i <= self._n:
            raise IndexError(f"position {i} out of range [1, {self._n}]")
        return self._access(i)

    def rank(self, bit, i):
        if not 0 <= i <= self._n:
            raise IndexError(f"prefix length {i} out of range [0, {self._n}]")
        r1 = self._rank1(i)
        return r1 if bit else i - r1

    def rank1(self, i):
        if not 0 <= i <= self._n:
            raise IndexError(f"prefix length {i} out of range [0, {self._n}]")
        return self._rank1(i)

    def rank0(self, i):
        if not 0 <= i <= self._n:
            raise IndexError(f"prefix length {i} out of range [0, {self._n}]")
        return i - self._rank1(i)

    def select(self, bit, j):
        return self.select1(j) if bit else self.select0(j)

    def select1(self, j):
        if j < 1 or j > self._ones:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested 1-bit #{j}, have {self._ones}"
            )
        return self._select1(j)

    def select0(self, j):
        nz = self._n - self._ones
        if j < 1 or j > nz:
            raise NotEnoughOccurrences(
                f"not enough occurrences: requested 0-bit #{j}, have {nz}"
            )
        return self._select0(j)


class PlainBitVector(_BitVectorBase):
    mode = "plain"

    def __init__(self, bits, sample_rate=32):
        if sample_rate < 1:
            raise ValueError("sample_rate must be positive")
        bits = _normalize_bits(bits)
        n = bits.size
        nwords = (n + 63) // 64
        padded = np.zeros(nwords * 8, dtype=np.uint8)
        packed = np.packbits(bits, bitorder="little")
        padded[: packed.size] = packed
        words = padded.view("<u8").astype(np.uint64)
        self._init_from_parts(n, sample_rate, words, None, None, None)
        self._build_index()

    def _init_from_parts(self, n, sample_rate, words, samples, hints1, hints0):
        self._n = n
        self._sample_rate = sample_rate
        self._words = words
        self._samples = samples
        self._hints1 = hints1
        self._hints0 = hints0

    def _build_index(self, samples=None, hints1=None, hints0=None):
        srw = self._sample_rate
        words = self._words
        nwords = words.size
        if samples is None:
            counts = np.bitwise_count(words).astype(np.uint64)
            cum = np.concatenate(([0], np.cumsum(counts, dtype=np.uint64)))
            samples = cum[::srw].copy()
        self._samples = samples
        self._ones = int(np.bitwise_count(words).sum(dtype=np.uint64)) if nwords else 0
        # zero-samples are derived, never serialized
        self._zsamples = (
            np.arange(samples.size, dtype=np.uint64) * np.uint64(srw * 64) - samples
        )
        gap = self._hint_gap()
        if hints1 is None:
            targets1 = np.arange(1, self._ones + 1, gap, dtype=np.uint64)
            hints1 = (np.searchsorted(samples, targets1, side="left") - 1).astype(
                np.uint64
            )
            targets0 = np.arange(1, (self._n - self._ones) + 1, gap, dtype=np.uint64)
            hints0 = (np.searchsorted(self._zsamples, targets0, side="left") - 1).astype(
                np.uint64
            )
        self._hints1 = hints1
        self._hints0 = hints0

    def _hint_gap(self):
        return self._sample_rate * 64 * _HINT_SAMPLE_FACTOR

    @property
    def index_bits(self):
        """Bits spent on rank samples, select hints, and word padding.

        Excludes the fixed serialization envelope; this is the overhead
        that scales with the bitmap.
        """
        return (
            self._words.size * 64
            - self._n
            + 64 * (self._samples.size - 1)
            + 64 * (self._hints1.size + self._hints0.size)
        )

    def _access(self, i):
        w, r = divmod(i - 1, 64)
        return (int(self._words[w]) >> r) & 1

    def _rank1(self, i):
        if i == 0:
            return 0
        w, rem = divmod(i, 64)
        srw = self._sample_rate
        sb = w // srw
        r = int(self._samples[sb])
        lo = sb * srw
        if lo < w:
            r += int(np.bitwise_count(self._words[lo:w]).sum())
        if rem:
            r += (int(self._words[w]) & ((1 << rem) - 1)).bit_count()
        return r

    def _superblock_for(self, samples, hints, j):
        gap = self._hint_gap()
        k = (j - 1) // gap
        lo = int(hints[k])
        hi = int(hints[k + 1]) if k + 1 < hints.size else samples.size - 1
        idx = int(np.searchsorted(samples[lo : hi + 1], j, side="left"))
        return lo + idx - 1

    def _select1(self, j):
        s = self._superblock_for(self._samples, self._hints1, j)
        acc = j - int(self._samples[s])
        w = s * self._sample_rate
        words = self._words
        c = int(words[w]).bit_count()
        while acc > c:
            acc -= c
            w += 1
            c = int(words[w]).bit_count()
        return w * 64 + _select_in_word(int(words[w]), acc) + 1

    def _select0(self, j):
        s = self._superblock_for(self._zsamples, self._hints0, j)
        acc = j - int(self._zsamples[s])
        w = s * self._sample_rate
        words = self._words
        c = 64 - int(words[w]).bit_count()
        while acc > c:
            acc -= c
            w += 1
            c = 64 - int(words[w]).bit_count()
        return w * 64 + _select_in_word(~int(words[w]) & _M64, acc) + 1

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_BITVECTOR)
        w.u16(serial.VERSION)
        w.u8(0)
        w.u32(self._sample_rate)
        w.u64(self._n)
        w.raw_words(self._words)
        w.u64_array(self._samples[1:])  # samples[0] is always 0
        w.u64_array(self._hints1)
        w.u64_array(self._hints0)
        return w.getvalue()

    @classmethod
    def _from_reader(cls, r, sample_rate, n):
        nwords = (n + 63) // 64
        words = r.raw_words(nwords)
        samples = np.concatenate(([0], r.u64_array())).astype(np.uint64)
        hints1 = r.u64_array()
        hints0 = r.u64_array()
        bv = cls.__new__(cls)
        bv._init_from_parts(n, sample_rate, words, None, None, None)
        bv._build_index(samples, hints1, hints0)
        return bv


class _RrrTables:
    """Shared class/offset lookup tables for 15-bit blocks, built lazily."""

    value_of = None  # per class: array of block values in increasing order
    off_of = None  # block value -> offset within its class
    width = None  # per class: ceil(lg C(15, class)) bits

    @classmethod
    def ensure(cls):
        if cls.value_of is not None:
            return
        vals = np.arange(1 << _RRR_BLOCK, dtype=np.uint16)
        classes = np.bitwise_count(vals)
        value_of = []
        off_of = np.zeros(1 << _RRR_BLOCK, dtype=np.uint16)
        width = np.zeros(_RRR_BLOCK + 1, dtype=np.uint8)
        for c in range(_RRR_BLOCK + 1):
            members = vals[classes == c]
            value_of.append(members)
            off_of[members] = np.arange(members.size, dtype=np.uint16)
            assert members.size == math.comb(_RRR_BLOCK, c)
            width[c] = (members.size - 1).bit_length()
        cls.value_of = value_of
        cls.off_of = off_of
        cls.width = width


class RrrBitVector(_BitVectorBase):
    mode = "rrr"

    def __init__(self, bits, sample_rate=32):
        if sample_rate < 1:
            raise ValueError("sample_rate must be positive")
        _RrrTables.ensure()
        bits = _normalize_bits(bits)
        n = bits.size
        nblocks = (n + _RRR_BLOCK - 1) // _RRR_BLOCK
        padded = np.zeros(nblocks * _RRR_BLOCK, dtype=np.uint8)
        padded[:n] = bits
        mat = padded.reshape(nblocks, _RRR_BLOCK)
        shifts = (1 << np.arange(_RRR_BLOCK, dtype=np.uint32)).astype(np.uint32)
        vals = (mat.astype(np.uint32) * shifts).sum(axis=1).astype(np.uint16)
        classes = np.bitwise_count(vals).astype(np.uint8)
        offs = _RrrTables.off_of[vals]
        widths = _RrrTables.width[classes]
        off_words = self._pack_offsets(offs, widths)
        srb = sample_rate
        ccum = np.concatenate(([0], np.cumsum(classes, dtype=np.uint64)))
        wcum = np.concatenate(([0], np.cumsum(widths, dtype=np.uint64)))
        super_rank = ccum[::srb].copy()
        super_ptr = wcum[::srb].copy()
        self._init_from_parts(
            n, sample_rate, classes, off_words, super_rank, super_ptr
        )

    @staticmethod
    def _pack_offsets(offs, widths):
        acc = 0
        accbits = 0
        out = []
        for off, wid in zip(offs.tolist(), widths.tolist()):
            if wid:
                acc |= off << accbits
                accbits += wid
                if accbits >= 64:
                    out.append(acc & _M64)
                    acc >>= 64
                    accbits -= 64
        if accbits:
            out.append(acc)
        return np.array(out, dtype=np.uint64)

    def _init_from_parts(self, n, sample_rate, classes, off_words, super_rank, super_ptr):
        _RrrTables.ensure()
        self._n = n
        self._sample_rate = sample_rate
        self._classes = classes
        self._off_words = off_words
        self._super_rank = super_rank
        self._super_ptr = super_ptr
        # Padding bits are zero, so class sums count only real ones.
        self._ones = int(classes.sum(dtype=np.uint64))
        self._block_widths = _RrrTables.width[classes]
        self._zsuper = (
            np.arange(super_rank.size, dtype=np.uint64)
            * np.uint64(sample_rate * _RRR_BLOCK)
            - super_rank
        )

    @property
    def index_bits(self):
        """Bits spent on the absolute rank and offset-pointer samples."""
        return 64 * (self._super_rank.size + self._super_ptr.size)

    def _read_offset(self, ptr, wid):
        if wid == 0:
            return 0
        w0, sh = divmod(ptr, 64)
        val = int(self._off_words[w0]) >> sh
        if sh + wid > 64:
            val |= int(self._off_words[w0 + 1]) << (64 - sh)
        return val & ((1 << wid) - 1)

    def _block_value(self, k, base_super):
        """Decode block k; base_super is the superblock containing k."""
        ptr = int(self._super_ptr[base_super])
        lo = base_super * self._sample_rate
        if lo < k:
            ptr += int(self._block_widths[lo:k].sum())
        c = int(self._classes[k])
        off = self._read_offset(ptr, int(_RrrTables.width[c]))
        return int(_RrrTables.value_of[c][off])

    def _access(self, i):
        k, r = divmod(i - 1, _RRR_BLOCK)
        return (self._block_value(k, k // self._sample_rate) >> r) & 1

    def _rank1(self, i):
        if i == 0:
            return 0
        k, rem = divmod(i, _RRR_BLOCK)
        s = k // self._sample_rate
        r = int(self._super_rank[s])
        lo = s * self._sample_rate
        if lo < k:
            r += int(self._classes[lo:k].sum())
        if rem:
            val = self._block_value(k, s)
            r += (val & ((1 << rem) - 1)).bit_count()
        return r

    def _select1(self, j):
        s = int(np.searchsorted(self._super_rank, j, side="left")) - 1
        acc = j - int(self._super_rank[s])
        k = s * self._sample_rate
        classes = self._classes
        c = int(classes[k])
        while acc > c:
            acc -= c
            k += 1
            c = int(classes[k])
        val = self._block_value(k, k // self._sample_rate)
        return k * _RRR_BLOCK + _select_in_word(val, acc) + 1

    def _select0(self, j):
        zs = self._zsuper
        lo, hi = 0, zs.size - 1
        while lo < hi:  # greatest s with zs[s] < j
            mid = (lo + hi + 1) // 2
            if int(zs[mid]) < j:
                lo = mid
            else:
                hi = mid - 1
        s = lo
        acc = j - int(zs[s])
        k = s * self._sample_rate
        classes = self._classes
        c = _RRR_BLOCK - int(classes[k])
        while acc > c:
            acc -= c
            k += 1
            c = _RRR_BLOCK - int(classes[k])
        val = self._block_value(k, k // self._sample_rate)
        comp = ~val & ((1 << _RRR_BLOCK) - 1)
        return k * _RRR_BLOCK + _select_in_word(comp, acc) + 1

    def to_bytes(self):
        w = serial.Writer()
        w.bytes(serial.MAGIC_BITVECTOR)
        w.u16(serial.VERSION)
        w.u8(1)
        w.u32(self._sample_rate)
        w.u64(self._n)
        w.raw_words(self._packed_classes())
        w.u64_array(self._off_words)
        w.u64_array(self._super_rank)
        w.u64_array(self._super_ptr)
        return w.getvalue()

    def _packed_classes(self):
        classes = self._classes
        nb = classes.size
        padded = np.zeros(((nb + 15) // 16) * 16, dtype=np.uint64)
        padded[:nb] = classes
        mat = padded.reshape(-1, 16)
        shifts = (np.arange(16, dtype=np.uint64) * 4).astype(np.uint64)
        return np.bitwise_or.reduce(mat << shifts, axis=1)

    @classmethod
    def _from_reader(cls, r, sample_rate, n):
        nblocks = (n + _RRR_BLOCK - 1) // _RRR_BLOCK
        cls_words = r.raw_words((nblocks + 15) // 16)
        off_words = r.u64_array()
        super_rank = r.u64_array()
        super_ptr = r.u64_array()
        rep = np.repeat(cls_words, 16)
        shifts = np.tile(np.arange(16, dtype=np.uint64) * 4, cls_words.size)
        classes = ((rep >> shifts) & np.uint64(15)).astype(np.uint8)[:nblocks]
        bv = cls.__new__(cls)
        bv._init_from_parts(n, sample_rate, classes, off_words, super_rank, super_ptr)
        return bv


def bitvector(bits, mode="plain", sample_rate=32):
    """Build a rank/select bitvector in the requested representation."""
    if mode == "plain":
        return PlainBitVector(bits, sample_rate)
    if mode == "rrr":
        return RrrBitVector(bits, sample_rate)
    raise ValueError(f"unknown bitvector mode {mode!r}")


def bitvector_from_bytes(buf):
    r = serial.Reader(buf)
    r.expect_magic(serial.MAGIC_BITVECTOR)
    r.expect_version()
    mode = r.u8()
    sample_rate = r.u32()
    n = r.u64()
    if mode == 0:
        return PlainBitVector._from_reader(r, sample_rate, n)
    if mode == 1:
        return RrrBitVector._from_reader(r, sample_rate, n)
    raise serial.DataFormatError(f"unknown bitvector mode byte {mode}")
