"""Binary serialization helpers and the index file registry.

All on-disk formats are little-endian. Every structure starts with a
4-byte magic, a u16 format version, and structure-specific fields.
Variable-length arrays are written as a u64 element count followed by
the raw elements.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DataFormatError

VERSION = 1

MAGIC_BITVECTOR = b"WVXB"
MAGIC_CODETABLE = b"WVXC"
MAGIC_WM = b"WVXM"
MAGIC_HWM = b"WVXH"
MAGIC_WTP = b"WVXT"
MAGIC_WTNP = b"WVXL"
MAGIC_HWTNP = b"WVXK"


class Writer:
    def __init__(self):
        self._parts = []

    def bytes(self, b):
        self._parts.append(bytes(b))
        return self

    def u8(self, x):
        self._parts.append(struct.pack("<B", x))
        return self

    def u16(self, x):
        self._parts.append(struct.pack("<H", x))
        return self

    def u32(self, x):
        self._parts.append(struct.pack("<I", x))
        return self

    def u64(self, x):
        self._parts.append(struct.pack("<Q", x))
        return self

    def u64_array(self, arr):
        """u64 count followed by the elements as u64."""
        a = np.ascontiguousarray(np.asarray(arr, dtype=np.uint64))
        self.u64(a.size)
        self._parts.append(a.astype("<u8").tobytes())
        return self

    def raw_words(self, arr):
        """u64 words with no count prefix (count known from context)."""
        a = np.ascontiguousarray(np.asarray(arr, dtype=np.uint64))
        self._parts.append(a.astype("<u8").tobytes())
        return self

    def blob(self, b):
        """u64 byte length followed by the raw bytes."""
        b = bytes(b)
        self.u64(len(b))
        self._parts.append(b)
        return self

    def getvalue(self):
        return b"".join(self._parts)


class Reader:
    def __init__(self, buf):
        self._buf = buf
        self._pos = 0

    def bytes(self, n):
        if self._pos + n > len(self._buf):
            raise DataFormatError("truncated input")
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out

    def u8(self):
        return struct.unpack("<B", self.bytes(1))[0]

    def u16(self):
        return struct.unpack("<H", self.bytes(2))[0]

    def u32(self):
        return struct.unpack("<I", self.bytes(4))[0]

    def u64(self):
        return struct.unpack("<Q", self.bytes(8))[0]

    def u64_array(self):
        count = self.u64()
        raw = self.bytes(8 * count)
        return np.frombuffer(raw, dtype="<u8").astype(np.uint64)

    def raw_words(self, count):
        raw = self.bytes(8 * count)
        return np.frombuffer(raw, dtype="<u8").astype(np.uint64)

    def blob(self):
        n = self.u64()
        return self.bytes(n)

    def expect_magic(self, magic):
        got = self.bytes(4)
        if got != magic:
            raise DataFormatError(f"bad magic {got!r}, expected {magic!r}")

    def expect_version(self):
        v = self.u16()
        if v != VERSION:
            raise DataFormatError(f"unsupported format version {v}")
        return v

    def at_end(self):
        return self._pos == len(self._buf)


def load_bytes(buf):
    """Reconstruct an index object from its serialized bytes."""
    if len(buf) < 4:
        raise DataFormatError("input too short for a magic header")
    magic = bytes(buf[:4])
    # Imports are deferred to avoid import cycles.
    if magic == MAGIC_BITVECTOR:
        from .bitvector import bitvector_from_bytes

        return bitvector_from_bytes(buf)
    if magic == MAGIC_CODETABLE:
        from .huffman import CodeTable

        return CodeTable.from_bytes(buf)
    if magic == MAGIC_WM:
        from .wavelet_matrix import WaveletMatrix

        return WaveletMatrix.from_bytes(buf)
    if magic == MAGIC_HWM:
        from .wavelet_matrix import HuffmanWaveletMatrix

        return HuffmanWaveletMatrix.from_bytes(buf)
    if magic == MAGIC_WTP:
        from .wavelet_tree import PointerWaveletTree

        return PointerWaveletTree.from_bytes(buf)
    if magic == MAGIC_WTNP:
        from .wavelet_tree import PointerlessWaveletTree

        return PointerlessWaveletTree.from_bytes(buf)
    if magic == MAGIC_HWTNP:
        from .wavelet_tree import HuffmanPointerlessTree

        return HuffmanPointerlessTree.from_bytes(buf)
    raise DataFormatError(f"unknown magic {magic!r}")


def save(obj, path):
    with open(path, "wb") as fh:
        fh.write(obj.to_bytes())


def load(path):
    with open(path, "rb") as fh:
        return load_bytes(fh.read())
