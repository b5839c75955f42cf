"""wvx: succinct sequence indexes over integer alphabets.

Rank/select bitvectors (plain and compressed), wavelet trees (pointer
based, levelwise, canonical-code shaped), wavelet matrices (balanced and
entropy-shaped), and point grids with rectangle count/report. All
structures answer identically; they trade space and per-query bitmap
operations against each other.
"""

from .bitvector import PlainBitVector, RrrBitVector, bitvector, bitvector_from_bytes
from .errors import DataFormatError, NotEnoughOccurrences
from .grid import Grid, points_from_mbrs
from .huffman import (
    CodeTable,
    SymbolStats,
    assign_canonical_codes,
    assign_matrix_codes,
    entropy_and_cost,
    fixed_length_codes,
    huffman_code_lengths,
    reverse_bits,
)
from .serial import load, load_bytes, save
from .wavelet_matrix import HuffmanWaveletMatrix, WaveletMatrix
from .wavelet_tree import (
    HuffmanPointerlessTree,
    PointerlessWaveletTree,
    PointerWaveletTree,
    tree_paths,
)

__version__ = "0.1.0"

__all__ = [
    "BitVector",
    "CodeTable",
    "DataFormatError",
    "Grid",
    "HuffmanPointerlessTree",
    "HuffmanWaveletMatrix",
    "NotEnoughOccurrences",
    "PlainBitVector",
    "PointerWaveletTree",
    "PointerlessWaveletTree",
    "RrrBitVector",
    "SymbolStats",
    "WaveletMatrix",
    "assign_canonical_codes",
    "assign_matrix_codes",
    "bitvector",
    "bitvector_from_bytes",
    "entropy_and_cost",
    "fixed_length_codes",
    "huffman_code_lengths",
    "load",
    "load_bytes",
    "points_from_mbrs",
    "reverse_bits",
    "save",
    "tree_paths",
]
