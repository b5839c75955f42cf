"""Point grids with rectangle counting and reporting.

Arbitrary 2-D integer point sets are mapped onto the one-point-per-column
form: points are stably sorted by x, column i holds the i-th point, and
the y values become a symbol sequence indexed by a wavelet matrix.
Rectangle queries translate real-valued x bounds onto columns by binary
search over the sorted x keys and clamp y bounds onto the symbol range.

The first level's bitmap defaults to the compressed representation: when
the y range is far from a power of two the top bit is heavily skewed and
compresses well, while range searches touch that level only a few times.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right

import numpy as np

from .wavelet_matrix import WaveletMatrix, _depth_for


class Grid:
    """One-point-per-column grid over non-negative integer coordinates."""

    def __init__(self, points, *, bitmap="plain", first_level_bitmap="rrr", sample_rate=32):
        pts = list(points)
        m = len(pts)
        if m:
            xs = np.asarray([p[0] for p in pts])
            ys = np.asarray([p[1] for p in pts], dtype=np.int64)
            if ys.min() < 0:
                raise ValueError("y coordinates must be non-negative")
            order = np.argsort(xs, kind="stable")
            self.x_keys = xs[order]
            self.y_seq = ys[order]
            self.y_max = int(ys.max())
        else:
            self.x_keys = np.asarray([])
            self.y_seq = np.asarray([], dtype=np.int64)
            self.y_max = 0
        self.m = m
        sigma = self.y_max + 1
        depth = _depth_for(sigma)
        modes = [first_level_bitmap] + [bitmap] * (depth - 1)
        self.index = WaveletMatrix(
            self.y_seq, sigma, variant="strict", sample_rate=sample_rate,
            level_bitmaps=modes,
        )

    def _columns(self, x_lo, x_hi):
        """Leftmost column with x >= x_lo, rightmost with x <= x_hi (1-based)."""
        keys = self.x_keys
        c1 = bisect_left(keys, x_lo) + 1
        c2 = bisect_right(keys, x_hi)
        return c1, c2

    @staticmethod
    def _y_bounds(y_lo, y_hi):
        return math.ceil(y_lo), math.floor(y_hi)

    def count(self, x_lo, x_hi, y_lo, y_hi):
        if self.m == 0 or x_lo > x_hi or y_lo > y_hi:
            return 0
        c1, c2 = self._columns(x_lo, x_hi)
        if c1 > c2:
            return 0
        y1, y2 = self._y_bounds(y_lo, y_hi)
        return self.index.count(c1, c2, y1, y2)

    def report(self, x_lo, x_hi, y_lo, y_hi):
        if self.m == 0 or x_lo > x_hi or y_lo > y_hi:
            return []
        c1, c2 = self._columns(x_lo, x_hi)
        if c1 > c2:
            return []
        y1, y2 = self._y_bounds(y_lo, y_hi)
        return self.index.report(c1, c2, y1, y2)

    @property
    def size_bits(self):
        return self.index.size_bits


def points_from_mbrs(mbrs):
    """Expand (x1, y1, x2, y2) rectangles into their two opposite corners."""
    pts = []
    for x1, y1, x2, y2 in mbrs:
        pts.append((x1, y1))
        pts.append((x2, y2))
    return pts
