"""Fundamental image/feature types and subpixel grid sampling.

Coordinate convention: (u, v) addresses the center of pixel column u, row v.
The valid sampling domain of a width x height grid is [0, w-1] x [0, h-1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MIN_IMAGE_DIM = 8


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Image:
    """8-bit grayscale frame with a timestamp in seconds.

    `data` is a (height, width) uint8 array, row-major. Instances are
    immutable; the pixel buffer is marked read-only on construction.
    """

    data: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError("image data must be a 2-D array, got shape %r" % (data.shape,))
        if data.dtype != np.uint8:
            raise ValueError("image data must be uint8, got %s" % data.dtype)
        h, w = data.shape
        if w < MIN_IMAGE_DIM or h < MIN_IMAGE_DIM:
            raise ValueError(
                "image must be at least %dx%d, got %dx%d" % (MIN_IMAGE_DIM, MIN_IMAGE_DIM, w, h)
            )
        object.__setattr__(self, "data", _freeze(data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def as_float(self) -> np.ndarray:
        return self.data.astype(np.float64)


@dataclass(frozen=True)
class Feature:
    """A tracked sparse point: unique id, subpixel (u, v) position, and the
    number of consecutive frames it has been observed."""

    id: int
    position: tuple[float, float]
    track_count: int = 1

    def __post_init__(self):
        if self.track_count < 1:
            raise ValueError("track_count must be >= 1, got %d" % self.track_count)


class FeatureSet:
    """Ordered collection of features, stored as parallel arrays.

    All ids are distinct; operations that filter preserve relative order.
    """

    def __init__(self, ids=(), positions=(), track_counts=()):
        self.ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        self.positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        self.track_counts = np.asarray(track_counts, dtype=np.int64).reshape(-1)
        n = len(self.ids)
        if len(self.positions) != n or len(self.track_counts) != n:
            raise ValueError("ids, positions and track_counts must have equal length")
        if len(np.unique(self.ids)) != n:
            raise ValueError("feature ids must be distinct")

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, i: int) -> Feature:
        return Feature(
            id=int(self.ids[i]),
            position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
            track_count=int(self.track_counts[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def filter(self, mask) -> "FeatureSet":
        """Keep features where mask is true, preserving relative order."""
        mask = np.asarray(mask, dtype=bool)
        return FeatureSet(self.ids[mask], self.positions[mask], self.track_counts[mask])

    @classmethod
    def from_features(cls, features) -> "FeatureSet":
        features = list(features)
        return cls(
            ids=[f.id for f in features],
            positions=[f.position for f in features],
            track_counts=[f.track_count for f in features],
        )


def bilinear_sample(grid: np.ndarray, p) -> float:
    """Bilinear interpolation of a 2-D real-valued grid at subpixel point p.

    p = (u, v) with 0 <= u <= width-1 and 0 <= v <= height-1; exact grid
    points return the stored value. Raises DomainError outside the domain.
    """
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    u, v = float(p[0]), float(p[1])
    if not (0.0 <= u <= w - 1 and 0.0 <= v <= h - 1):
        raise DomainError(
            "point (%g, %g) outside sampling domain [0, %d] x [0, %d]" % (u, v, w - 1, h - 1)
        )
    if w == 1:
        x0, x1, fx = 0, 0, 0.0
    else:
        x0 = min(int(np.floor(u)), w - 2)
        x1 = x0 + 1
        fx = u - x0
    if h == 1:
        y0, y1, fy = 0, 0, 0.0
    else:
        y0 = min(int(np.floor(v)), h - 2)
        y1 = y0 + 1
        fy = v - y0
    top = (1.0 - fx) * grid[y0, x0] + fx * grid[y0, x1]
    bot = (1.0 - fx) * grid[y1, x0] + fx * grid[y1, x1]
    return float((1.0 - fy) * top + fy * bot)


def bilinear_sample_many(grid: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorized bilinear_sample over an (N, 2) array of (u, v) points."""
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    u = pts[:, 0]
    v = pts[:, 1]
    if np.any(u < 0) or np.any(u > w - 1) or np.any(v < 0) or np.any(v > h - 1):
        bad = np.flatnonzero((u < 0) | (u > w - 1) | (v < 0) | (v > h - 1))[0]
        raise DomainError(
            "point (%g, %g) outside sampling domain [0, %d] x [0, %d]"
            % (u[bad], v[bad], w - 1, h - 1)
        )
    if w == 1:
        x0 = np.zeros(len(u), dtype=np.int64)
        x1 = x0
        fx = np.zeros(len(u))
    else:
        x0 = np.minimum(np.floor(u).astype(np.int64), w - 2)
        x1 = x0 + 1
        fx = u - x0
    if h == 1:
        y0 = np.zeros(len(v), dtype=np.int64)
        y1 = y0
        fy = np.zeros(len(v))
    else:
        y0 = np.minimum(np.floor(v).astype(np.int64), h - 2)
        y1 = y0 + 1
        fy = v - y0
    top = (1.0 - fx) * grid[y0, x0] + fx * grid[y0, x1]
    bot = (1.0 - fx) * grid[y1, x0] + fx * grid[y1, x1]
    return (1.0 - fy) * top + fy * bot
