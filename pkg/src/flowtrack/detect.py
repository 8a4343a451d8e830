"""Shi-Tomasi corner detection with minimum-distance occupancy masking.

Responses are computed from integer Sobel gradients in float64. Every
intermediate (gradients, squared products, block sums) is an integer below
2^53, so results are exact and independent of summation order; selection is
therefore fully deterministic and reproducible by a brute-force reference.
"""

from __future__ import annotations

import numpy as np

from .core import Image


def _sobel(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized 3x3 Sobel gradients on the interior (h-2, w-2) grid."""
    sy = gray[:-2, :] + 2.0 * gray[1:-1, :] + gray[2:, :]
    gx = sy[:, 2:] - sy[:, :-2]
    sx = gray[:, :-2] + 2.0 * gray[:, 1:-1] + gray[:, 2:]
    gy = sx[2:, :] - sx[:-2, :]
    return gx, gy


def _box_sum(a: np.ndarray, radius: int) -> np.ndarray:
    """Sum over (2*radius+1)^2 windows; output shrinks by 2*radius per axis."""
    k = 2 * radius + 1
    c = np.cumsum(a, axis=0)
    c = np.vstack([np.zeros((1, a.shape[1])), c])
    rows = c[k:, :] - c[:-k, :]
    c = np.cumsum(rows, axis=1)
    c = np.hstack([np.zeros((rows.shape[0], 1)), c])
    return c[:, k:] - c[:, :-k]


def min_eig_response(image: Image, block_radius: int = 1) -> np.ndarray:
    """Minimum-eigenvalue corner response grid of the same shape as the image.

    At each pixel the 2x2 structure tensor is accumulated over the
    (2*block_radius+1)^2 block of Sobel gradient products; the response is
    its smaller eigenvalue. Border pixels where the block (or the gradient
    stencil under it) does not fit get response 0.
    """
    h, w = image.height, image.width
    need = 2 * block_radius + 3
    if w < need or h < need:
        raise ValueError(
            "image too small for block_radius=%d: need at least %dx%d, got %dx%d"
            % (block_radius, need, need, w, h)
        )
    gray = image.as_float()
    gx, gy = _sobel(gray)
    gxx = _box_sum(gx * gx, block_radius)
    gyy = _box_sum(gy * gy, block_radius)
    gxy = _box_sum(gx * gy, block_radius)
    half_trace = 0.5 * (gxx + gyy)
    half_diff = 0.5 * (gxx - gyy)
    lam = half_trace - np.sqrt(half_diff * half_diff + gxy * gxy)
    response = np.zeros((h, w))
    m = 1 + block_radius
    response[m : h - m, m : w - m] = lam
    return response


def _local_maxima(response: np.ndarray) -> np.ndarray:
    """Boolean mask of pixels >= all 8 neighbors (3x3 non-max suppression)."""
    padded = np.pad(response, 1, mode="constant", constant_values=-np.inf)
    mask = np.ones(response.shape, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            mask &= response >= padded[1 + dy : padded.shape[0] - 1 + dy, 1 + dx : padded.shape[1] - 1 + dx]
    return mask


def good_features_to_track(
    image: Image,
    max_new: int,
    quality_level: float = 0.01,
    min_dist: float = 30.0,
    occupied=None,
    block_radius: int = 1,
) -> np.ndarray:
    """Detect up to max_new corners, at least min_dist from occupied points.

    Candidates are 3x3 local maxima of min_eig_response with response >=
    quality_level * global max, ordered by response descending (ties by
    row-major pixel index ascending), then accepted greedily subject to a
    Euclidean distance >= min_dist from every occupied point and every
    previously accepted candidate. Returns a (K, 2) array of integer-pixel
    (u, v) positions, K <= max_new.
    """
    if max_new < 0:
        raise ValueError("max_new must be >= 0, got %d" % max_new)
    if not (0.0 < quality_level < 1.0):
        raise ValueError("quality_level must be in (0, 1), got %g" % quality_level)
    if min_dist < 1:
        raise ValueError("min_dist must be >= 1, got %g" % min_dist)
    if max_new == 0:
        return np.zeros((0, 2))

    response = min_eig_response(image, block_radius)
    global_max = float(response.max())
    if global_max <= 0.0:
        return np.zeros((0, 2))
    threshold = quality_level * global_max

    candidate_mask = _local_maxima(response) & (response >= threshold)
    ys, xs = np.nonzero(candidate_mask)
    if len(xs) == 0:
        return np.zeros((0, 2))
    values = response[ys, xs]
    flat = ys.astype(np.int64) * image.width + xs
    order = np.lexsort((flat, -values))
    xs, ys = xs[order], ys[order]

    # Greedy min-distance acceptance via a spatial hash of cell size
    # min_dist: every conflicting point lies in the 3x3 cell neighborhood.
    cell = float(min_dist)
    buckets: dict[tuple[int, int], list[tuple[float, float]]] = {}

    def _insert(u, v):
        key = (int(u // cell), int(v // cell))
        buckets.setdefault(key, []).append((u, v))

    def _conflicts(u, v):
        kx, ky = int(u // cell), int(v // cell)
        lim = float(min_dist) ** 2
        for nx in (kx - 1, kx, kx + 1):
            for ny in (ky - 1, ky, ky + 1):
                for (ou, ov) in buckets.get((nx, ny), ()):
                    if (u - ou) ** 2 + (v - ov) ** 2 < lim:
                        return True
        return False

    if occupied is not None:
        for p in np.asarray(occupied, dtype=np.float64).reshape(-1, 2):
            _insert(float(p[0]), float(p[1]))

    accepted = []
    for x, y in zip(xs, ys):
        u, v = float(x), float(y)
        if not _conflicts(u, v):
            accepted.append((u, v))
            _insert(u, v)
            if len(accepted) == max_new:
                break
    return np.array(accepted, dtype=np.float64).reshape(-1, 2)
