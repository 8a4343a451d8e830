"""Dense optical-flow field, flow providers, and dense-to-sparse sampling.

Convention: forward flow, frame t-1 -> frame t, displacement in pixels.
Subpixel lookups are bilinear; a feature moved by the flow lands at
position + flow_at(position).

The on-disk format is the Middlebury-style binary layout: a 4-byte
little-endian float tag 202021.25 ("PIEH"), int32 width, int32 height,
then height*width interleaved (u, v) float32 pairs, row-major. Writing
quantizes grids to the format's 32-bit precision.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import FeatureSet, bilinear_sample, bilinear_sample_many
from .errors import DataError, DegenerateHomographyError, FlowFileError

FLO_TAG = 202021.25


@dataclass(frozen=True)
class FlowField:
    """Per-pixel (du, dv) displacement grids, each (height, width) float64."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.ascontiguousarray(np.asarray(self.u, dtype=np.float64))
        v = np.ascontiguousarray(np.asarray(self.v, dtype=np.float64))
        if u.ndim != 2 or v.ndim != 2:
            raise ValueError("flow components must be 2-D grids")
        if u.shape != v.shape:
            raise ValueError("u and v grids must have equal shape, got %r vs %r" % (u.shape, v.shape))
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]


def flow_at(flow: FlowField, p) -> tuple[float, float]:
    """Bilinear (du, dv) lookup at subpixel point p."""
    return bilinear_sample(flow.u, p), bilinear_sample(flow.v, p)


def track_with_flow(flow: FlowField, prev: FeatureSet) -> np.ndarray:
    """Move every feature by the flow sampled at its position.

    Returns an (N, 2) array of candidate positions, in feature order.
    No boundary or outlier filtering happens here; candidates may land
    outside the image.
    """
    if len(prev) == 0:
        return np.zeros((0, 2))
    du = bilinear_sample_many(flow.u, prev.positions)
    dv = bilinear_sample_many(flow.v, prev.positions)
    return prev.positions + np.stack([du, dv], axis=1)


def constant_flow(width: int, height: int, du: float, dv: float) -> FlowField:
    return FlowField(
        np.full((height, width), float(du)),
        np.full((height, width), float(dv)),
    )


def flow_from_homography(H, width: int, height: int) -> FlowField:
    """Flow field of the pixel map p -> dehomogenize(H @ [u, v, 1]).

    H maps frame-(t-1) pixel coordinates to frame-t pixel coordinates in
    homogeneous form. Raises DegenerateHomographyError when the homogeneous
    scale drops to <= 1e-12 anywhere on the pixel grid.
    """
    H = np.asarray(H, dtype=np.float64).reshape(3, 3)
    uu, vv = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    w = H[2, 0] * uu + H[2, 1] * vv + H[2, 2]
    if np.min(np.abs(w)) <= 1e-12:
        raise DegenerateHomographyError(
            "homogeneous scale reaches %g inside the %dx%d domain" % (np.min(np.abs(w)), width, height)
        )
    x = (H[0, 0] * uu + H[0, 1] * vv + H[0, 2]) / w
    y = (H[1, 0] * uu + H[1, 1] * vv + H[1, 2]) / w
    return FlowField(x - uu, y - vv)


def write_flow_file(flow: FlowField, path) -> None:
    """Write the field in the binary format described in the module docstring."""
    h, w = flow.u.shape
    payload = np.empty((h, w, 2), dtype="<f4")
    payload[:, :, 0] = flow.u
    payload[:, :, 1] = flow.v
    with open(path, "wb") as f:
        f.write(struct.pack("<f", FLO_TAG))
        f.write(struct.pack("<ii", w, h))
        f.write(payload.tobytes())


def load_flow_file(path) -> FlowField:
    """Read a flow file written by write_flow_file; exact round-trip."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 12:
        raise FlowFileError("%s: truncated header (%d bytes)" % (path, len(raw)))
    (tag,) = struct.unpack_from("<f", raw, 0)
    if tag != FLO_TAG:
        raise FlowFileError("%s: bad magic number %r, expected %r" % (path, tag, FLO_TAG))
    w, h = struct.unpack_from("<ii", raw, 4)
    if w <= 0 or h <= 0:
        raise FlowFileError("%s: nonpositive dimensions %dx%d" % (path, w, h))
    expected = 12 + 8 * w * h
    if len(raw) != expected:
        raise FlowFileError(
            "%s: payload is %d bytes, expected %d for %dx%d field" % (path, len(raw) - 12, expected - 12, w, h)
        )
    data = np.frombuffer(raw, dtype="<f4", offset=12).reshape(h, w, 2)
    return FlowField(data[:, :, 0].astype(np.float64), data[:, :, 1].astype(np.float64))


class FileFlowProvider:
    """Flow provider backed by pre-enumerated flow files.

    files maps frame_index -> path; a missing index is a hard error rather
    than a skip, because silent gaps would corrupt velocity computation.
    """

    def __init__(self, files: dict[int, str]):
        self.files = dict(files)

    @classmethod
    def from_directory(cls, directory, pattern="flow_%06d.flo") -> "FileFlowProvider":
        files = {}
        for name in sorted(os.listdir(directory)):
            if name.endswith(".flo"):
                stem = name[: -len(".flo")]
                digits = stem.split("_")[-1]
                try:
                    files[int(digits)] = os.path.join(directory, name)
                except ValueError:
                    raise DataError("unrecognized flow file name %r" % name)
        return cls(files)

    def __call__(self, prev_image, curr_image, frame_index: int) -> FlowField:
        path = self.files.get(frame_index)
        if path is None:
            raise DataError("no flow file for frame %d" % frame_index)
        field = load_flow_file(path)
        if field.width != prev_image.width or field.height != prev_image.height:
            raise DataError(
                "flow file %s is %dx%d but images are %dx%d"
                % (path, field.width, field.height, prev_image.width, prev_image.height)
            )
        return field


class ConstantFlowProvider:
    """Returns the same constant displacement for every frame (test fixture)."""

    def __init__(self, du: float, dv: float):
        self.du = float(du)
        self.dv = float(dv)

    def __call__(self, prev_image, curr_image, frame_index: int) -> FlowField:
        return constant_flow(prev_image.width, prev_image.height, self.du, self.dv)
