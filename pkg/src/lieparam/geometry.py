"""Open boxes, interior sampling grids, point clouds and covering distances."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, OverflowRisk

DEFAULT_POINT_CAP = 10**7


@dataclass(frozen=True)
class OpenBox:
    """The open box prod(lo_i, hi_i); bounds must be finite with lo < hi."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not lo:
            raise DimensionMismatch("lo and hi must have the same positive length")
        for a, b in zip(lo, hi):
            if not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError("box bounds must be finite")
            if not a < b:
                raise ValueError(f"empty box axis ({a}, {b})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "OpenBox":
        return cls((lo,), (hi,))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    def contains(self, points) -> np.ndarray:
        """Strict membership for an (N, dim) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts > np.asarray(self.lo)) & (pts < np.asarray(self.hi)), axis=1)

    def corners(self) -> np.ndarray:
        """All 2**dim vertices of the closure."""
        axes = [np.array([a, b]) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def __str__(self):
        return " x ".join(f"({a:g}, {b:g})" for a, b in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Grid:
    """Half-step-offset uniform sample of an open box (tensor product over axes)."""

    box: OpenBox
    resolution: tuple[int, ...]

    @property
    def axes(self) -> list[np.ndarray]:
        out = []
        for lo, hi, r in zip(self.box.lo, self.box.hi, self.resolution):
            step = (hi - lo) / r
            out.append(lo + (np.arange(r) + 0.5) * step)
        return out

    @property
    def spacing(self) -> np.ndarray:
        return self.box.widths / np.asarray(self.resolution)

    @property
    def max_spacing(self) -> float:
        return float(np.max(self.spacing))

    @property
    def size(self) -> int:
        return int(np.prod(self.resolution))

    @property
    def points(self) -> np.ndarray:
        """Sample points as an (N, dim) array, last axis varying fastest."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def sample(box: OpenBox, resolution: int | Sequence[int], cap: int = DEFAULT_POINT_CAP) -> Grid:
    """Sample ``box`` at ``lo + (i + 1/2) (hi - lo) / r`` along each axis."""
    res = (resolution,) * box.dim if np.ndim(resolution) == 0 else tuple(resolution)
    res = tuple(int(r) for r in res)
    if len(res) != box.dim:
        raise DimensionMismatch(f"{len(res)} resolutions for a {box.dim}-dimensional box")
    if any(r < 2 for r in res):
        raise ValueError("resolution must be at least 2 on every axis")
    total = int(np.prod(res, dtype=object))
    if total > cap:
        raise OverflowRisk(f"grid of {total} points exceeds the cap of {cap}")
    return Grid(box, res)


class PointCloud:
    """Ordered finite points in R^d, stored as an (N, d) array.

    ``shape`` optionally records the grid resolution the points were generated
    from, so that :meth:`spacing` can measure neighbour gaps along grid axes.
    """

    def __init__(self, points, shape: tuple[int, ...] | None = None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("a point cloud needs a nonempty (N, d) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        if shape is not None and int(np.prod(shape)) != pts.shape[0]:
            raise ValueError(f"shape {shape} does not match {pts.shape[0]} points")
        pts.setflags(write=False)
        self.points = pts
        self.shape = None if shape is None else tuple(shape)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def spacing(self) -> float:
        """Largest distance between grid neighbours (consecutive points if no shape)."""
        shape = self.shape or (len(self),)
        if len(self) < 2:
            return 0.0
        arr = self.points.reshape(*shape, self.dim)
        gaps = 0.0
        for axis in range(len(shape)):
            if shape[axis] < 2:
                continue
            d = np.linalg.norm(np.diff(arr, axis=axis), axis=-1)
            gaps = max(gaps, float(d.max()))
        return gaps

    def to_csv(self, header: Sequence[str] | None = None, index=None) -> str:
        """CSV text, one point per row, '\\n' line endings and repr-exact floats."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        cols = self.points if index is None else np.column_stack([np.asarray(index, float), self.points])
        for row in cols:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, header: bool = False) -> "PointCloud":
        rows = list(csv.reader(io.StringIO(text)))
        if header:
            rows = rows[1:]
        return cls([[float(v) for v in r] for r in rows if r])


def _as_array(c) -> np.ndarray:
    return c.points if isinstance(c, PointCloud) else np.atleast_2d(np.asarray(c, dtype=float))


def directed_distances(a, b, budget: int = 1 << 22) -> np.ndarray:
    """For every point of ``a``, the distance to its nearest point of ``b``.

    Brute force over all pairs, using coordinate differences directly (no
    expanded squares), so identical points give exactly 0 and adding points
    to ``b`` can never increase a result.  ``budget`` bounds the number of
    differences held in memory at once.
    """
    pa, pb = _as_array(a), _as_array(b)
    if pa.shape[1] != pb.shape[1]:
        raise DimensionMismatch(f"clouds live in R^{pa.shape[1]} and R^{pb.shape[1]}")
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("covering distance needs nonempty clouds")
    chunk = max(1, budget // len(pb))
    out = np.empty(len(pa))
    cols_b = [np.ascontiguousarray(pb[:, k]) for k in range(pb.shape[1])]
    for start in range(0, len(pa), chunk):
        block = pa[start:start + chunk]
        d2 = np.zeros((len(block), len(pb)))
        for k, col in enumerate(cols_b):
            diff = np.subtract.outer(block[:, k], col)
            d2 += diff * diff
        out[start:start + chunk] = np.sqrt(d2.min(axis=1))
    return out


def covering_distance(a, b) -> float:
    """Directed Hausdorff distance: max over p in a of min over q in b of |p - q|."""
    return float(directed_distances(a, b).max())


def symmetric_distance(a, b) -> float:
    return max(covering_distance(a, b), covering_distance(b, a))
