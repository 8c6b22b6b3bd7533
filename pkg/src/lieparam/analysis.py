"""Relations between parametrizations, graph recovery and diagram checks.

All verdicts are sampled: a relation "holds" when its largest pointwise
violation over a grid is within tolerance.  Existential statements (is there
*some* witness phi with V = V' o phi?) are out of reach; callers supply the
witness and only that witness is judged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from .errors import DimensionMismatch, DomainFault, Inconclusive, NotGraph, RangeEscape, Unsupported
from .functions import (
    ParametricFunction,
    as_points,
    coordinate_names,
    eval_on_points,
    image_cloud,
)
from .geometry import Grid, OpenBox, directed_distances, sample
from .inversion import DEFAULT_RESOLUTION, REGULARITY_THRESHOLD, InvertedFunction, Verdict, scan_invertibility

FUNCTIONAL_TOL = 1e-9


@dataclass(frozen=True)
class RelationVerdict:
    holds: bool
    max_defect: float
    defect_point: tuple[float, ...] | None = None
    detail: str = ""
    tolerance: float | None = None

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "max_defect": self.max_defect,
            "defect_point": None if self.defect_point is None else list(self.defect_point),
        }


@dataclass(frozen=True)
class Witness:
    """A smooth map phi between parameter boxes, one expression per target coordinate."""

    maps: tuple[ex.Expr, ...]
    source: OpenBox
    target: OpenBox
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        maps = (self.maps,) if isinstance(self.maps, ex.Expr) else tuple(self.maps)
        names = tuple(self.variables) or coordinate_names("p", self.source.dim)
        if len(maps) != self.target.dim:
            raise DimensionMismatch(f"{len(maps)} component maps for a {self.target.dim}-dimensional target")
        if len(names) != self.source.dim:
            raise DimensionMismatch("variable names do not match the source dimension")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "variables", names)

    @classmethod
    def from_source(cls, sources: str | Sequence[str], source: OpenBox, target: OpenBox, variables=None):
        names = tuple(variables or coordinate_names("p", source.dim))
        srcs = [sources] if isinstance(sources, str) else list(sources)
        return cls(tuple(ex.parse(s, variables=names) for s in srcs), source, target, names)

    @classmethod
    def identity(cls, box: OpenBox) -> "Witness":
        names = coordinate_names("p", box.dim)
        return cls(tuple(ex.Variable(n) for n in names), box, box, names)

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points, self.source.dim)
        return np.column_stack([eval_on_points(m, self.variables, pts) for m in self.maps])


def _point(row) -> tuple[float, ...]:
    return tuple(float(v) for v in row)


def _escape_distance(values: np.ndarray, box: OpenBox) -> np.ndarray:
    """Per-row distance outside the open box (0 inside or on the boundary)."""
    lo, hi = np.asarray(box.lo), np.asarray(box.hi)
    out = np.maximum(np.maximum(lo - values, values - hi), 0.0)
    return out.max(axis=1)


def _closure_values(f, box: OpenBox, grid_values: np.ndarray) -> np.ndarray:
    """Grid values of a map together with its values at the closure endpoints, where defined."""
    vals = [grid_values]
    for end in (box.lo[0], box.hi[0]):
        try:
            vals.append(np.atleast_2d(f(np.array([end]))))
        except (DomainFault, ValueError):
            pass
    return np.vstack(vals)


def _coverage_gap(values: np.ndarray, target: OpenBox, margin: float) -> tuple[float, float | None]:
    """How far [min, max] of ``values`` falls short of covering ``target`` beyond ``margin``.

    For a continuous map of an interval, covering the target interval is the
    same as being onto it (intermediate values).
    """
    lo, hi = float(values.min()), float(values.max())
    left = lo - target.lo[0] - margin
    right = target.hi[0] - hi - margin
    if max(left, right) <= 0:
        return 0.0, None
    if left >= right:
        return left, target.lo[0]
    return right, target.hi[0]


def _one_dimensional(*objs):
    for o in objs:
        if o.dim != 1:
            raise Unsupported("this relation is implemented for one-dimensional parameter domains")


def is_parametrization_of(v, u, grid: Grid | None = None, tol: float = FUNCTIONAL_TOL,
                          resolution: int = DEFAULT_RESOLUTION, ambient: OpenBox | None = None) -> RelationVerdict:
    """Is ``v`` a parametric representation of the scalar function ``u``?

    Checks that V2 = U o V1 on the grid (with V1 staying inside U's domain) and
    that V1 is onto U's domain.  ``ambient`` is the box Omega that V1 must not
    leave; leaving it raises :class:`RangeEscape`.
    """
    _one_dimensional(v, u)
    grid = grid or sample(v.domain, resolution)
    vals = v(grid.points)
    x, w = vals[:, :1], vals[:, 1]
    if ambient is not None and not ambient.contains(x).all():
        bad = float(x[~ambient.contains(x)][0, 0])
        raise RangeEscape(f"first component reaches {bad}, outside {ambient}")

    inside = u.domain.contains(x)
    escape = _escape_distance(x, u.domain)
    fun = np.zeros(len(x))
    if inside.any():
        fun[inside] = np.abs(w[inside] - u(x[inside, 0]))
    pointwise = np.where(inside, fun, np.maximum(escape, 0.0))
    k = int(np.argmax(pointwise))

    first = _closure_values(lambda p: v(p)[:, :1], v.domain, x)
    gap, gap_at = _coverage_gap(first, u.domain, 2.0 * grid.max_spacing)

    holds = bool(inside.all() and fun.max() <= tol and gap == 0.0)
    if gap > pointwise[k]:
        return RelationVerdict(holds, float(gap), (gap_at,), "first component is not onto the domain", tol)
    detail = "" if inside.all() else "first component leaves the domain"
    return RelationVerdict(holds, float(pointwise[k]), _point(grid.points[k]), detail, tol)


def refines_with_witness(v, v2, phi: Witness, grid: Grid | None = None, tol: float = FUNCTIONAL_TOL,
                         resolution: int = DEFAULT_RESOLUTION) -> RelationVerdict:
    """Does ``phi`` witness V <= V2, i.e. V = V2 o phi with phi onto V2's domain?

    A failing verdict refutes this witness only, not the relation.
    """
    if phi.source.dim != v.dim or phi.target.dim != v2.dim:
        raise DimensionMismatch("witness does not map the first domain into the second")
    _one_dimensional(v, v2)
    grid = grid or sample(v.domain, resolution)
    pts = grid.points
    q = phi(pts)
    comm = np.linalg.norm(v(pts) - v2(q), axis=1)
    escape = _escape_distance(q, phi.target)
    pointwise = np.maximum(comm, escape)
    k = int(np.argmax(pointwise))

    lands = bool(phi.target.contains(q).all())
    gap, gap_at = _coverage_gap(_closure_values(phi, phi.source, q), phi.target, 2.0 * grid.max_spacing)
    holds = bool(lands and comm.max() <= tol and gap == 0.0)
    if gap > pointwise[k]:
        return RelationVerdict(holds, float(gap), (gap_at,), "witness is not onto the target", tol)
    return RelationVerdict(holds, float(pointwise[k]), _point(pts[k]),
                           "" if lands else "witness leaves the target box", tol)


def equivalent(v, v2, grid: Grid | None = None, grid2: Grid | None = None, tol: float | None = None,
               resolution: int = DEFAULT_RESOLUTION) -> RelationVerdict:
    """Do ``v`` and ``v2`` have the same image, up to sampling?

    The default tolerance is twice the largest gap between neighbouring samples
    of either image cloud, i.e. the resolution at which the two sampled sets
    can be told apart at all.
    """
    grid = grid or sample(v.domain, resolution)
    grid2 = grid2 or sample(v2.domain, resolution)
    a, b = image_cloud(v, grid), image_cloud(v2, grid2)
    if a.dim != b.dim:
        raise DimensionMismatch("images live in different spaces")
    if tol is None:
        tol = 2.0 * max(a.spacing(), b.spacing())
    da, db = directed_distances(a, b), directed_distances(b, a)
    if da.max() >= db.max():
        d, point = float(da.max()), _point(a.points[int(da.argmax())])
    else:
        d, point = float(db.max()), _point(b.points[int(db.argmax())])
    return RelationVerdict(d <= tol, d, point, "", float(tol))


def try_deparametrize(v: ParametricFunction, resolution: int = DEFAULT_RESOLUTION,
                      threshold: float = REGULARITY_THRESHOLD) -> InvertedFunction:
    """Recover U = V2 o V1^{-1} when V1 is a diffeomorphism onto its image.

    Raises :class:`NotGraph` with a fold point when V1 changes direction and
    :class:`Inconclusive` when its slope degenerates without a sign change.
    """
    _one_dimensional(v)
    name = v.parameters[0]
    report = scan_invertibility(v.first[0], name, v.domain, resolution, threshold)
    if report.verdict is Verdict.NOT_INVERTIBLE:
        raise NotGraph(report, f"image is not a graph: first component folds at p = {report.witness:.6g}")
    if report.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive(report)
    return InvertedFunction(v.first[0], v.second, name, v.domain, report, label="deparametrized")


# ---------------------------------------------------------------------------
# Diagrams

Map = Callable[[np.ndarray], np.ndarray]


def compose_maps(*maps: Map) -> Map:
    """compose_maps(f, g, h)(p) == f(g(h(p)))."""

    def composed(points):
        out = points
        for m in reversed(maps):
            out = m(out)
        return out

    return composed


def inverse_map(f: InvertedFunction) -> Map:
    """The numeric inverse of the forward map behind ``f``, as an (N,1) -> (N,1) map."""

    def inv(points):
        return f.inverse(np.asarray(points, dtype=float).reshape(-1))[:, None]

    return inv


def check_commutes(top: Map, left: Map, right: Map, points, tol: float) -> RelationVerdict:
    """Does right o left == top on the sample points?

    Maps take an (N, k) array and return an (N, m) array.
    """
    pts = points.points if isinstance(points, Grid) else np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    lhs = np.asarray(right(left(pts)))
    rhs = np.asarray(top(pts))
    if lhs.shape != rhs.shape:
        raise DimensionMismatch(f"diagram legs end in shapes {lhs.shape} and {rhs.shape}")
    defect = np.linalg.norm(lhs - rhs, axis=1)
    k = int(np.argmax(defect))
    d = float(defect[k])
    return RelationVerdict(bool(d <= tol) and math.isfinite(d), d, _point(pts[k]), "", tol)


def sandwich(g, u, resolution: int = 2048, tol: float = 1e-8) -> tuple[RelationVerdict, RelationVerdict]:
    """Both triangles relating g U_* and (g U)_* through alpha and its inverse.

    The first verdict checks g U_* == (g U)_* o alpha on U's domain, the second
    (g U)_* == g U_* o alpha^{-1} on the transformed domain; together they give
    g U_* <= (g U)_* <= g U_*.  Requires the classical action to exist.
    """
    from .actions import act, classical_act
    from .functions import canonical_parametrize

    gu = classical_act(g, u)
    top = act(g, canonical_parametrize(u))
    bottom = canonical_parametrize(gu)
    alpha = Witness((gu.forward,), u.domain, gu.domain, (gu.variable,))
    forward = check_commutes(top, alpha, bottom, sample(u.domain, resolution), tol)
    backward = check_commutes(bottom, inverse_map(gu), top, sample(gu.domain, resolution), tol)
    return forward, backward
