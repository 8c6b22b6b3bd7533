"""One-parameter group actions on M = Omega x R and their actions on functions.

Two routes are implemented side by side:

* the classical graph-based action on scalar functions, which has to invert
  ``alpha(x) = g1(x, U(x))`` and therefore can fail;
* the parametric action ``g V = g o V``, a plain composition that is total.

Smooth endomorphisms of M (not necessarily invertible) act the same way as
group elements on parametric functions, which gives semigroup actions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .errors import (
    DimensionMismatch,
    Inconclusive,
    NotInvertible,
    NotProjectable,
    UnboundSymbol,
    Unsupported,
)
from .functions import (
    NumericParametricFunction,
    ParametricFunction,
    ScalarFunction,
    as_points,
    bind_parameters,
    coordinate_names,
    eval_on_points,
)
from .geometry import Grid, OpenBox, sample
from .inversion import (
    DEFAULT_RESOLUTION,
    REGULARITY_THRESHOLD,
    InvertedFunction,
    InvertibilityReport,
    Verdict,
    scan_invertibility,
)

PROJECTABILITY_TOL = 1e-12


@dataclass(frozen=True)
class SmoothEndomorphism:
    """An arbitrary smooth map h = (h1, h2) : M -> M written over (x, u)."""

    h1: tuple[ex.Expr, ...]
    h2: ex.Expr
    variables: tuple[str, ...] = ("x",)
    dependent: str = "u"
    name: str = "h"

    def __post_init__(self):
        h1 = (self.h1,) if isinstance(self.h1, ex.Expr) else tuple(self.h1)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(h1) != len(self.variables):
            raise ValueError(f"h1 needs {len(self.variables)} components, got {len(h1)}")
        allowed = {*self.variables, self.dependent}
        for e in (*h1, self.h2):
            extra = sorted(e.symbols() - allowed)
            if extra:
                raise UnboundSymbol(extra[0])

    @classmethod
    def from_source(cls, h1: str | Sequence[str], h2: str, name: str = "h", params=None, n: int = 1):
        names = coordinate_names("x", n)
        srcs = [h1] if isinstance(h1, str) else list(h1)
        allowed = (*names, "u")
        return cls(tuple(bind_parameters(s, allowed, params) for s in srcs),
                   bind_parameters(h2, allowed, params), names, "u", name)

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def components(self) -> tuple[ex.Expr, ...]:
        return (*self.h1, self.h2)

    @property
    def coordinates(self) -> tuple[str, ...]:
        return (*self.variables, self.dependent)

    def __call__(self, points) -> np.ndarray:
        """Apply to an (N, n+1) array of points of M."""
        pts = as_points(points, self.dim + 1)
        return np.column_stack([eval_on_points(c, self.coordinates, pts) for c in self.components])

    def substitute_into(self, exprs: Sequence[ex.Expr]) -> tuple[ex.Expr, ...]:
        """h o F for F given by n+1 expressions (one per coordinate of M)."""
        mapping = dict(zip(self.coordinates, exprs))
        return tuple(ex.substitute(c, mapping) for c in self.components)

    def __str__(self):
        return f"{self.name}: ({', '.join(str(c) for c in self.components)})"


def identity_endomorphism(n: int = 1) -> SmoothEndomorphism:
    names = coordinate_names("x", n)
    return SmoothEndomorphism(tuple(ex.Variable(x) for x in names), ex.Variable("u"), names, "u", "id")


def compose(h_outer: SmoothEndomorphism, h_inner: SmoothEndomorphism) -> SmoothEndomorphism:
    """The endomorphism h_outer o h_inner, by substitution."""
    if h_outer.dim != h_inner.dim:
        raise DimensionMismatch("endomorphisms act on spaces of different dimension")
    renamed = dict(zip(h_inner.coordinates, (ex.Variable(c) for c in h_outer.coordinates)))
    inner = tuple(ex.substitute(c, renamed) for c in h_inner.components)
    comps = h_outer.substitute_into(inner)
    return SmoothEndomorphism(comps[:-1], comps[-1], h_outer.variables, h_outer.dependent,
                              f"{h_outer.name}o{h_inner.name}")


@dataclass(frozen=True)
class GroupAction:
    """A one-parameter family g_eps = (g1, g2) with the additive law g_a o g_b = g_{a+b}."""

    name: str
    parameter: str
    g1: tuple[ex.Expr, ...]
    g2: ex.Expr
    identity_value: float = 0.0
    law: str = "additive"
    variables: tuple[str, ...] = ("x",)
    dependent: str = "u"

    def __post_init__(self):
        g1 = (self.g1,) if isinstance(self.g1, ex.Expr) else tuple(self.g1)
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.law != "additive":
            raise Unsupported(f"group law {self.law!r}; only 'additive' is supported")
        if len(g1) != len(self.variables):
            raise ValueError(f"g1 needs {len(self.variables)} components, got {len(g1)}")
        allowed = {*self.variables, self.dependent, self.parameter}
        for e in (*g1, self.g2):
            extra = sorted(e.symbols() - allowed)
            if extra:
                raise UnboundSymbol(extra[0])

    @classmethod
    def from_source(cls, name: str, parameter: str, g1: str | Sequence[str], g2: str,
                    identity_value: float = 0.0, n: int = 1, params=None) -> "GroupAction":
        names = coordinate_names("x", n)
        coords = (*names, "u", parameter)
        srcs = [g1] if isinstance(g1, str) else list(g1)

        def build(src):
            # the group parameter is parsed as a coordinate, then retagged
            e = bind_parameters(src, coords, params)
            return ex.substitute(e, {parameter: ex.Parameter(parameter)})

        return cls(name, parameter, tuple(build(s) for s in srcs), build(g2), float(identity_value),
                   "additive", names, "u")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def __call__(self, value: float) -> "GroupElement":
        return GroupElement(self, float(value))

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, self.identity_value)

    def rename_parameter(self, new: str) -> "GroupAction":
        m = {self.parameter: ex.Parameter(new)}
        return GroupAction(self.name, new, tuple(ex.substitute(e, m) for e in self.g1),
                           ex.substitute(self.g2, m), self.identity_value, self.law,
                           self.variables, self.dependent)

    def __str__(self):
        comps = ", ".join(str(e) for e in (*self.g1, self.g2))
        return f"{self.name}[{self.parameter}]: ({comps})"


@dataclass(frozen=True)
class GroupElement:
    action: GroupAction
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("group element parameter must be finite")

    def as_endomorphism(self) -> SmoothEndomorphism:
        a = self.action
        bind = {a.parameter: self.value}
        return SmoothEndomorphism(tuple(ex.substitute(e, bind) for e in a.g1), ex.substitute(a.g2, bind),
                                  a.variables, a.dependent, f"{a.name}({self.value:g})")

    def __call__(self, points) -> np.ndarray:
        return self.as_endomorphism()(points)


# ---------------------------------------------------------------------------
# Builtin families, all with G = (R, +) and identity at 0.

def rotation() -> GroupAction:
    return GroupAction.from_source("rotation", "theta", "x*cos(theta) - u*sin(theta)",
                                   "x*sin(theta) + u*cos(theta)")


def quadratic_shear() -> GroupAction:
    """x -> x + eps u^2, u -> u: nonprojectable, folds graphs of most functions."""
    return GroupAction.from_source("quadratic-shear", "eps", "x + eps*u^2", "u")


def shear() -> GroupAction:
    return GroupAction.from_source("shear", "eps", "x + eps*u", "u")


def translation() -> GroupAction:
    return GroupAction.from_source("translation", "eps", "x + eps", "u")


def scaling() -> GroupAction:
    return GroupAction.from_source("scaling", "eps", "x", "exp(eps)*u")


BUILTIN_ACTIONS = {
    "rotation": rotation,
    "quadratic-shear": quadratic_shear,
    "shear": shear,
    "translation": translation,
    "scaling": scaling,
}


# ---------------------------------------------------------------------------
# Operations

def apply_point(g: GroupElement, point) -> tuple[float, ...]:
    """Image of a single point (x, u) of M."""
    out = g(np.asarray(point, dtype=float).reshape(1, -1))[0]
    return tuple(float(v) for v in out)


def default_probe(action: GroupAction, half_width: float = 3.0, eps_range=(-2.0, 2.0), resolution: int = 9) -> Grid:
    lo = [-half_width] * (action.dim + 1) + [eps_range[0]]
    hi = [half_width] * (action.dim + 1) + [eps_range[1]]
    return sample(OpenBox(tuple(lo), tuple(hi)), resolution)


def is_projectable(action: GroupAction, probe: Grid | None = None, tol: float = PROJECTABILITY_TOL) -> bool:
    """True when every d(g1)/du vanishes at every probe point of M x eps-range."""
    probe = probe or default_probe(action)
    names = (*action.variables, action.dependent, action.parameter)
    pts = probe.points
    for comp in action.g1:
        d = ex.differentiate(comp, action.dependent)
        vals = eval_on_points(d, names, pts)
        if np.any(np.abs(vals) > tol):
            return False
    return True


def _require_1d(*objs):
    for o in objs:
        if o.dim != 1:
            raise Unsupported("the graph-based action is implemented for one independent variable")


def alpha_map(g: GroupElement, u: ScalarFunction, resolution: int = DEFAULT_RESOLUTION,
              threshold: float = REGULARITY_THRESHOLD) -> tuple[ex.Expr, InvertibilityReport]:
    """alpha(x) = g1(x, U(x)) and the derivative-sign verdict on its injectivity."""
    _require_1d(g.action, u)
    h = g.as_endomorphism()
    x = u.variables[0]
    alpha = ex.substitute(h.h1[0], {h.variables[0]: ex.Variable(x), h.dependent: u.body})
    return alpha, scan_invertibility(alpha, x, u.domain, resolution, threshold)


def _graph_action(alpha, report, g: GroupElement, u: ScalarFunction, label: str) -> InvertedFunction:
    if report.verdict is Verdict.NOT_INVERTIBLE:
        raise NotInvertible(report)
    if report.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive(report)
    h = g.as_endomorphism()
    x = u.variables[0]
    value = ex.substitute(h.h2, {h.variables[0]: ex.Variable(x), h.dependent: u.body})
    return InvertedFunction(alpha, value, x, u.domain, report, label=label)


def classical_act(g: GroupElement, u: ScalarFunction, resolution: int = DEFAULT_RESOLUTION,
                  threshold: float = REGULARITY_THRESHOLD) -> InvertedFunction:
    """The graph-based action U~(alpha(x)) = g2(x, U(x)).

    Returns a numeric function on alpha(domain); raises NotInvertible or
    Inconclusive instead of guessing when alpha cannot be inverted.
    """
    alpha, report = alpha_map(g, u, resolution, threshold)
    return _graph_action(alpha, report, g, u, label=f"{g.action.name}({g.value:g})*U")


def projectable_act(g: GroupElement, u: ScalarFunction, probe: Grid | None = None,
                    resolution: int = DEFAULT_RESOLUTION) -> InvertedFunction:
    """Action of a fibre-preserving group, where alpha = g1(x) does not see U."""
    _require_1d(g.action, u)
    if not is_projectable(g.action, probe):
        raise NotProjectable(f"{g.action.name}: g1 depends on {g.action.dependent}")
    h = g.as_endomorphism()
    x = u.variables[0]
    # g1 is independent of u here; any value of u gives the same map.
    alpha = ex.substitute(h.h1[0], {h.variables[0]: ex.Variable(x), h.dependent: ex.ZERO})
    report = scan_invertibility(alpha, x, u.domain, resolution)
    return _graph_action(alpha, report, g, u, label=f"{g.action.name}({g.value:g})*U")


def semigroup_act(h: SmoothEndomorphism, v):
    """h V = h o V, with the same parameter domain as V."""
    if h.dim != v.dim:
        raise DimensionMismatch(f"endomorphism of R^{h.dim + 1} applied to a map into R^{v.dim + 1}")
    if isinstance(v, ParametricFunction):
        comps = h.substitute_into(v.components)
        return ParametricFunction(v.domain, comps[:-1], comps[-1], v.parameters, validate=False)

    def composed(pts):
        return h(v(pts))

    return NumericParametricFunction(v.domain, composed, label=f"{h.name}o{getattr(v, 'label', 'V')}")


def act(g: GroupElement, v):
    """Global parametric action g V = g o V; total, no invertibility needed."""
    return semigroup_act(g.as_endomorphism(), v)


# ---------------------------------------------------------------------------
# Sampled group axioms

def identity_defect(action: GroupAction, points) -> float:
    """max |g_e(m) - m| over the given (N, n+1) points of M."""
    pts = as_points(points, action.dim + 1)
    return float(np.max(np.abs(action.identity(pts) - pts)))


def additivity_defect(action: GroupAction, a: float, b: float, points) -> float:
    """max |g_a(g_b(m)) - g_{a+b}(m)| over the given points."""
    pts = as_points(points, action.dim + 1)
    lhs = action(a)(action(b)(pts))
    rhs = action(a + b)(pts)
    return float(np.max(np.abs(lhs - rhs)))
