"""Scalar functions on open boxes and their parametric representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import expr as ex
from .errors import DimensionMismatch, SingularParametrization, UnboundSymbol, Unsupported
from .geometry import Grid, OpenBox, PointCloud, sample

REGULARITY_THRESHOLD = 1e-8


def coordinate_names(stem: str, n: int) -> tuple[str, ...]:
    """``("x",)`` in one dimension, ``("x1", ..., "xn")`` otherwise."""
    return (stem,) if n == 1 else tuple(f"{stem}{i + 1}" for i in range(n))


def standard_grid(box: OpenBox) -> Grid:
    """Coarse grid used for well-formedness checks at construction time."""
    res = 64 if box.dim == 1 else max(4, int(round(4096 ** (1.0 / box.dim))))
    return sample(box, res)


def as_points(points, dim: int) -> np.ndarray:
    """Coerce scalars, 1-d arrays (when dim == 1) or (N, dim) arrays to (N, dim)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1) if dim == 1 else arr.reshape(1, -1)
    elif arr.ndim == 1:
        arr = arr[:, None] if dim == 1 else arr[None, :]
    if arr.shape[1] != dim:
        raise DimensionMismatch(f"expected points in R^{dim}, got shape {arr.shape}")
    return arr


def eval_on_points(e: ex.Expr, names: Sequence[str], points: np.ndarray, extra=None) -> np.ndarray:
    """Evaluate ``e`` at each row of ``points`` (columns bound to ``names``)."""
    bindings = {name: points[:, i] for i, name in enumerate(names)}
    if extra:
        bindings.update(extra)
    out = ex.evaluate(e, bindings)
    return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],)).copy()


def _check_symbols(exprs, allowed):
    for e in exprs:
        extra = sorted(e.symbols() - set(allowed))
        if extra:
            raise UnboundSymbol(extra[0])


def bind_parameters(source: str, names: Sequence[str], values: Mapping[str, float] | None = None) -> ex.Expr:
    """Parse ``source`` over the coordinates ``names``; other identifiers are parameters.

    Parameters present in ``values`` are substituted by constants.  Any that
    remain unbound surface as :class:`UnboundSymbol` when a function is built.
    """
    values = dict(values or {})
    e = ex.parse(source)
    params = sorted(e.symbols() - set(names))
    if params:
        e = ex.parse(source, variables=names, parameters=params)
        bound = {k: v for k, v in values.items() if k in params}
        if bound:
            e = ex.substitute(e, bound)
    return e


@dataclass(frozen=True)
class ScalarFunction:
    """A smooth partial function U : domain -> R given by an expression."""

    domain: OpenBox
    body: ex.Expr
    variables: tuple[str, ...] = ()
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        names = tuple(self.variables) or coordinate_names("x", self.domain.dim)
        if len(names) != self.domain.dim:
            raise ValueError(f"{len(names)} variable names for a {self.domain.dim}-dimensional domain")
        object.__setattr__(self, "variables", names)
        _check_symbols([self.body], names)
        if self.validate:
            self(standard_grid(self.domain).points)

    @classmethod
    def from_source(cls, source: str, domain: OpenBox, params: Mapping[str, float] | None = None, variables=None):
        names = tuple(variables or coordinate_names("x", domain.dim))
        return cls(domain, bind_parameters(source, names, params), names)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        return eval_on_points(self.body, self.variables, pts)

    def derivative(self, wrt: str | None = None) -> "ScalarFunction":
        wrt = wrt or self.variables[0]
        return ScalarFunction(self.domain, ex.differentiate(self.body, wrt), self.variables, validate=False)

    def __str__(self):
        return f"{self.body} on {self.domain}"


@dataclass(frozen=True)
class ParametricFunction:
    """A smooth map V = (V1, V2) : domain -> M with V1 landing in R^n."""

    domain: OpenBox
    first: tuple[ex.Expr, ...]
    second: ex.Expr
    parameters: tuple[str, ...] = ()
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        n = self.domain.dim
        first = (self.first,) if isinstance(self.first, ex.Expr) else tuple(self.first)
        if len(first) != n:
            raise ValueError(f"first component needs {n} expressions, got {len(first)}")
        names = tuple(self.parameters) or coordinate_names("p", n)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "parameters", names)
        _check_symbols([*first, self.second], names)
        if self.validate:
            self(standard_grid(self.domain).points)

    @classmethod
    def from_source(cls, first: str | Sequence[str], second: str, domain: OpenBox,
                    params: Mapping[str, float] | None = None, parameters=None):
        names = tuple(parameters or coordinate_names("p", domain.dim))
        sources = [first] if isinstance(first, str) else list(first)
        return cls(domain, tuple(bind_parameters(s, names, params) for s in sources),
                   bind_parameters(second, names, params), names)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def components(self) -> tuple[ex.Expr, ...]:
        return (*self.first, self.second)

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.column_stack([eval_on_points(c, self.parameters, pts) for c in self.components])

    def __str__(self):
        parts = ", ".join(str(c) for c in self.components)
        return f"({parts}) on {self.domain}"


@dataclass(frozen=True)
class NumericParametricFunction:
    """Parametric function backed by a vectorized callable rather than expressions.

    Used for canonical parametrizations of numerically inverted functions.
    """

    domain: OpenBox
    func: Callable[[np.ndarray], np.ndarray]
    label: str = "numeric"

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.asarray(self.func(pts), dtype=float).reshape(len(pts), self.dim + 1)


def canonical_parametrize(u) -> ParametricFunction | NumericParametricFunction:
    """The representation x -> (x, U(x)) on the domain of ``u``.

    Expression-backed functions give an expression-backed result with the
    coordinates renamed to parameters; any other function object with a
    ``domain`` and a vectorized call gives a numeric parametrization.
    """
    if isinstance(u, ScalarFunction):
        names = coordinate_names("p", u.dim)
        rename = {x: ex.Variable(p) for x, p in zip(u.variables, names)}
        first = tuple(ex.Variable(p) for p in names)
        return ParametricFunction(u.domain, first, ex.substitute(u.body, rename), names, validate=False)

    def graph(pts):
        return np.column_stack([pts, u(pts)])

    return NumericParametricFunction(u.domain, graph, label=f"canonical({getattr(u, 'label', 'numeric')})")


def graph_cloud(u, grid: Grid) -> PointCloud:
    """Sampled graph {(x, U(x))} over ``grid``."""
    pts = grid.points
    return PointCloud(np.column_stack([pts, u(pts)]), shape=grid.resolution)


def image_cloud(v, grid: Grid) -> PointCloud:
    """Sampled image {V(p)} over ``grid``."""
    return PointCloud(v(grid.points), shape=grid.resolution)


def parametric_derivative(v: ParametricFunction, p: float, order: int = 1,
                          threshold: float = REGULARITY_THRESHOLD) -> float:
    """Derivative of the graph locally traced by ``v`` at x = V1(p).

    Order 1 is V2'/V1'; order 2 is (V2'' V1' - V2' V1'') / V1'^3.  Both come
    from symbolic derivatives of the components, so no inversion is needed.
    """
    if v.dim != 1:
        raise Unsupported("parametric derivatives are implemented for one parameter only")
    if order not in (1, 2):
        raise Unsupported(f"derivative order {order} is not supported")
    name = v.parameters[0]
    v1, v2 = v.first[0], v.second
    d1, d2 = ex.differentiate(v1, name), ex.differentiate(v2, name)
    b = {name: float(p)}
    s1 = ex.evaluate(d1, b)
    if abs(s1) <= threshold:
        raise SingularParametrization(f"|V1'({p})| = {abs(s1):.3g} is below {threshold:g}")
    s2 = ex.evaluate(d2, b)
    if order == 1:
        return s2 / s1
    dd1 = ex.evaluate(ex.differentiate(d1, name), b)
    dd2 = ex.evaluate(ex.differentiate(d2, name), b)
    return (dd2 * s1 - s2 * dd1) / s1**3
