"""Runnable scenarios and randomized property suites with pass/fail reports.

A scenario runs each of its declared checks once per parameter value.
Suites draw random inputs from a generator seeded by ``(seed, suite name)``,
so a report is a pure function of the seed.  Failures are reported as failed
outcomes rather than raised; only configuration problems raise.
"""
from __future__ import annotations

import json
import math
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr as ex
from .actions import (
    BUILTIN_ACTIONS,
    GroupAction,
    SmoothEndomorphism,
    act,
    additivity_defect,
    alpha_map,
    classical_act,
    compose,
    identity_defect,
    is_projectable,
    semigroup_act,
)
from .analysis import (
    Witness,
    check_commutes,
    compose_maps,
    equivalent,
    inverse_map,
    is_parametrization_of,
    refines_with_witness,
    sandwich,
    try_deparametrize,
)
from .errors import (
    ConfigError,
    Inconclusive,
    LieParamError,
    NotGraph,
    NotInvertible,
    UnboundSymbol,
)
from .functions import (
    ParametricFunction,
    ScalarFunction,
    canonical_parametrize,
    image_cloud,
    parametric_derivative,
)
from .geometry import OpenBox, sample
from .inversion import Verdict, scan_invertibility
from .scenario import CONSTANTS, CheckSpec, Scenario, boolean, box, builtin_scenarios

TRIALS = 100


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    defect: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "defect": _finite_or_none(self.defect),
            "tolerance": _finite_or_none(self.tolerance),
            "detail": self.detail,
        }


@dataclass
class Report:
    name: str
    reference: str
    seed: int
    outcomes: list[CheckOutcome] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def failures(self) -> list[CheckOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def to_json(self) -> dict:
        # wall time is left out so that reports are reproducible byte for byte
        return {
            "name": self.name,
            "reference": self.reference,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [o.to_json() for o in self.outcomes],
        }


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def reports_to_json(reports: list[Report]) -> str:
    doc = {"passed": all(r.passed for r in reports), "reports": [r.to_json() for r in reports]}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def summary_table(reports: list[Report]) -> str:
    """Plain-text table: one header line per report, one row per check."""
    lines = []
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        ref = f"  ({r.reference})" if r.reference else ""
        lines.append(f"{status}  {r.name}{ref}  [{len(r.outcomes)} checks, {r.wall_time:.2f}s]")
        for o in r.outcomes:
            mark = "ok  " if o.passed else "FAIL"
            d = "" if o.defect is None else f"defect={o.defect:.3g}"
            t = "" if o.tolerance is None else f"tol={o.tolerance:.3g}"
            extra = f"  {o.detail}" if o.detail and not o.passed else ""
            lines.append(f"    {mark}  {o.name:<48} {d:<18} {t}{extra}".rstrip())
    n_fail = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - n_fail}/{len(reports)} reports passed")
    return "\n".join(lines) + "\n"


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Independent stream per (seed, key...) so adding a suite does not reseed the others."""
    words = [int(seed) & 0xFFFFFFFF]
    for k in keys:
        words.append(zlib.crc32(str(k).encode()) if isinstance(k, str) else int(k))
    return np.random.default_rng(np.random.SeedSequence(words))


def shrink_magnitude(fails: Callable[[float], bool], steps: int = 40) -> float:
    """Smallest scale s in [0, 1] (to bisection accuracy) at which ``fails(s)`` still holds.

    Assumes ``fails(1.0)``.  Used to report the smallest failing multiple of
    a counterexample's parameters.
    """
    if fails(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if fails(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Scenario checks

_VERDICT_NAMES = {"Invertible", "NotInvertible", "NotGraph", "Inconclusive"}


def _const_expr(source: str, path: str, params: tuple[str, ...] = (), variables: tuple[str, ...] = ()) -> ex.Expr:
    try:
        e = ex.parse(source, variables=list(variables) + ["pi"], parameters=params)
    except LieParamError as err:
        raise ConfigError(str(err), path) from err
    return ex.substitute(e, CONSTANTS)


class _Run:
    def __init__(self, sc: Scenario, seed: int):
        self.sc = sc
        self.seed = seed
        self.outcomes: list[CheckOutcome] = []
        try:
            self.action = sc.build_action()
            self.function = sc.build_function()
        except UnboundSymbol as e:
            raise ConfigError(f"unbound symbol {e.name!r}; scenario inputs must be closed", "scenario") from e

    # helpers ---------------------------------------------------------------

    def values(self, spec: CheckSpec):
        if not isinstance(self.action, GroupAction):
            return [None]
        vals = spec.params if spec.params is not None else self.sc.params
        if not vals:
            raise ConfigError("no parameter values given for a group action", f"{spec.path}.params")
        return list(vals)

    def label(self, spec: CheckSpec, value, suffix: str = "") -> str:
        name = spec.kind + (f":{suffix}" if suffix else "")
        if value is None:
            return name
        return f"{name}[{self.action.parameter}={value:.6g}]"

    def scalar(self, spec: CheckSpec) -> ScalarFunction:
        if not isinstance(self.function, ScalarFunction):
            raise ConfigError(f"a {spec.kind} check needs a scalar function (key 'u')", spec.path)
        return self.function

    def group(self, spec: CheckSpec) -> GroupAction:
        if not isinstance(self.action, GroupAction):
            raise ConfigError(f"a {spec.kind} check needs a group action with 'param'", spec.path)
        return self.action

    def parametric(self, spec: CheckSpec):
        if self.function is None:
            raise ConfigError(f"a {spec.kind} check needs a [function] section", spec.path)
        if isinstance(self.function, ScalarFunction):
            return canonical_parametrize(self.function)
        return self.function

    def option(self, spec: CheckSpec, key: str, required: bool = True):
        if key not in spec.options:
            if required:
                raise ConfigError(f"missing key {key!r}", f"{spec.path}.{key}")
            return None
        return spec.options[key]

    def verdict_option(self, spec: CheckSpec) -> str:
        v = self.option(spec, "verdict")
        if v not in _VERDICT_NAMES:
            raise ConfigError(f"unknown verdict {v!r}", f"{spec.path}.verdict")
        return v

    def witness_value(self, spec: CheckSpec, value) -> float | None:
        src = self.option(spec, "witness", required=False)
        if src is None:
            return None
        params = (self.action.parameter,) if isinstance(self.action, GroupAction) else ()
        e = _const_expr(src, f"{spec.path}.witness", params)
        b = {} if value is None else {self.action.parameter: value}
        return float(ex.evaluate(e, b))

    def add(self, *args, **kw):
        self.outcomes.append(CheckOutcome(*args, **kw))

    # check kinds ---------------------------------------------------------

    def check_alpha(self, spec, value):
        expected = self.verdict_option(spec)
        _, report = alpha_map(self.group(spec)(value), self.scalar(spec), self.sc.grid)
        self._verdict_outcome(spec, value, expected, report.verdict.value, report.witness)

    def _verdict_outcome(self, spec, value, expected, got, witness):
        name = self.label(spec, value)
        if got != expected:
            self.add(name, False, detail=f"expected {expected}, got {got}")
            return
        target = self.witness_value(spec, value)
        if target is None:
            self.add(name, True, detail=got)
            return
        tol = spec.tolerance if spec.tolerance is not None else 0.01
        if witness is None:
            self.add(name, False, tolerance=tol, detail=f"{got} without a witness")
            return
        d = abs(witness - target)
        self.add(name, d <= tol, d, tol, f"{got}, witness {witness:.6g} vs {target:.6g}")

    def check_classical(self, spec, value):
        expected = self.verdict_option(spec)
        try:
            classical_act(self.group(spec)(value), self.scalar(spec), self.sc.grid)
            got, w = "Invertible", None
        except NotInvertible as e:
            got, w = "NotInvertible", e.report.witness
        except Inconclusive as e:
            got, w = "Inconclusive", e.report.witness
        self._verdict_outcome(spec, value, expected, got, w)

    def check_classical_identity(self, spec, value):
        u = self.scalar(spec)
        tol = spec.tolerance if spec.tolerance is not None else 1e-12
        gu = classical_act(self.group(spec)(value), u, self.sc.grid)
        pts = sample(u.domain, self.sc.grid).points
        d_val = float(np.max(np.abs(gu(pts[:, 0]) - u(pts))))
        d_dom = max(abs(a - b) for a, b in zip(gu.domain.lo + gu.domain.hi, u.domain.lo + u.domain.hi))
        d = max(d_val, d_dom)
        self.add(self.label(spec, value), d <= tol, d, tol, f"domain {gu.domain}")

    def check_deparametrize(self, spec, value):
        expected = self.verdict_option(spec)
        v = self.parametric(spec)
        if value is not None:
            v = act(self.group(spec)(value), v)
        try:
            try_deparametrize(v, self.sc.grid)
            got, w = "Invertible", None
        except NotGraph as e:
            got, w = "NotGraph", e.report.witness
        except Inconclusive as e:
            got, w = "Inconclusive", e.report.witness
        self._verdict_outcome(spec, value, expected, got, w)

    def _acted(self, spec, value):
        v = self.parametric(spec)
        if value is None:
            return semigroup_act(self._endomorphism(spec), v)
        return act(self.group(spec)(value), v)

    def _endomorphism(self, spec) -> SmoothEndomorphism:
        if not isinstance(self.action, SmoothEndomorphism):
            raise ConfigError(f"a {spec.kind} check needs an endomorphism (an [action] without 'param')", spec.path)
        return self.action

    def check_act_total(self, spec, value):
        w = self._acted(spec, value)
        cloud = image_cloud(w, sample(w.domain, self.sc.grid))
        self.add(self.label(spec, value), True, detail=f"{len(cloud)} finite image points")

    def _reference(self, spec, value, domain: OpenBox) -> ParametricFunction:
        params = (self.action.parameter,) if isinstance(self.action, GroupAction) else ()
        comps = [_const_expr(self.option(spec, k), f"{spec.path}.{k}", params, ("p",)) for k in ("x_ref", "u_ref")]
        if value is not None:
            comps = [ex.substitute(c, {self.action.parameter: value}) for c in comps]
        return ParametricFunction(domain, comps[0], comps[1], ("p",))

    def check_image(self, spec, value):
        w = self._acted(spec, value)
        ref = self._reference(spec, value, w.domain)
        grid = sample(w.domain, self.sc.grid)
        verdict = equivalent(w, ref, grid, grid, tol=spec.tolerance)
        self.add(self.label(spec, value), verdict.holds, verdict.max_defect, verdict.tolerance,
                 "image vs reference cloud")

    def check_consistency(self, spec, value):
        g, u = self.group(spec)(value), self.scalar(spec)
        res = self.sc.grid
        gu = classical_act(g, u, res)
        eq = equivalent(act(g, canonical_parametrize(u)), canonical_parametrize(gu),
                        sample(u.domain, res), sample(gu.domain, res), tol=spec.tolerance)
        self.add(self.label(spec, value, "images"), eq.holds, eq.max_defect, eq.tolerance,
                 "act(g, U_*) vs graph of the classical result")
        w = act(g, canonical_parametrize(u))
        rel = is_parametrization_of(w, gu, sample(u.domain, res))
        self.add(self.label(spec, value, "g U_* parametrizes gU"), rel.holds, rel.max_defect, rel.tolerance,
                 rel.detail)
        dtol = float(self.option(spec, "diagram_tolerance", required=False) or 1e-8)
        fwd, bwd = sandwich(g, u, res, dtol)
        self.add(self.label(spec, value, "g U_* = (gU)_* o alpha"), fwd.holds, fwd.max_defect, dtol)
        self.add(self.label(spec, value, "(gU)_* = g U_* o alpha^-1"), bwd.holds, bwd.max_defect, dtol)

    def check_noncommutation(self, spec, value):
        g, u = self.group(spec)(value), self.scalar(spec)
        tol = spec.tolerance if spec.tolerance is not None else 1e-9
        w = act(g, canonical_parametrize(u))
        gu = classical_act(g, u, self.sc.grid)
        want_dom = box(self.option(spec, "domain"), f"{spec.path}.domain")
        want_tr = box(self.option(spec, "transformed"), f"{spec.path}.transformed")

        def gap(a: OpenBox, b: OpenBox) -> float:
            return max(abs(x - y) for x, y in zip(a.lo + a.hi, b.lo + b.hi))

        d1, d2 = gap(w.domain, want_dom), gap(gu.domain, want_tr)
        self.add(self.label(spec, value, "parametric domain"), d1 <= tol, d1, tol, f"{w.domain}")
        self.add(self.label(spec, value, "classical domain"), d2 <= tol, d2, tol, f"{gu.domain}")
        differ = gap(w.domain, gu.domain)
        self.add(self.label(spec, value, "domains differ"), differ > tol, differ, tol,
                 f"{w.domain} vs {gu.domain}")
        rel = is_parametrization_of(w, gu, sample(w.domain, self.sc.grid))
        self.add(self.label(spec, value, "g U_* parametrizes gU"), rel.holds, rel.max_defect, rel.tolerance,
                 rel.detail)

    def check_projectable(self, spec, value):
        expected = boolean(self.option(spec, "expect"), f"{spec.path}.expect")
        got = is_projectable(self.group(spec))
        self.add(spec.kind, got == expected, detail=f"projectable={got}")

    def check_group_axioms(self, spec, value):
        action = self.group(spec)
        draws = int(self.option(spec, "draws", required=False) or TRIALS)
        n = int(self.option(spec, "points", required=False) or 10_000)
        tol = spec.tolerance if spec.tolerance is not None else 1e-9
        rng = rng_for(self.seed, self.sc.name, spec.index)
        self.outcomes.append(group_axiom_outcome(action, rng, draws, n, tol))

    def check_semigroup(self, spec, value):
        h = self._endomorphism(spec)
        v = self.parametric(spec)
        tol = spec.tolerance if spec.tolerance is not None else 1e-12
        grid = sample(v.domain, self.sc.grid)
        w = semigroup_act(h, v)
        image_cloud(w, grid)
        self.add("semigroup:total", True, detail=f"{h}")
        if "x_ref" in spec.options:
            ref = self._reference(spec, None, v.domain)
            d = float(np.max(np.abs(w(grid.points) - ref(grid.points))))
            self.add("semigroup:image", d <= tol, d, tol, "h o V vs reference")
        other = h
        if "x_other" in spec.options or "u_other" in spec.options:
            other = SmoothEndomorphism.from_source(self.option(spec, "x_other"), self.option(spec, "u_other"), "h'")
        d = associativity_defect(h, other, v, grid.points)
        self.add(f"semigroup:associativity with {other}", d <= tol, d, tol)

    def check_reparametrization(self, spec, value):
        u = self.scalar(spec)
        lam = box(self.option(spec, "source"), f"{spec.path}.source")
        phi_e = _const_expr(self.option(spec, "phi"), f"{spec.path}.phi", variables=("p",))
        phi = Witness((phi_e,), lam, u.domain, ("p",))
        v = reparametrize(u, phi)
        ustar = canonical_parametrize(u)
        res = self.sc.grid
        for name, verdict in (
            ("V parametrizes U", is_parametrization_of(v, u, sample(lam, res))),
            ("V <= U_* via phi", refines_with_witness(v, ustar, phi, sample(lam, res))),
            ("V ~ U_*", equivalent(v, ustar, sample(lam, res), sample(u.domain, res), tol=spec.tolerance)),
            ("V <= V via id", refines_with_witness(v, v, Witness.identity(lam), sample(lam, res))),
        ):
            self.add(f"reparametrization:{name}", verdict.holds, verdict.max_defect, verdict.tolerance,
                     verdict.detail)
        report = scan_invertibility(phi_e, "p", lam, res)
        self.add("reparametrization:phi not injective", report.verdict is Verdict.NOT_INVERTIBLE,
                 detail=str(report))

    def check_universal(self, spec, value):
        g, u = self.group(spec)(value), self.scalar(spec)
        tol = spec.tolerance if spec.tolerance is not None else 1e-8
        lam = box(self.option(spec, "source"), f"{spec.path}.source")
        psi_e = _const_expr(self.option(spec, "psi"), f"{spec.path}.psi", variables=("p",))
        inv_e = _const_expr(self.option(spec, "psi_inverse"), f"{spec.path}.psi_inverse", variables=("p",))
        for name, hyp, concl in universal_diagrams(g, u, psi_e, inv_e, lam, self.sc.grid, tol):
            ok = hyp.holds and concl.holds
            d = max(hyp.max_defect, concl.max_defect)
            self.add(self.label(spec, value, name), ok, d, tol,
                     f"hypothesis {hyp.max_defect:.3g}, conclusion {concl.max_defect:.3g}")

    def run(self):
        for spec in self.sc.checks:
            method = getattr(self, "check_" + spec.kind.replace("-", "_"))
            once = spec.kind in ("projectable", "group-axioms", "semigroup", "reparametrization")
            for value in ([None] if once else self.values(spec)):
                try:
                    method(spec, value)
                except ConfigError:
                    raise
                except LieParamError as e:
                    self.add(self.label(spec, value), False, detail=f"{type(e).__name__}: {e}")
        return self.outcomes


def validate(sc: Scenario) -> None:
    """Raise ConfigError for scenarios that cannot run (before any check executes)."""
    run = _Run(sc, 0)
    if not sc.checks:
        raise ConfigError("scenario declares no [check] blocks", sc.origin)
    for spec in sc.checks:
        if spec.kind in ("alpha", "classical", "deparametrize"):
            run.verdict_option(spec)
        if spec.kind in ("alpha", "classical", "classical-identity", "consistency", "noncommutation", "universal"):
            run.scalar(spec)
            run.group(spec)
            run.values(spec)
        if spec.kind in ("projectable", "group-axioms"):
            run.group(spec)
        if spec.kind == "semigroup":
            run._endomorphism(spec)
            run.parametric(spec)


def run_scenario(sc: Scenario, seed: int = 0) -> Report:
    validate(sc)
    t0 = time.perf_counter()
    outcomes = _Run(sc, seed).run()
    return Report(sc.name, sc.reference, seed, outcomes, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Building blocks shared by scenarios and suites

def reparametrize(u: ScalarFunction, phi: Witness) -> ParametricFunction:
    """V = U_* o phi = (phi, U o phi), built symbolically."""
    x = u.variables[0]
    first = phi.maps[0]
    return ParametricFunction(phi.source, first, ex.substitute(u.body, {x: first}), phi.variables, validate=False)


def associativity_defect(h: SmoothEndomorphism, h2: SmoothEndomorphism, v, points) -> float:
    """Largest gap among (h o h2) V, h (h2 V) and the pointwise composite h(h2(V(p)))."""
    a = semigroup_act(compose(h, h2), v)(points)
    b = semigroup_act(h, semigroup_act(h2, v))(points)
    c = h(h2(v(points)))
    return float(max(np.max(np.abs(a - b)), np.max(np.abs(a - c))))


def group_axiom_outcome(action: GroupAction, rng: np.random.Generator, draws: int, n_points: int,
                        tol: float, eps_range=(-2.0, 2.0), half_width: float = 3.0) -> CheckOutcome:
    pts = rng.uniform(-half_width, half_width, size=(n_points, action.dim + 1))
    pairs = rng.uniform(*eps_range, size=(draws, 2))
    ident = identity_defect(action, pts)
    add = np.array([additivity_defect(action, a, b, pts) for a, b in pairs])
    k = int(np.argmax(add))
    worst = max(ident, float(add[k]))
    name = f"group-axioms:{action.name}"
    detail = f"{draws} pairs x {n_points} points, identity {ident:.3g}"
    if worst <= tol:
        return CheckOutcome(name, True, worst, tol, detail)
    a, b = pairs[k]
    s = shrink_magnitude(lambda t: additivity_defect(action, t * a, t * b, pts) > tol)
    return CheckOutcome(name, False, worst, tol, f"{detail}; shrunk counterexample eps=({s * a:.6g}, {s * b:.6g})")


def universal_diagrams(g, u: ScalarFunction, psi: ex.Expr, psi_inv: ex.Expr, source: OpenBox,
                       resolution: int, tol: float):
    """The four lifting diagrams relating V = U_* o psi to U_* and (gU)_*.

    Yields (name, hypothesis verdict, conclusion verdict).  Each diagram is
    checked on a case where the hypothesis holds, so a passing pair realizes
    the implication on samples.
    """
    x = u.variables[0]
    gu = classical_act(g, u, resolution)
    psi_map = Witness((psi,), source, u.domain, ("p",))
    psi_inv_map = Witness((psi_inv,), u.domain, source, ("p",))
    v = ParametricFunction(source, psi, ex.substitute(u.body, {x: psi}), ("p",), validate=False)
    alpha = Witness((gu.forward,), u.domain, gu.domain, (x,))
    alpha_inv = inverse_map(gu)
    ustar = canonical_parametrize(u)
    gustar = canonical_parametrize(gu)
    g_ustar = act(g, ustar)
    g_v = act(g, v)
    grid_src = sample(source, resolution)
    grid_dom = sample(u.domain, resolution)
    grid_tr = sample(gu.domain, resolution)

    lam = compose_maps(psi_inv_map, alpha_inv)
    yield ("lift over (gU)_*",
           check_commutes(gustar, lam, g_v, grid_tr, tol),
           check_commutes(ustar, compose_maps(lam, alpha), v, grid_dom, tol))
    lam = compose_maps(alpha, psi_map)
    yield ("factor through (gU)_*",
           check_commutes(g_v, lam, gustar, grid_src, tol),
           check_commutes(v, compose_maps(alpha_inv, lam), ustar, grid_src, tol))
    yield ("lift over g U_*",
           check_commutes(g_ustar, psi_inv_map, g_v, grid_dom, tol),
           check_commutes(ustar, psi_inv_map, v, grid_dom, tol))
    yield ("factor through g U_*",
           check_commutes(g_v, psi_map, g_ustar, grid_src, tol),
           check_commutes(v, psi_map, ustar, grid_src, tol))


def random_polynomial(rng: np.random.Generator, var: str | ex.Expr, degree: int, scale: float = 1.0) -> ex.Expr:
    """sum_k c_k var^k with c_k uniform in (-scale, scale), k = 0..degree."""
    t = ex.Variable(var) if isinstance(var, str) else var
    coeffs = rng.uniform(-scale, scale, size=degree + 1)
    out: ex.Expr = ex.Constant(float(coeffs[0]))
    for k in range(1, degree + 1):
        out = out + ex.Constant(float(coeffs[k])) * ex.power(t, k)
    return out


# ---------------------------------------------------------------------------
# Randomized suites


def suite_action_totality(seed: int, trials: int = TRIALS) -> list[CheckOutcome]:
    rng = rng_for(seed, "action-totality")
    families = sorted(BUILTIN_ACTIONS)
    lam = OpenBox.interval(-1.0, 1.0)
    grid = sample(lam, 256)
    failures = []
    counts = dict.fromkeys(families, 0)
    for i in range(trials):
        fam = families[int(rng.integers(len(families)))]
        counts[fam] += 1
        value = float(rng.uniform(-2.0, 2.0))
        v = ParametricFunction(lam, random_polynomial(rng, "p", int(rng.integers(0, 6))),
                               random_polynomial(rng, "p", int(rng.integers(0, 6))), ("p",))
        action = BUILTIN_ACTIONS[fam]()

        def fails(t, action=action, v=v, value=value):
            try:
                image_cloud(act(action(t * value), v), grid)
                return False
            except (LieParamError, ValueError):
                return True

        if fails(1.0):
            s = shrink_magnitude(fails)
            failures.append(f"trial {i}: {fam} at {s * value:.6g}")
    detail = ", ".join(f"{k}={n}" for k, n in counts.items())
    if failures:
        detail += "; " + "; ".join(failures[:5])
    return [CheckOutcome(f"act(g, V) total on {trials} random pairs", not failures, float(len(failures)), 0.0,
                         detail)]


def suite_group_axioms(seed: int, trials: int = TRIALS, points: int = 10_000) -> list[CheckOutcome]:
    out = []
    for fam in sorted(BUILTIN_ACTIONS):
        rng = rng_for(seed, "group-axioms", fam)
        out.append(group_axiom_outcome(BUILTIN_ACTIONS[fam](), rng, trials, points, 1e-9))
    return out


def _fold_families():
    """Folding reparametrizations phi with phi(Lambda) = Delta open (extremes at the ends)."""
    cubic = ex.parse("p^3 - p", variables=["p"])
    wave = ex.parse("sin(3*p) + 2*p", variables=["p"])
    out = []
    for name, e, half in (("p^3-p", cubic, 1.5), ("sin(3p)+2p", wave, 2.0)):
        r = float(ex.evaluate(e, {"p": half}))
        out.append((name, e, OpenBox.interval(-half, half), OpenBox.interval(-r, r)))
    return out


def suite_parametrization_relations(seed: int, pairs: int = 50, separations: int = TRIALS,
                                    resolution: int = 1024) -> list[CheckOutcome]:
    rng = rng_for(seed, "parametrization-relations")
    families = _fold_families()
    disagreements, wrong, unwitnessed, refined = [], [], [], 0
    kinds = {"graph": 0, "offset": 0, "shrunk": 0}
    for i in range(pairs):
        fam, phi_e, lam, delta = families[i % len(families)]
        r = delta.hi[0]
        u = ScalarFunction(delta, random_polynomial(rng, ex.Variable("x") / ex.Constant(r), int(rng.integers(1, 4))))
        kind = ("graph", "offset", "shrunk")[int(rng.integers(3))]
        kinds[kind] += 1
        phi = Witness((phi_e,), lam, delta, ("p",))
        v = reparametrize(u, phi)
        if kind == "offset":
            c = float(rng.uniform(1.0, 2.0)) * (1 if rng.random() < 0.5 else -1)
            v = ParametricFunction(lam, v.first, v.second + ex.Constant(c), ("p",), validate=False)
        elif kind == "shrunk":
            phi = Witness((ex.Constant(0.5) * phi_e,), lam, delta, ("p",))
            v = reparametrize(u, phi)
        grid = sample(lam, resolution)
        ustar = canonical_parametrize(u)
        by_graph = is_parametrization_of(v, u, grid).holds
        by_image = equivalent(v, ustar, grid, sample(delta, resolution)).holds
        witnessed = refines_with_witness(v, ustar, phi, grid).holds
        if by_graph != by_image:
            disagreements.append(f"pair {i} ({fam}, {kind})")
        if by_graph != (kind == "graph"):
            wrong.append(f"pair {i} ({fam}, {kind})")
        if witnessed:
            refined += 1
            if not by_image:
                unwitnessed.append(f"pair {i} ({fam}, {kind})")
        elif kind == "graph":
            unwitnessed.append(f"pair {i} ({fam}): witness rejected")
    mix = ", ".join(f"{k}={n}" for k, n in kinds.items())
    out = [
        CheckOutcome(f"graph and image criteria agree on {pairs} pairs", not disagreements,
                     float(len(disagreements)), 0.0, "; ".join(disagreements[:5]) or mix),
        CheckOutcome("verdicts match construction", not wrong, float(len(wrong)), 0.0,
                     "; ".join(wrong[:5]) or mix),
        CheckOutcome(f"witnessed refinements are equivalences ({refined})", not unwitnessed,
                     float(len(unwitnessed)), 0.0, "; ".join(unwitnessed[:5])),
    ]

    delta = OpenBox.interval(-1.0, 1.0)
    grid = sample(delta, 1024)
    ident = Witness.identity(delta)
    bad = []
    for i in range(separations):
        deg = int(rng.integers(0, 6))
        state = rng.bit_generator.state
        p1 = random_polynomial(rng, "x", deg)
        same = i % 2 == 0
        if same:
            # rebuild from the same draws: equal functions, distinct objects
            rng.bit_generator.state = state
            p2 = random_polynomial(rng, "x", deg)
        else:
            k = int(rng.integers(0, deg + 1))
            delta_c = float(rng.uniform(0.1, 1.0)) * (1 if rng.random() < 0.5 else -1)
            p2 = p1 + ex.Constant(delta_c) * ex.power(ex.Variable("x"), k)
        u1, u2 = ScalarFunction(delta, p1), ScalarFunction(delta, p2)
        holds = refines_with_witness(canonical_parametrize(u1), canonical_parametrize(u2), ident, grid).holds
        if holds != same:
            bad.append(f"pair {i} (equal={same})")
    out.append(CheckOutcome(f"U1_* <= U2_* iff U1 = U2 on {separations} pairs", not bad, float(len(bad)), 0.0,
                            "; ".join(bad[:5])))
    return out


def suite_round_trips(seed: int, trials: int = TRIALS) -> list[CheckOutcome]:
    rng = rng_for(seed, "round-trips")
    delta = OpenBox.interval(-2.0, 2.0)
    grid = sample(delta, 1024)
    worst, at = 0.0, ""
    for i in range(trials):
        u = ScalarFunction(delta, random_polynomial(rng, "x", int(rng.integers(0, 6))))
        try:
            f = try_deparametrize(canonical_parametrize(u))
            d = float(np.max(np.abs(f(grid.points[:, 0]) - u(grid.points))))
            d = max(d, *(abs(a - b) for a, b in zip(f.domain.lo + f.domain.hi, delta.lo + delta.hi)))
        except LieParamError as e:
            d, at = math.inf, f"trial {i}: {e}"
        if d > worst:
            worst, at = d, at if math.isinf(d) else f"trial {i}"
    out = [CheckOutcome(f"deparametrize o canonical = id on {trials} polynomials", worst <= 1e-10, worst, 1e-10, at)]

    lam = OpenBox.interval(-1.0, 1.0)
    worst_rel, at = 0.0, ""
    h = 1e-5
    for i in range(trials):
        a, b = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.0, 1.0))
        first = ex.Constant(a) * ex.Variable("p") + ex.Constant(b) * ex.power(ex.Variable("p"), 3)
        v = ParametricFunction(lam, first, random_polynomial(rng, "p", int(rng.integers(1, 6))), ("p",))
        f = try_deparametrize(v)
        for p in rng.uniform(-0.9, 0.9, size=5):
            x = float(ex.evaluate(first, {"p": p}))
            fd = float((f(np.array([x + h])) - f(np.array([x - h])))[0] / (2 * h))
            slope = parametric_derivative(v, p)
            rel = abs(slope - fd) / max(1.0, abs(fd))
            if rel > worst_rel:
                worst_rel, at = rel, f"trial {i}, p={p:.6g}"
    out.append(CheckOutcome(f"parametric slope vs finite differences ({trials} curves)", worst_rel <= 1e-6,
                            worst_rel, 1e-6, at))
    return out


_H1_POOL = ("x^2", "sin(x)", "x^3 - x", "x*u", "u^2", "cos(x + u)", "x")
_H2_POOL = ("u", "x^2 + u", "sin(u)", "exp(x)*u", "x*u^2", "u^3", "x - u")
_NONINVERTIBLE_H1 = {"x^2", "sin(x)", "x^3 - x", "u^2", "cos(x + u)"}


def suite_semigroup(seed: int, trials: int = TRIALS) -> list[CheckOutcome]:
    rng = rng_for(seed, "semigroup-random")
    lam = OpenBox.interval(-1.0, 1.0)
    grid = sample(lam, 256)
    worst, at, failures, folding = 0.0, "", [], 0

    def pick(pool):
        return pool[int(rng.integers(len(pool)))]

    for i in range(trials):
        x1, x2 = pick(_H1_POOL), pick(_H2_POOL)
        folding += x1 in _NONINVERTIBLE_H1
        h = SmoothEndomorphism.from_source(x1, x2, "h")
        h_other = SmoothEndomorphism.from_source(pick(_H1_POOL), pick(_H2_POOL), "h'")
        v = ParametricFunction(lam, random_polynomial(rng, "p", int(rng.integers(0, 4)), 0.5),
                               random_polynomial(rng, "p", int(rng.integers(0, 4)), 0.5), ("p",))
        try:
            image_cloud(semigroup_act(h, v), grid)
            d = associativity_defect(h, h_other, v, grid.points)
        except (LieParamError, ValueError) as e:
            failures.append(f"trial {i}: {e}")
            continue
        if d > worst:
            worst, at = d, f"trial {i}: {h} after {h_other}"
    return [
        CheckOutcome(f"h V total on {trials} random pairs ({folding} with folding h1)", not failures,
                     float(len(failures)), 0.0, "; ".join(failures[:5])),
        CheckOutcome("associativity (h h') V = h (h' V)", worst <= 1e-12 and not failures, worst, 1e-12, at),
    ]


SUITES: dict[str, tuple[str, Callable[[int], list[CheckOutcome]]]] = {
    "action-totality": ("parametric action is total for every builtin family", suite_action_totality),
    "group-axioms": ("sampled identity and additivity laws", suite_group_axioms),
    "parametrization-relations": ("preorder, equivalence and separation of canonical forms",
                                  suite_parametrization_relations),
    "round-trips": ("graph recovery and parametric slopes", suite_round_trips),
    "semigroup-random": ("endomorphisms act totally and associatively", suite_semigroup),
}


def run_suite(name: str, seed: int = 0) -> Report:
    reference, fn = SUITES[name]
    t0 = time.perf_counter()
    outcomes = fn(seed)
    return Report(name, reference, seed, outcomes, time.perf_counter() - t0)


def available() -> list[str]:
    return sorted(builtin_scenarios()) + sorted(SUITES)


def run_named(name: str, seed: int = 0) -> list[Report]:
    """Run "all", one builtin scenario or one suite; unknown names raise ConfigError."""
    if name == "all":
        return run_all(seed)
    scenarios = builtin_scenarios()
    if name in scenarios:
        return [run_scenario(scenarios[name], seed)]
    if name in SUITES:
        return [run_suite(name, seed)]
    raise ConfigError(f"unknown suite {name!r}; choose 'all' or one of: {', '.join(available())}", "suite")


def run_all(seed: int = 0) -> list[Report]:
    reports = [run_scenario(sc, seed) for _, sc in sorted(builtin_scenarios().items())]
    reports += [run_suite(name, seed) for name in sorted(SUITES)]
    return reports
