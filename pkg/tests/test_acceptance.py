"""Acceptance criteria, one test per criterion.

Each test records a ``PASS n: ...`` / ``FAIL n: ...`` line; conftest prints
them together at the end of the run.  Geometric comparisons use a plain
numpy brute-force Hausdorff distance rather than the library's own.
"""
import math
import subprocess
import sys

import numpy as np
import pytest

from lieparam import harness
from lieparam.actions import (
    act,
    alpha_map,
    classical_act,
    quadratic_shear,
    rotation,
    scaling,
    semigroup_act,
    shear,
    translation,
    SmoothEndomorphism,
)
from lieparam.analysis import is_parametrization_of, sandwich, try_deparametrize
from lieparam.errors import NotGraph, NotInvertible
from lieparam.functions import ParametricFunction, ScalarFunction, canonical_parametrize, image_cloud
from lieparam.geometry import OpenBox, sample


@pytest.fixture
def criterion(record_property):
    def report(n: int, ok: bool, text: str):
        line = f"{'PASS' if ok else 'FAIL'} {n}: {text}"
        record_property("criterion", line)
        print(line)
        assert ok, line
    return report


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    def directed(x, y):
        worst = 0.0
        for i in range(0, len(x), 256):
            d = np.sqrt(((x[i:i + 256, None, :] - y[None, :, :]) ** 2).sum(axis=2))
            worst = max(worst, float(d.min(axis=1).max()))
        return worst
    return max(directed(a, b), directed(b, a))


def spacing(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(a, axis=0), axis=1).max())


def test_criterion_1_quadratic_shear(criterion):
    u = ScalarFunction.from_source("x", OpenBox.interval(-3, 3))
    errors = []
    for eps in (0.5, -0.5, 1.0):
        _, report = alpha_map(quadratic_shear()(eps), u)
        assert report.verdict.value == "NotInvertible"
        errors.append(abs(report.witness - (-1 / (2 * eps))))
    _, report = alpha_map(quadratic_shear()(0.0), u)
    gu = classical_act(quadratic_shear()(0.0), u)
    xs = sample(u.domain, 1024).points[:, 0]
    ident = float(np.max(np.abs(gu(xs) - xs)))
    ok = (max(errors) <= 0.01 and report.verdict.value == "Invertible" and ident <= 1e-12
          and gu.domain == u.domain)
    criterion(1, ok, f"alpha witness error {max(errors):.2e} <= 0.01; eps=0 identity defect {ident:.1e} <= 1e-12")


def test_criterion_2_rotated_parabola(criterion):
    u = ScalarFunction.from_source("x^2", OpenBox.interval(-2, 2))
    theta = math.pi / 4
    g = rotation()(theta)
    with pytest.raises(NotInvertible):
        classical_act(g, u)
    with pytest.raises(NotGraph) as info:
        try_deparametrize(act(g, canonical_parametrize(u)))
    witness = info.value.report.witness
    # oracle: V1(p) = p cos(theta) - p^2 sin(theta) peaks where its slope vanishes
    p = np.linspace(-2, 2, 400001)
    peak = float(p[np.argmax(p * math.cos(theta) - p**2 * math.sin(theta))])
    analytic = 1 / (2 * math.tan(theta))

    grid = sample(u.domain, 2048)
    img = image_cloud(act(rotation()(math.pi), canonical_parametrize(u)), grid).points
    x = grid.points[:, 0]
    reflected = np.column_stack([-x, -(x**2)])
    d = hausdorff(img, reflected)
    tol = 2 * spacing(reflected)
    ok = abs(witness - analytic) <= 0.01 and abs(peak - analytic) <= 1e-4 and d <= tol
    criterion(2, ok, f"fold witness {witness:.6f} vs cot(theta)/2 = {analytic:.6f}; "
                     f"theta=pi image distance {d:.1e} <= {tol:.1e}")


def test_criterion_3_action_totality(criterion):
    rep = harness.run_suite("action-totality", 0)
    out = rep.outcomes[0]
    criterion(3, rep.passed, f"{out.name}: {out.detail}")


def test_criterion_4_group_axioms(criterion):
    a = harness.run_suite("group-axioms", 0)
    b = harness.run_suite("group-axioms", 0)
    same = [o.to_json() for o in a.outcomes] == [o.to_json() for o in b.outcomes]
    worst = max(o.defect for o in a.outcomes)
    ok = a.passed and same and len(a.outcomes) == 5
    criterion(4, ok, f"5 families, 100 draws x 1e4 points, worst defect {worst:.1e} <= 1e-9, repeatable={same}")


def test_criterion_5_consistency(criterion):
    cases = [
        (translation(), "x^3 - x", (-2, 2), (-1.5, 0.7, 2.0)),
        (shear(), "x", (-3, 3), (-0.85, -0.5, 0.3, 0.85)),
        (scaling(), "x^2 - 1", (-2, 2), (-1.0, 0.5, 1.0)),
    ]
    worst_ratio, worst_diagram = 0.0, 0.0
    for family, src, dom, values in cases:
        u = ScalarFunction.from_source(src, OpenBox.interval(*dom))
        for eps in values:
            g = family(eps)
            gu = classical_act(g, u)
            img = image_cloud(act(g, canonical_parametrize(u)), sample(u.domain, 2048)).points
            xs = sample(gu.domain, 2048).points[:, 0]
            graph = np.column_stack([xs, gu(xs)])
            tol = 2 * max(spacing(img), spacing(graph))
            worst_ratio = max(worst_ratio, hausdorff(img, graph) / tol)
            fwd, back = sandwich(g, u, resolution=2048)
            worst_diagram = max(worst_diagram, fwd.max_defect, back.max_defect)
    ok = worst_ratio <= 1 and worst_diagram <= 1e-8
    criterion(5, ok, f"10 cases: image distance / tolerance <= {worst_ratio:.2f}; "
                     f"diagram defect {worst_diagram:.1e} <= 1e-8")


def test_criterion_6_noncommutation(criterion):
    u = ScalarFunction.from_source("x", OpenBox.interval(-3, 3))
    g = shear()(1.0)
    v = act(g, canonical_parametrize(u))
    gu = classical_act(g, u)
    rel = is_parametrization_of(v, gu)
    ok = (v.domain == OpenBox.interval(-3, 3) and gu.domain == OpenBox.interval(-6, 6)
          and v.domain != gu.domain and rel.holds)
    criterion(6, ok, f"act domain {v.domain} != classical domain {gu.domain}; "
                     f"parametrization defect {rel.max_defect:.1e}")


def test_criterion_7_parametrization_relations(criterion):
    rep = harness.run_suite("parametrization-relations", 0)
    criterion(7, rep.passed and len(rep.outcomes) == 4, "; ".join(o.name for o in rep.outcomes))


def test_criterion_8_round_trips(criterion):
    rep = harness.run_suite("round-trips", 0)
    # independent oracle: numpy polynomial evaluation on a fresh draw
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        coef = rng.normal(size=rng.integers(1, 7))
        src = " + ".join(f"({float(c)!r})*x^{k}" for k, c in enumerate(coef))
        u = ScalarFunction.from_source(src, OpenBox.interval(-2, 2))
        f = try_deparametrize(canonical_parametrize(u))
        xs = sample(f.domain, 1024).points[:, 0]
        worst = max(worst, float(np.max(np.abs(f(xs) - np.polynomial.polynomial.polyval(xs, coef)))))
    slope = rep.outcomes[1]
    ok = rep.passed and worst <= 1e-10
    criterion(8, ok, f"recovery error {worst:.1e} <= 1e-10; slope rel. error {slope.defect:.1e} <= 1e-6")


def test_criterion_9_semigroup(criterion):
    rep = harness.run_suite("semigroup-random", 0)
    # direct oracle for the two named noninvertible endomorphisms
    v = ParametricFunction.from_source("p", "p^3 - p", OpenBox.interval(-1, 1))
    ps = sample(v.domain, 1000).points[:, 0]
    h_sq = SmoothEndomorphism.from_source("x^2", "u", "square")
    h_sin = SmoothEndomorphism.from_source("sin(x)", "u", "sine")
    w = semigroup_act(h_sq, semigroup_act(h_sin, v))(ps)
    oracle = np.column_stack([np.sin(ps) ** 2, ps**3 - ps])
    direct = float(np.max(np.abs(w - oracle)))
    assoc = rep.outcomes[1].defect
    ok = rep.passed and direct <= 1e-12
    criterion(9, ok, f"100 random pairs total; associativity {assoc:.1e} <= 1e-12; x^2 after sin x {direct:.1e}")


def test_criterion_10_determinism(criterion, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        proc = subprocess.run([sys.executable, "-m", "lieparam", "verify", "all", "--seed", "0", "--out", str(path)],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        outs.append(path.read_bytes())
    criterion(10, outs[0] == outs[1], f"verify all --seed 0 exit 0 twice; JSON identical ({len(outs[0])} bytes)")
