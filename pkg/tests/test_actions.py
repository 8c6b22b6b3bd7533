import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieparam import expr as ex
from lieparam.actions import (
    BUILTIN_ACTIONS,
    GroupAction,
    SmoothEndomorphism,
    act,
    additivity_defect,
    alpha_map,
    apply_point,
    classical_act,
    compose,
    identity_defect,
    identity_endomorphism,
    is_projectable,
    projectable_act,
    quadratic_shear,
    rotation,
    scaling,
    semigroup_act,
    shear,
    translation,
)
from lieparam.errors import Inconclusive, NotInvertible, NotProjectable, UnboundSymbol, Unsupported
from lieparam.functions import ParametricFunction, ScalarFunction, canonical_parametrize, image_cloud
from lieparam.geometry import OpenBox, sample

I3 = OpenBox.interval(-3, 3)
I2 = OpenBox.interval(-2, 2)
LINE = ScalarFunction.from_source("x", I3)
PARABOLA = ScalarFunction.from_source("x^2", I2)

# closed forms, written independently of the expression machinery
CLOSED = {
    "rotation": lambda t, x, u: (x * np.cos(t) - u * np.sin(t), x * np.sin(t) + u * np.cos(t)),
    "quadratic-shear": lambda e, x, u: (x + e * u**2, u),
    "shear": lambda e, x, u: (x + e * u, u),
    "translation": lambda e, x, u: (x + e, u),
    "scaling": lambda e, x, u: (x, np.exp(e) * u),
}


def test_apply_point_examples():
    assert apply_point(quadratic_shear()(0.5), (1, 2)) == (3.0, 2.0)
    x, u = apply_point(rotation()(np.pi / 2), (1, 0))
    assert x == pytest.approx(0, abs=1e-15) and u == pytest.approx(1)


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
def test_builtin_matches_closed_form(name):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3, 3, (200, 2))
    for e in rng.uniform(-2, 2, 5):
        want = np.column_stack(CLOSED[name](e, pts[:, 0], pts[:, 1]))
        assert np.allclose(BUILTIN_ACTIONS[name]()(e)(pts), want, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
def test_identity_element(name):
    a = BUILTIN_ACTIONS[name]()
    pts = np.random.default_rng(2).uniform(-3, 3, (1000, 2))
    assert identity_defect(a, pts) <= 1e-12


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
@given(a=st.floats(-2, 2), b=st.floats(-2, 2))
def test_additive_law(name, a, b):
    pts = np.random.default_rng(3).uniform(-3, 3, (100, 2))
    assert additivity_defect(BUILTIN_ACTIONS[name](), a, b, pts) <= 1e-9


@pytest.mark.parametrize("name, expected", [("translation", True), ("scaling", True),
                                            ("quadratic-shear", False), ("rotation", False), ("shear", False)])
def test_projectability(name, expected):
    assert is_projectable(BUILTIN_ACTIONS[name]()) is expected


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
def test_projectability_ignores_parameter_name(name):
    a = BUILTIN_ACTIONS[name]()
    assert is_projectable(a.rename_parameter("zeta")) == is_projectable(a)


def test_group_action_symbol_check():
    with pytest.raises(UnboundSymbol):
        GroupAction.from_source("bad", "eps", "x + k*u", "u")


def test_alpha_example_2_1():
    alpha, report = alpha_map(quadratic_shear()(0.5), LINE)
    assert ex.evaluate(alpha, {"x": 2.0}) == 4.0
    assert report.verdict.value == "NotInvertible"
    assert report.witness == pytest.approx(-1.0, abs=1e-9)


def test_alpha_linear_shear_invertible():
    _, report = alpha_map(shear()(1.0), LINE)
    assert report.verdict.value == "Invertible"


def test_alpha_rotated_parabola():
    _, report = alpha_map(rotation()(np.pi / 4), PARABOLA)
    assert report.verdict.value == "NotInvertible"


def test_classical_linear_shear():
    gu = classical_act(shear()(1.0), LINE)
    assert gu.domain == OpenBox.interval(-6, 6)
    xs = np.linspace(-5.9, 5.9, 41)
    assert np.allclose(gu(xs), xs / 2, rtol=0, atol=1e-12)


@given(st.floats(-2, 2))
def test_classical_translation_shifts(eps):
    u = ScalarFunction.from_source("x^3 - x", I2)
    gu = classical_act(translation()(eps), u)
    xs = sample(gu.domain, 101).points[:, 0]
    assert np.allclose(gu(xs), (xs - eps) ** 3 - (xs - eps), rtol=0, atol=1e-10)


def test_classical_refuses_fold():
    with pytest.raises(NotInvertible) as info:
        classical_act(quadratic_shear()(0.5), LINE)
    assert info.value.report.witness == pytest.approx(-1.0, abs=1e-9)


def test_classical_refuses_degenerate():
    # shear by 1 cancels the linear term: alpha(x) = x + U(x) = x^3/3
    u = ScalarFunction.from_source("-x + x^3/3", OpenBox.interval(-1, 1))
    with pytest.raises(Inconclusive):
        classical_act(shear()(1.0), u)


def test_classical_identity():
    gu = classical_act(quadratic_shear()(0.0), LINE)
    xs = sample(I3, 1024).points[:, 0]
    assert gu.domain == I3
    assert np.max(np.abs(gu(xs) - xs)) <= 1e-12


def test_projectable_act_examples():
    u = PARABOLA
    gu = projectable_act(translation()(1.0), u)
    xs = sample(gu.domain, 200).points[:, 0]
    assert np.allclose(gu(xs), (xs - 1) ** 2, rtol=0, atol=1e-12)
    assert np.max(np.abs(gu(xs) - classical_act(translation()(1.0), u)(xs))) <= 1e-10
    sc = projectable_act(scaling()(0.7), u)
    assert sc.domain == u.domain
    xs = sample(u.domain, 200).points[:, 0]
    assert np.allclose(sc(xs), np.exp(0.7) * xs**2, rtol=1e-12)


def test_projectable_act_rejects_nonprojectable():
    with pytest.raises(NotProjectable):
        projectable_act(rotation()(0.3), PARABOLA)


def test_act_rotation_quarter_turn():
    v = act(rotation()(np.pi / 2), canonical_parametrize(PARABOLA))
    ps = sample(I2, 50).points
    assert np.allclose(v(ps), np.column_stack([-ps[:, 0] ** 2, ps[:, 0]]), atol=1e-15)
    assert v.domain == I2


def test_act_example_2_1():
    v = act(quadratic_shear()(1.0), canonical_parametrize(LINE))
    ps = sample(I3, 50).points[:, 0]
    assert np.allclose(v(ps), np.column_stack([ps + ps**2, ps]), rtol=0, atol=1e-15)


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
def test_act_at_identity_is_noop(name):
    v = ParametricFunction.from_source("p^3 - p", "sin(p)", I2)
    ps = sample(I2, 1000).points
    assert np.max(np.abs(act(BUILTIN_ACTIONS[name]().identity, v)(ps) - v(ps))) <= 1e-12


@pytest.mark.parametrize("name", sorted(BUILTIN_ACTIONS))
@given(a=st.floats(-1.5, 1.5), b=st.floats(-1.5, 1.5))
def test_parametric_action_is_a_group_action(name, a, b):
    g = BUILTIN_ACTIONS[name]()
    v = ParametricFunction.from_source("p^3 - p", "cos(2*p)", I2)
    ps = sample(I2, 1000).points
    twice = act(g(a), act(g(b), v))(ps)
    once = act(g(a + b), v)(ps)
    assert np.max(np.abs(twice - once)) <= 1e-9


def test_act_is_total_where_classical_fails():
    v = act(quadratic_shear()(0.5), canonical_parametrize(LINE))
    assert len(image_cloud(v, sample(I3, 256))) == 256


def test_semigroup_square():
    h = SmoothEndomorphism.from_source("x^2", "u", "square")
    v = ParametricFunction.from_source("p", "p^3", OpenBox.interval(-1, 1))
    w = semigroup_act(h, v)
    assert w.components == (ex.IntPow(ex.Variable("p"), 2), ex.IntPow(ex.Variable("p"), 3))


def test_semigroup_identity():
    v = ParametricFunction.from_source("p", "p^3", OpenBox.interval(-1, 1))
    ps = sample(v.domain, 100).points
    assert np.array_equal(semigroup_act(identity_endomorphism(), v)(ps), v(ps))


def test_semigroup_composition_on_1000_samples():
    h1 = SmoothEndomorphism.from_source("sin(x)", "x*u", "h1")
    h2 = SmoothEndomorphism.from_source("x^2 - u", "u^3", "h2")
    v = ParametricFunction.from_source("p", "p^2 - 1", OpenBox.interval(-1, 1))
    ps = sample(v.domain, 1000).points
    lhs = semigroup_act(compose(h1, h2), v)(ps)
    rhs = semigroup_act(h1, semigroup_act(h2, v))(ps)
    oracle = np.column_stack([np.sin(ps[:, 0] ** 2 - (ps[:, 0] ** 2 - 1)),
                              (ps[:, 0] ** 2 - (ps[:, 0] ** 2 - 1)) * (ps[:, 0] ** 2 - 1) ** 3])
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    assert np.max(np.abs(lhs - oracle)) <= 1e-12


def test_numeric_functions_can_be_acted_on():
    gu = classical_act(shear()(1.0), LINE)
    w = act(translation()(2.0), canonical_parametrize(gu))
    xs = sample(gu.domain, 20).points
    out = w(xs)
    assert np.allclose(out[:, 0], xs[:, 0] + 2) and np.allclose(out[:, 1], xs[:, 0] / 2)


def test_two_dimensional_alpha_unsupported():
    a = GroupAction.from_source("t2", "eps", ["x1 + eps", "x2"], "u", n=2)
    u = ScalarFunction.from_source("x1 + x2", OpenBox((0, 0), (1, 1)))
    with pytest.raises(Unsupported):
        alpha_map(a(1.0), u)
