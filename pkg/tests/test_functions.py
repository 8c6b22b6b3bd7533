import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieparam import expr as ex
from lieparam.errors import DomainFault, SingularParametrization, UnboundSymbol, Unsupported
from lieparam.functions import (
    ParametricFunction,
    ScalarFunction,
    canonical_parametrize,
    graph_cloud,
    image_cloud,
    parametric_derivative,
)
from lieparam.geometry import OpenBox, sample, symmetric_distance

I2 = OpenBox.interval(-2, 2)


def test_canonical_parabola():
    v = canonical_parametrize(ScalarFunction.from_source("x^2", I2))
    assert v.domain == I2
    assert v.first == (ex.Variable("p"),)
    assert v.second == ex.IntPow(ex.Variable("p"), 2)


def test_canonical_identity():
    v = canonical_parametrize(ScalarFunction.from_source("x", I2))
    assert v.components == (ex.Variable("p"), ex.Variable("p"))


def test_graph_cloud_values():
    u = ScalarFunction.from_source("x^2", I2)
    pts = graph_cloud(u, sample(I2, 4)).points
    assert pts.tolist() == [[-1.5, 2.25], [-0.5, 0.25], [0.5, 0.25], [1.5, 2.25]]


def test_zero_function_graph():
    pts = graph_cloud(ScalarFunction.from_source("0", I2), sample(I2, 8)).points
    assert np.all(pts[:, 1] == 0)


def test_image_cloud_examples():
    v = ParametricFunction.from_source("p", "p^2", OpenBox.interval(0, 1))
    assert image_cloud(v, sample(OpenBox.interval(0, 1), 2)).points[0].tolist() == [0.25, 0.0625]
    rot = ParametricFunction.from_source("-p^2", "p", OpenBox.interval(0, 2))
    assert image_cloud(rot, sample(OpenBox.interval(0, 2), 2)).points[1].tolist() == [-2.25, 1.5]


def test_constant_parametrization_repeats_point():
    v = ParametricFunction.from_source("1", "2", I2)
    pts = image_cloud(v, sample(I2, 5)).points
    assert np.all(pts == [1.0, 2.0])


def test_canonical_cloud_is_graph_cloud_against_direct_oracle():
    u = ScalarFunction.from_source("sin(3*x) + x^2", I2)
    g = sample(I2, 513)
    direct = np.column_stack([g.points[:, 0], np.sin(3 * g.points[:, 0]) + g.points[:, 0] ** 2])
    cloud = image_cloud(canonical_parametrize(u), g)
    assert np.allclose(cloud.points, direct, rtol=0, atol=1e-15)
    assert symmetric_distance(cloud, graph_cloud(u, g)) <= cloud.spacing()


def test_unbound_parameter_detected():
    with pytest.raises(UnboundSymbol) as info:
        ScalarFunction.from_source("a*x", I2)
    assert info.value.name == "a"


def test_parameters_bind():
    u = ScalarFunction.from_source("a*x + b", I2, {"a": 2.0, "b": 1.0})
    assert u(np.array([1.5]))[0] == 4.0


def test_validation_catches_negative_sqrt():
    with pytest.raises(DomainFault):
        ScalarFunction.from_source("sqrt(x)", I2)


def test_parametric_derivative_examples():
    v = ParametricFunction.from_source("p", "p^2", I2)
    assert parametric_derivative(v, 1.0) == 2.0
    assert parametric_derivative(ParametricFunction.from_source("p", "3", I2), 0.7) == 0.0
    th = np.pi / 4
    rot = ParametricFunction.from_source("p*cos(t) - p^2*sin(t)", "p*sin(t) + p^2*cos(t)", I2, {"t": th})
    assert parametric_derivative(rot, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_rotated_slope_matches_local_graph_fd():
    th = np.pi / 4
    rot = ParametricFunction.from_source("p*cos(t) - p^2*sin(t)", "p*sin(t) + p^2*cos(t)", I2, {"t": th})
    # local inverse of x(p) near p = 0 in closed form: solve c p - s p^2 = x
    c, s = np.cos(th), np.sin(th)

    def local(x):
        p = (c - np.sqrt(c * c - 4 * s * x)) / (2 * s)
        return p * s + p * p * c

    h = 1e-6
    assert parametric_derivative(rot, 0.0) == pytest.approx((local(h) - local(-h)) / (2 * h), rel=1e-6)


def test_second_order():
    v = ParametricFunction.from_source("p", "p^2", I2)
    for p in np.linspace(-1.9, 1.9, 11):
        assert parametric_derivative(v, p, order=2) == pytest.approx(2.0, abs=1e-12)


def test_second_order_reparametrized_parabola():
    # x = p^3 + p, u = x^2: U'' = 2 everywhere
    v = ParametricFunction.from_source("p^3 + p", "(p^3 + p)^2", I2)
    for p in np.linspace(-1.5, 1.5, 9):
        assert parametric_derivative(v, p, order=2) == pytest.approx(2.0, rel=1e-12)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6), st.floats(-1.9, 1.9))
def test_canonical_slope_is_exact_derivative(coeffs, p):
    body = " + ".join(f"({c!r})*x^{k}" for k, c in enumerate(coeffs))
    u = ScalarFunction.from_source(body, I2)
    want = ex.evaluate(ex.differentiate(u.body, "x"), {"x": p})
    assert parametric_derivative(canonical_parametrize(u), p) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_singular_parametrization():
    v = ParametricFunction.from_source("p^3", "p", I2)
    with pytest.raises(SingularParametrization):
        parametric_derivative(v, 0.0)


def test_unsupported_order_and_dimension():
    v = ParametricFunction.from_source("p", "p", I2)
    with pytest.raises(Unsupported):
        parametric_derivative(v, 0.0, order=3)
    box = OpenBox((0, 0), (1, 1))
    v2 = ParametricFunction.from_source(["p1", "p2"], "p1*p2", box)
    with pytest.raises(Unsupported):
        parametric_derivative(v2, 0.5)


def test_two_dimensional_evaluation():
    box = OpenBox((0, 0), (1, 1))
    u = ScalarFunction.from_source("x1 + 2*x2", box)
    assert u(np.array([[0.25, 0.5]]))[0] == 1.25
    v = canonical_parametrize(u)
    assert v(np.array([[0.25, 0.5]])).tolist() == [[0.25, 0.5, 1.25]]
