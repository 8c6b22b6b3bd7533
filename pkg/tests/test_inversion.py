import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lieparam import expr as ex
from lieparam.errors import DomainFault
from lieparam.geometry import OpenBox
from lieparam.inversion import (
    InvertedFunction,
    InvertibilityReport,
    Verdict,
    image_interval,
    invert_monotone,
    scan_invertibility,
)

P = ["p"]


def scan(src, lo, hi, **kw):
    return scan_invertibility(ex.parse(src, variables=P), "p", OpenBox.interval(lo, hi), **kw)


def test_monotone_is_invertible():
    r = scan("p^3 + p", -2, 2)
    assert r.verdict is Verdict.INVERTIBLE and r.direction == 1
    assert r.min_abs_derivative == pytest.approx(1.0, abs=1e-5)


def test_decreasing_direction():
    assert scan("-2*p", -1, 1).direction == -1


def test_fold_witness_is_root_of_slope():
    r = scan("p + 0.5*p^2", -3, 3)
    assert r.verdict is Verdict.NOT_INVERTIBLE
    assert r.witness == pytest.approx(-1.0, abs=1e-12)


def test_degenerate_slope_is_inconclusive():
    r = scan("p^3", -1, 1)
    assert r.verdict is Verdict.INCONCLUSIVE
    assert r.min_abs_derivative <= 1e-8


def test_degenerate_slope_between_samples_is_caught():
    # slope (p - c)^2 touches 0 at a point that is not a grid node
    c = 0.123456789
    r = scan(f"(p - {c})^3", -1, 1, resolution=64)
    assert r.verdict is Verdict.INCONCLUSIVE
    assert r.witness == pytest.approx(c, abs=1e-9)


def test_tiny_dip_above_threshold_is_invertible():
    r = scan("p^3/3 + 0.001*p", -1, 1)
    assert r.verdict is Verdict.INVERTIBLE
    assert r.min_abs_derivative == pytest.approx(0.001, rel=1e-6)


def test_not_invertible_needs_witness():
    with pytest.raises(ValueError):
        InvertibilityReport(Verdict.NOT_INVERTIBLE, None, 0.0)


def test_report_json():
    r = scan("p + 0.5*p^2", -3, 3)
    assert r.to_json()["verdict"] == "NotInvertible"


@given(st.floats(0.1, 3), st.floats(0, 2), st.floats(-0.99, 0.99))
def test_inversion_recovers_preimage(a, b, frac):
    # f(p) = a p + b p^3 is increasing; invert f(p0) and compare to p0
    f = ex.parse(f"{a!r}*p + {b!r}*p^3", variables=P)
    box = OpenBox.interval(-2, 2)
    p0 = 2 * frac
    t = ex.evaluate(f, {"p": p0})
    got = invert_monotone(f, "p", box, [t], 1)[0]
    assert abs(got - p0) <= 1e-12 * 2


def test_image_interval_includes_closure():
    box = image_interval(ex.parse("p^2 + p", variables=P), "p", OpenBox.interval(0, 1))
    assert box.lo[0] == 0.0 and box.hi[0] == 2.0


def test_inverted_function_values_and_domain():
    f = ex.parse("2*p", variables=P)
    r = scan("2*p", -3, 3)
    inv = InvertedFunction(f, ex.parse("p^2", variables=P), "p", OpenBox.interval(-3, 3), r)
    assert inv.domain == OpenBox.interval(-6, 6)
    xs = np.linspace(-5.9, 5.9, 13)
    assert np.allclose(inv(xs), (xs / 2) ** 2, rtol=0, atol=1e-12)
    with pytest.raises(DomainFault):
        inv(np.array([6.5]))
