import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from sl2c_semigroups.errors import ToleranceNotMet
from sl2c_semigroups.quadrature import integrate, integrate_panels, oscillatory_edges
from sl2c_semigroups.summation import bernoulli_numbers, compensated_sum, hurwitz_zeta


def test_compensated_sum_beats_naive():
    terms = np.array([1e16, 1.0, -1e16, 1.0] * 10)
    assert compensated_sum(terms) == 20.0
    assert math.isclose(compensated_sum(np.array([0.1] * 10)), 1.0, rel_tol=0, abs_tol=1e-16)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60))
def test_compensated_sum_matches_fsum(xs):
    assert compensated_sum(np.array(xs)) == pytest.approx(math.fsum(xs), abs=1e-9)


def test_compensated_sum_axis_and_complex():
    a = np.arange(12.0).reshape(3, 4)
    assert np.array_equal(compensated_sum(a, axis=0), a.sum(axis=0))
    z = np.array([1 + 2j, 3 - 1j])
    assert compensated_sum(z) == 4 + 1j


def test_bernoulli_exact():
    b = bernoulli_numbers(12)
    assert [str(v) for v in b[:5]] == ["1", "-1/2", "1/6", "0", "-1/30"]
    assert str(b[12]) == "-691/2730"


def test_hurwitz_zeta_complex():
    for s, q in ((2, 3 + 0.5j), (3, 10 + 4j), (4, 50 - 20j)):
        val, err = hurwitz_zeta(s, np.array([q]))
        ref = complex(mp.zeta(s, q))
        assert abs(val[0] - ref) <= max(err[0], 1e-15 * abs(ref))


def test_integrate_polynomial_and_exp():
    val, err = integrate(lambda x: x ** 5, 0, 2, abs_tol=1e-13)
    assert val == pytest.approx(64 / 6, rel=1e-14)
    val, _ = integrate(np.exp, -1, 3, abs_tol=1e-12)
    assert val == pytest.approx(math.exp(3) - math.exp(-1), rel=1e-14)
    assert integrate(np.exp, 1, 1) == (0.0, 0.0)


def test_integrate_raises_when_stalled():
    with pytest.raises(ToleranceNotMet):
        integrate_panels(lambda x: np.sign(x - 0.3), np.array([0.0, 1.0]), abs_tol=1e-15, max_doublings=2)


def test_oscillatory_edges():
    e = oscillatory_edges(2.0, 10.0, "sin", max_width=1.0)
    assert e[0] == 0 and e[-1] == 10
    assert np.all(np.diff(e) <= 1.0 + 1e-15)
    for z in np.arange(1, 7) * math.pi / 2:
        if z < 10:
            assert np.min(np.abs(e - z)) < 1e-14
    assert np.array_equal(oscillatory_edges(0.0, 2.0, "cos", 1.0), [0.0, 1.0, 2.0])
