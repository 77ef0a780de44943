import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl2c_semigroups import kernels as K
from sl2c_semigroups import oracle as O
from sl2c_semigroups.errors import DomainError, GridMismatch, InsufficientAcceptance
from sl2c_semigroups.special import levy_exponent_psi, log_sinhc


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        O.QuadratureSpec(abs_tol=0)
    assert O.QuadratureSpec().cutoff(1.0) == pytest.approx(38.0)
    with pytest.raises(ValueError):
        O.AreaSimSpec(bandwidth=0.3)
    with pytest.raises(ValueError):
        O.AreaSimSpec(n_paths=0)


def test_fourier_invert_psi():
    assert O.fourier_invert_psi(1, 0) == pytest.approx(K.qt_density(1, 0), abs=1e-9)
    assert O.fourier_invert_psi(0.7, 2.3) == O.fourier_invert_psi(0.7, -2.3)
    assert O.fourier_invert_psi(1e-3, 1.0) / 1e-3 == pytest.approx(K.levy_density_closed(1.0), rel=0.02)
    with pytest.raises(DomainError):
        O.fourier_invert_psi(0, 1)


def test_cutoff_rule_is_safe():
    base = O.fourier_invert_psi(0.5, 1.7)
    longer = O.fourier_invert_psi(0.5, 1.7, O.QuadratureSpec(cutoff_log=1.5 * 37 + 0.5))
    assert abs(base - longer) < 1e-12


def test_weighted_oracles():
    assert O.fourier_invert_weighted(1, 0.5, 0.0, "sinh_shift") == 0
    ref = O.fourier_invert_weighted(1, 0.5, 2, "sinh_shift")
    assert ref == pytest.approx(2 * math.pi * 0.5 / (math.e * 2) * K.complementary_density(1, 0.5, 2), abs=1e-9)
    jk = K.J_series(0.3, 0.7, 1.5) - (K.I_series(0.3, 0.7, 1.5, "+") - 1.5 / (0.4 ** 2 + 1.5 ** 2))
    assert O.fourier_invert_weighted(0.3, 0.7, 1.5, "diff_shift") == pytest.approx(jk, abs=1e-9)
    assert O.fourier_invert_weighted(0.3, 0.7, 1.5, "exp_tail") == pytest.approx(K.J_series(0.3, 0.7, 1.5), abs=1e-9)
    assert O.fourier_invert_weighted(1, 0.5, 2, "exp_shift") == pytest.approx(K.I_series(1, 0.5, 2, "-"), abs=1e-9)


def test_weighted_domain_errors():
    with pytest.raises(DomainError):
        O.fourier_invert_weighted(0.5, 0.7, 1.0, "sinh_shift")
    with pytest.raises(DomainError):
        O.fourier_invert_weighted(0.8, 0.7, 1.0, "diff_shift")
    with pytest.raises(ValueError):
        O.fourier_invert_weighted(1.0, 0.1, 1.0, "cosine")


def _grid(f, lo, hi, h):
    z = lo + h * np.arange(int(round((hi - lo) / h)) + 1)
    return K.DensityGrid(z, f(z))


def test_convolve_properties():
    h = 1 / 64
    bump = _grid(lambda z: np.exp(-z * z / (2 * 0.05 ** 2)) / (0.05 * math.sqrt(2 * math.pi)), -0.5, 0.5, h)
    g = _grid(lambda z: np.exp(-0.5 * (z - 1) ** 2), -6, 8, h)
    c = O.convolve(bump, g)
    inside = (c.points > -4) & (c.points < 6)
    assert np.max(np.abs(c.values[inside] - np.exp(-0.5 * (c.points[inside] - 1) ** 2))) < 0.005
    c2 = O.convolve(g, bump)
    assert np.allclose(c.values, c2.values, rtol=0, atol=1e-15)
    with pytest.raises(GridMismatch):
        O.convolve(g, _grid(np.exp, 0, 1, 1 / 16))


def test_convolve_gaussians_exact_mass():
    h = 1 / 16
    gauss = lambda s: (lambda z: np.exp(-z * z / (2 * s * s)) / (s * math.sqrt(2 * math.pi)))
    f = _grid(gauss(0.6), -8, 8, h)
    c = O.convolve(f, f)
    sel = np.abs(c.points) <= 3
    assert np.max(np.abs(c.values[sel] - gauss(0.6 * math.sqrt(2))(c.points[sel]))) < 1e-12


def test_semigroup_law_second_pair():
    h = 1 / 64
    z = np.arange(-16 * 64, 16 * 64 + 1) * h
    c = O.convolve(K.DensityGrid(z, K.qt_density(1.0, z)), K.DensityGrid(z, K.qt_density(0.5, z)))
    sel = np.abs(c.points) <= 8
    assert np.max(np.abs(c.values[sel] - K.qt_density(1.5, c.points[sel]))) <= 1e-6


@pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 2.0])
def test_gaussian_average_sech(x):
    assert O.gaussian_average_sech(x) == pytest.approx(1 / math.cosh(x), abs=1e-8)
    assert O.gaussian_average_sech(-x) == O.gaussian_average_sech(x)


def test_intertwining_oracle():
    assert O.fourier_phi_principal(0.5, 1.0) == pytest.approx(K.intertwining_kernel(0.5, 1.0), abs=1e-10)


SMALL = O.AreaSimSpec(n_paths=1 << 16, n_steps=1024, seed=7)


def test_area_sim_reduced_run():
    for t, x in ((0.5, 1.0), (1.0, 0.5)):
        res = O.conditional_area_cf(t, x, SMALL)
        assert res.target == pytest.approx(x / math.sinh(x) * levy_exponent_psi(t, x), rel=1e-14)
        assert abs(res.estimate - res.target) <= max(3 * res.stderr, 0.05 * res.target)
        assert res.acceptance_rate > 1e-2


def test_area_sim_trivial_and_even():
    assert O.monte_carlo_levy_area(0.5, 0.0, SMALL) == (1.0, 0.0)
    assert O.monte_carlo_levy_area(0.5, 1.3, SMALL) == O.monte_carlo_levy_area(0.5, -1.3, SMALL)


def test_area_sim_deterministic_across_workers():
    a = O.simulate_area(3 * 4096 + 5, 64, 3, 1)
    b = O.simulate_area(3 * 4096 + 5, 64, 3, 3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    c = O.simulate_area(3 * 4096 + 5, 64, 4, 1)
    assert not np.array_equal(a[1], c[1])


def test_area_sim_moments():
    # |B_1|^2 / 2 ~ Exp(1) and Var(area) = 1 for the full area on [0, 1]
    half_r2, area = O.simulate_area(1 << 15, 256, 11)
    assert half_r2.mean() == pytest.approx(1.0, abs=0.03)
    assert area.var() == pytest.approx(1.0 - 1 / 256, abs=0.05)


def test_insufficient_acceptance():
    with pytest.raises(InsufficientAcceptance):
        O.conditional_area_cf(40.0, 1.0, O.AreaSimSpec(n_paths=2000, n_steps=16, bandwidth=0.01))
