"""One test per acceptance criterion, each at its stated tolerance.

Every test records a PASS/FAIL line that is echoed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from sl2c_semigroups import kernels as K
from sl2c_semigroups import metaplectic as MP
from sl2c_semigroups import oracle as O
from sl2c_semigroups import verify as V
from sl2c_semigroups.special import SpectralPoint

S = V.Settings()


def _check(report, name, measured, tol, extra=""):
    ok = bool(measured <= tol)
    report(name, ok, f"measured {measured:.3e} <= {tol:.0e}{extra}")
    assert ok


def test_c01_qt_oracle_agreement(report):
    start = time.perf_counter()
    err = V.qt_oracle_error(S)
    elapsed = time.perf_counter() - start
    _check(report, "C1 q_t series vs quadrature", err, 1e-8, f" ({elapsed:.1f} s)")
    assert elapsed <= 60


def test_c02_normalization_positivity(report):
    worst_mass, worst_low = 0.0, math.inf
    for t in V.QT_TIMES:
        mass, low = V.qt_mass_and_min(S, t)
        worst_mass = max(worst_mass, abs(mass - 1))
        worst_low = min(worst_low, low, float(np.min(S.q(t, V.QT_XI))))
    ok = worst_mass <= 1e-8 and worst_low >= -1e-10
    report("C2 normalization and positivity", ok,
           f"max |mass - 1| {worst_mass:.3e} <= 1e-08, min value {worst_low:.3e} >= -1e-10")
    assert ok


def test_c03_semigroup_law(report):
    _check(report, "C3 q_1/2 * q_1/2 = q_1 on [-8, 8], h = 1/64", V.semigroup_error(S), 1e-6)


def test_c04_vague_limit(report):
    rel = max(V.vague_limit_errors(S))
    series = V.levy_series_error(J=10 ** 6)
    ok = rel <= 0.02 and series <= 1e-8
    report("C4 small-time limit and partial fractions", ok,
           f"relative {rel:.3e} <= 0.02, series {series:.3e} <= 1e-08")
    assert ok


def test_c05_principal_reconstruction(report):
    worst = max(V.reconstruction_error(t, SpectralPoint.principal(w), x, S.policy)
                for t in (0.5, 1.0) for w in (0.0, 0.5, 2.0) for x in (0.3, 1.3))
    harm = max(K.harmonicity_residual(t, w) for t in (0.5, 1.0) for w in (0.0, 0.5, 1.0, 2.0))
    ok = worst <= 1e-8 and harm <= 1e-8
    report("C5 principal reconstruction and harmonicity", ok,
           f"reconstruction {worst:.3e} <= 1e-08, harmonicity {harm:.3e} <= 1e-08")
    assert ok


def test_c06_complementary_reconstruction(report):
    worst = max(V.reconstruction_error(t, SpectralPoint.complementary(w), x, S.policy)
                for w in (0.3, 0.8) for t in (w, 1.0, 1.5) for x in (0.3, 1.3))
    xi = np.linspace(-10, 10, 101)
    # I^- needs t > |w|: at t = |w| its leading term is not absolutely convergent
    sym = max(float(np.max(np.abs(K.I_series(t, w, xi, "-") - K.I_series(t, -w, xi, "+"))))
              for w in (0.3, 0.8) for t in (1.0, 1.5))
    ok = worst <= 1e-8 and sym <= 1e-12
    report("C6 complementary reconstruction and I^- = I^+(-w)", ok,
           f"reconstruction {worst:.3e} <= 1e-08, symmetry {sym:.3e} <= 1e-12")
    assert ok


def test_c07_subcritical(report):
    atom_err, mass_err, rec_err = 0.0, 0.0, 0.0
    for t, w in ((0.3, 0.8), (0.5, 0.9)):
        exact = math.exp(t) * (w - t) / w
        atom_err = max(atom_err, abs(K.atom_mass(t, w) - exact) / math.ulp(exact))
        dec = K.subcritical_decomposition(t, w)
        mass_err = max(mass_err, abs(dec.total_mass_check - 1))
        for x in (0.3, 1.1, 1.3):
            rec_err = max(rec_err, V.reconstruction_error(t, SpectralPoint.complementary(w), x, S.policy))
    cont = max(V.continuity_error(w, S.policy) for w in (0.3, 0.8))
    ok = atom_err <= 2 and mass_err <= 1e-7 and rec_err <= 1e-7 and cont <= 1e-6
    report("C7 subcritical atom, mass, reconstruction, continuity", ok,
           f"atom {atom_err:.0f} ulp, mass {mass_err:.3e} <= 1e-07, "
           f"reconstruction {rec_err:.3e} <= 1e-07, continuity {cont:.3e} <= 1e-06")
    assert ok


def test_c08_intertwining_kernel(report):
    worst = max(V.intertwining_error(w, x) for w in (0.0, 0.5, 1.0) for x in (0.0, 1.0, 2.0))
    _check(report, "C8 intertwining kernel vs quadrature", worst, 1e-10)


def test_c09_matrix_suite(report):
    start = time.perf_counter()
    worst = V.metaplectic_lattice()
    elapsed = time.perf_counter() - start
    tol = {"closed_vs_series": 1e-12, "power_identities": 1e-10}
    bad = {k: v for k, v in worst.items() if v > tol.get(k, 1e-12)}
    ok = not bad and elapsed <= 5
    report("C9 sp(4,R) matrix suite on the 10x10 lattice", ok,
           f"max residual {max(worst.values()):.3e}, closed vs series {worst['closed_vs_series']:.3e}, "
           f"{elapsed:.2f} s" + (f", failing {sorted(bad)}" if bad else ""))
    assert ok


def test_c10_gaussian_average(report):
    worst = max(abs(O.gaussian_average_sech(x) - 1 / math.cosh(x)) for x in (0.0, 0.5, 1.0, 2.0))
    _check(report, "C10 Gaussian average = sech", worst, 1e-8)


@pytest.mark.slow
def test_c11_levy_area_monte_carlo(report):
    spec = O.AreaSimSpec(n_paths=10 ** 6, n_steps=4096, bandwidth=0.1, seed=2024)
    start = time.perf_counter()
    results = [O.conditional_area_cf(t, x, spec) for t, x in ((0.5, 1.0), (1.0, 0.5))]
    elapsed = time.perf_counter() - start
    parts, ok = [], elapsed <= 600
    for (t, x), r in zip(((0.5, 1.0), (1.0, 0.5)), results):
        tol = max(3 * r.stderr, 0.05 * abs(r.target))
        ok &= abs(r.estimate - r.target) <= tol
        parts.append(f"(t={t:g}, x={x:g}) {r.estimate:.5f} vs {r.target:.5f} +/- {tol:.1e}")
    report("C11 Levy area conditional characteristic function", ok, "; ".join(parts) + f" ({elapsed:.0f} s)")
    assert ok
