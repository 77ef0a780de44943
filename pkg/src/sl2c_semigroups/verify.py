"""Verification suites: each check compares an engine result against an
independent oracle or an exact identity and records the outcome."""
from dataclasses import asdict, dataclass, field
import math
import time

import numpy as np

from . import kernels as K
from . import metaplectic as MP
from . import oracle as O
from .special import SpectralPoint, levy_exponent_psi, spherical_phi

QT_TIMES = (0.25, 0.5, 1.0, 2.0)
QT_XI = np.round(np.arange(-50, 51) * 0.2, 12)


@dataclass
class Check:
    name: str
    target: float
    measured: float
    tolerance: float
    passed: bool

    @classmethod
    def abs_diff(cls, name, measured, target, tolerance):
        return cls(name, float(target), float(measured), tolerance,
                   bool(abs(measured - target) <= tolerance))

    @classmethod
    def at_most(cls, name, measured, tolerance):
        return cls(name, 0.0, float(measured), tolerance, bool(measured <= tolerance))

    @classmethod
    def at_least(cls, name, measured, bound):
        return cls(name, bound, float(measured), 0.0, bool(measured >= bound))


@dataclass
class Settings:
    policy: K.TruncationPolicy = field(default_factory=K.TruncationPolicy)
    fault: bool = False
    alpha: float = 0.5
    t: float = 1.0
    area: O.AreaSimSpec = field(default_factory=O.AreaSimSpec)

    def q(self, t, xi):
        """q_t from the series engine; the fault hook evaluates q_{t + 1e-3} instead."""
        return K.qt_density(t + 1e-3 if self.fault else t, xi, self.policy)


def _target_phi_psi(w, t, x):
    return spherical_phi(w, x) * levy_exponent_psi(t, x)


# --------------------------------------------------------------------------
# measurements shared by the suites and the acceptance tests


def qt_oracle_error(settings, times=QT_TIMES, xi=QT_XI):
    """max |series q_t - quadrature inversion| over the grid."""
    worst = 0.0
    for t in times:
        series = settings.q(t, xi)
        ref = np.array([O.fourier_invert_psi(t, x) for x in xi])
        worst = max(worst, float(np.max(np.abs(series - ref))))
    return worst


def qt_mass_and_min(settings, t):
    mass = K.density_mass(lambda z: settings.q(t, z))
    low = float(np.min(settings.q(t, np.linspace(-40, 40, 801))))
    return mass, low


def semigroup_error(settings, h=1 / 64, half_width=16.0, window=8.0):
    """sup |q_{1/2} * q_{1/2} - q_1| on [-window, window].

    Both factors are sampled on [-half_width, half_width]; the densities decay
    like e^{-pi |xi|}, so the neglected tails are below 1e-20.
    """
    n = int(round(half_width / h))
    z = np.arange(-n, n + 1) * h
    g = K.DensityGrid(z, settings.q(0.5, z))
    conv = O.convolve(g, g)
    sel = np.abs(conv.points) <= window + 1e-12
    return float(np.max(np.abs(conv.values[sel] - settings.q(1.0, conv.points[sel]))))


def vague_limit_errors(settings, t=1e-3, xis=(0.5, 1.0, 3.0)):
    return [abs(settings.q(t, x) / t - K.levy_density_closed(x)) / K.levy_density_closed(x) for x in xis]


def levy_series_error(xis=(0.5, 1.0, 3.0), J=50):
    return max(abs(K.levy_density_series(x, J, accelerate=True) - K.levy_density_closed(x)) for x in xis)


def reconstruction_error(t, w, x, policy):
    return abs(K.godement_reconstruction(t, w, x, policy) - _target_phi_psi(w, t, x))


def intertwining_error(omega, x):
    return abs(K.intertwining_kernel(omega, x) - O.fourier_phi_principal(omega, x))


def continuity_error(omega, policy, xi=np.linspace(0.1, 6, 60)):
    below = K.subcritical_density(abs(omega) - 1e-9, omega, xi, policy)
    at = K.complementary_density(abs(omega), omega, xi, policy)
    return float(np.max(np.abs(below - at)))


def metaplectic_lattice(n=10):
    """Worst residuals of the matrix pipeline over alpha in [0.2, 3], t in [0, 5]."""
    worst = {}
    for a in np.linspace(0.2, 3.0, n):
        for t in np.linspace(0.0, 5.0, n):
            for k, v in MP.pipeline(a, t)["residuals"].items():
                worst[k] = max(worst.get(k, 0.0), v)
    return worst


# --------------------------------------------------------------------------
# suites


def suite_qt(s):
    out = [Check.at_most("qt oracle agreement", qt_oracle_error(s), 1e-8)]
    for t in QT_TIMES:
        mass, low = qt_mass_and_min(s, t)
        out.append(Check.abs_diff(f"qt mass t={t:g}", mass, 1.0, 1e-8))
        out.append(Check.at_least(f"qt min t={t:g}", low, -1e-10))
    out.append(Check.at_most("semigroup law q_1/2 * q_1/2 = q_1", semigroup_error(s), 1e-6))
    for x, e in zip((0.5, 1.0, 3.0), vague_limit_errors(s)):
        out.append(Check.at_most(f"vague limit xi={x:g} (relative)", e, 0.02))
    out.append(Check.at_most("Levy density partial fractions", levy_series_error(), 1e-8))
    return out


def suite_principal(s):
    out = []
    for t in (0.5, 1.0):
        for w in (0.0, 0.5, 2.0):
            for x in (0.3, 1.3):
                e = reconstruction_error(t, SpectralPoint.principal(w), x, s.policy)
                out.append(Check.at_most(f"principal reconstruction t={t:g} w={w:g} x={x:g}", e, 1e-8))
        for w in (0.5, 2.0):
            out.append(Check.at_most(f"harmonicity t={t:g} w={w:g}",
                                     K.harmonicity_residual(t, w, s.policy), 1e-8))
    out.append(Check.at_most("Chapman-Kolmogorov t=0.5 s=0.5 w=0.7 g=1.1",
                             K.chapman_kolmogorov_residual(0.5, 0.5, 0.7, 1.1, policy=s.policy), 1e-8))
    for w in (0.0, 0.5, 1.0):
        for x in (0.0, 1.0, 2.0):
            out.append(Check.at_most(f"intertwining kernel w={w:g} x={x:g}", intertwining_error(w, x), 1e-10))
    return out


def suite_complementary(s):
    out = []
    for w in (0.3, 0.8):
        for t in (w, 1.0, 1.5):
            for x in (0.3, 1.3):
                e = reconstruction_error(t, SpectralPoint.complementary(w), x, s.policy)
                out.append(Check.at_most(f"complementary reconstruction t={t:g} w={w:g} x={x:g}", e, 1e-8))
    xi = np.linspace(-6, 6, 25)
    for t, w in ((1.0, 0.3), (1.5, 0.8)):
        sym = np.max(np.abs(K.I_series(t, w, xi, "-", s.policy) - K.I_series(t, -w, xi, "+", s.policy)))
        out.append(Check.at_most(f"I^-(w) = I^+(-w) t={t:g} w={w:g}", sym, 1e-12))
    for t, w, x in ((1.0, 0.5, 1.3), (1.0, -0.5, 2.0)):
        ref = O.fourier_invert_weighted(t, w, x, "exp_shift")
        out.append(Check.abs_diff(f"I^- series vs quadrature t={t:g} w={w:g} xi={x:g}",
                                  K.I_series(t, w, x, "-", s.policy), ref, 1e-9))
    ref = O.fourier_invert_weighted(1.0, 0.5, 2.0, "sinh_shift")
    val = 2 * math.pi * 0.5 / (math.exp(1.0) * 2.0) * K.complementary_density(1.0, 0.5, 2.0, s.policy)
    out.append(Check.abs_diff("complementary density vs sinh-weighted quadrature", val, ref, 1e-9))
    return out


def suite_subcritical(s):
    out = []
    for t, w in ((0.3, 0.8), (0.5, 0.9)):
        exact = math.exp(t) * (w - t) / w
        out.append(Check.abs_diff(f"atom mass t={t:g} w={w:g}", K.atom_mass(t, w), exact,
                                  4 * math.ulp(exact)))
        dec = K.subcritical_decomposition(t, w, s.policy)
        out.append(Check.abs_diff(f"atom + continuous mass t={t:g} w={w:g}", dec.total_mass_check, 1.0, 1e-7))
        for x in (0.3, 1.3):
            e = reconstruction_error(t, SpectralPoint.complementary(w), x, s.policy)
            out.append(Check.at_most(f"subcritical reconstruction t={t:g} w={w:g} x={x:g}", e, 1e-7))
        low = float(np.min(dec.density(np.linspace(0, 30, 601))))
        out.append(Check.at_least(f"G_t density nonnegative t={t:g} w={w:g}", low, -1e-10))
    for w in (0.3, 0.8):
        out.append(Check.at_most(f"continuity at t=|w| w={w:g}", continuity_error(w, s.policy), 1e-6))
    t, w, x = 0.3, 0.7, 1.5
    jk = K.J_series(t, w, x, s.policy) - (K.I_series(t, w, x, "+", s.policy) - x / ((w - t) ** 2 + x * x))
    out.append(Check.abs_diff("J - K vs diff-weighted quadrature", jk,
                              O.fourier_invert_weighted(t, w, x, "diff_shift"), 1e-9))
    return out


def suite_metaplectic(s):
    worst = metaplectic_lattice()
    tol = {"closed_vs_series": 1e-12, "power_identities": 1e-10}
    out = [Check.at_most(f"lattice {k}", v, tol.get(k, 1e-12)) for k, v in worst.items()]
    doc = MP.pipeline(s.alpha, s.t)
    l1, l2 = doc["cartan_lambdas"]
    expected = math.sqrt(max(np.linalg.eigvalsh(doc["gram_left_core"])))
    out.append(Check.abs_diff(f"lambda_1 alpha={s.alpha:g} t={s.t:g}", l1, expected, 1e-12))
    out.append(Check.abs_diff(f"lambda_2 alpha={s.alpha:g} t={s.t:g}", l2, 1 / expected, 1e-12))
    period = float(np.max(np.abs(MP.exp_neg_tA_closed(s.alpha, s.t + math.pi / s.alpha)
                                 - MP.exp_neg_tA_closed(s.alpha, s.t))))
    out.append(Check.at_most("period pi/alpha", period, 1e-12))
    for x in (0.0, 0.5, 1.0, 2.0):
        out.append(Check.abs_diff(f"Gaussian average = sech x={x:g}",
                                  O.gaussian_average_sech(x), 1 / math.cosh(x), 1e-8))
    return out


def suite_montecarlo(s):
    out = []
    for t, x in ((0.5, 1.0), (1.0, 0.5)):
        res = O.conditional_area_cf(t, x, s.area)
        tol = max(3 * res.stderr, 0.05 * abs(res.target))
        out.append(Check.abs_diff(f"Levy area conditional cf t={t:g} x={x:g}", res.estimate, res.target, tol))
    return out


SUITES = {
    "qt": suite_qt,
    "principal": suite_principal,
    "complementary": suite_complementary,
    "subcritical": suite_subcritical,
    "metaplectic": suite_metaplectic,
    "montecarlo": suite_montecarlo,
}
FAST = ("qt", "principal", "complementary", "subcritical", "metaplectic")


def run(suite, settings=None, include_slow=False):
    """Run a suite (or ``all``) and return the JSON-ready report."""
    settings = settings or Settings()
    if suite == "all":
        names = FAST + (("montecarlo",) if include_slow else ())
    elif suite in SUITES:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    checks, timings = [], {}
    for name in names:
        start = time.perf_counter()
        checks.extend(SUITES[name](settings))
        timings[name] = time.perf_counter() - start
    return {
        "suites": list(names),
        "fault_injected": settings.fault,
        "checks": [asdict(c) for c in checks],
        "seconds": timings,
        "passed": all(c.passed for c in checks),
    }
