"""Independent reference computations.

Nothing here touches the Laguerre/double-series machinery: Fourier
inversions are done by direct oscillatory quadrature of exp(-t x coth x),
the semigroup law by numerical convolution of sampled densities, and the
Levy stochastic area by simulating planar Brownian paths.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, GridMismatch, InsufficientAcceptance
from .kernels import DensityGrid
from .quadrature import integrate, integrate_panels, oscillatory_edges
from .special import log_sinhc, one_minus_x_coth
from .summation import compensated_sum


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the oscillatory quadrature.

    The integration range is truncated at X = 1 + cutoff_log / rate, where
    ``rate`` is the exponential decay rate of the integrand; the default
    cutoff_log = 37 makes the discarded tail below e^{-37} ~ 1e-16.
    """

    abs_tol: float = 1e-13
    cutoff_log: float = 37.0
    n_nodes: int = 20
    max_width: float = 1.0
    max_doublings: int = 6

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.cutoff_log > 0:
            raise ValueError("cutoff_log must be positive")

    def cutoff(self, rate):
        return 1.0 + self.cutoff_log / rate


@dataclass(frozen=True)
class AreaSimSpec:
    n_paths: int = 1_000_000
    n_steps: int = 4096
    bandwidth: float = 0.1
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ValueError("n_paths and n_steps must be positive")
        if not 0 < self.bandwidth <= 0.2:
            raise ValueError("bandwidth must lie in (0, 0.2]")


DEFAULT_QUADRATURE = QuadratureSpec()


def _x_coth_x(x):
    return 1.0 - one_minus_x_coth(x)


def _coth_excess(x):
    """x (coth x - 1) = 2x / (e^{2x} - 1), equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0
    out[nz] = 2 * x[nz] / np.expm1(2 * x[nz])
    return out


def _oscillatory(f, freq, kind, rate, spec):
    upper = spec.cutoff(rate)
    edges = oscillatory_edges(freq, upper, kind, spec.max_width)
    val, _ = integrate_panels(f, edges, spec.abs_tol, spec.n_nodes, spec.max_doublings)
    return val


def fourier_invert_psi(t, xi, spec=DEFAULT_QUADRATURE):
    """q_t(xi) = (e^t / pi) int_0^inf cos(xi x) exp(-t x coth x) dx by quadrature."""
    if t <= 0:
        raise DomainError("t must be positive")

    def f(x):
        return np.cos(xi * x) * np.exp(-t * _x_coth_x(x))

    return math.exp(t) / math.pi * _oscillatory(f, xi, "cos", t, spec)


WEIGHTS = ("exp_shift", "exp_tail", "sinh_shift", "diff_shift")


def fourier_invert_weighted(t, a, xi, weight, spec=DEFAULT_QUADRATURE):
    """Sine integrals int_0^inf sin(xi x) g(x) dx used to check the I, J and G series.

    weight
        ``exp_shift``   g = e^{a x} exp(-t x coth x)                  (I_t^- at w = a, I_t^+ at w = -a)
        ``exp_tail``    g = e^{a x} (exp(-t x coth x) - e^{-t x})      (J_t at w = a)
        ``sinh_shift``  g = 2 sinh(a x) exp(-t x coth x)               (I_t^- - I_t^+)
        ``diff_shift``  g = 2 [sinh(a x) exp(-t x coth x) - sinh((a - t) x)]   (J_t - K_t)
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if weight == "exp_shift":
        rate = t - a

        def g(x):
            return np.exp(a * x - t * _x_coth_x(x))
    elif weight == "exp_tail":
        rate = 2 + t - a

        def g(x):
            return np.exp((a - t) * x) * np.expm1(-t * _coth_excess(x))
    elif weight == "sinh_shift":
        rate = t - abs(a)

        def g(x):
            e = np.exp(-t * _x_coth_x(x))
            return (np.exp(a * x) - np.exp(-a * x)) * e
    elif weight == "diff_shift":
        if not 0 < t < a < 1:
            raise DomainError("diff_shift needs 0 < t < a < 1")
        rate = min(a - t, 2 + t - a)

        def g(x):
            # stable split: e^{ax}[e^{-tx coth x} - e^{-tx}] - [e^{-(a + t coth x)x} - e^{-(a-t)x}]
            head = np.exp((a - t) * x) * np.expm1(-t * _coth_excess(x))
            tail = np.exp(-a * x - t * _x_coth_x(x)) - np.exp(-(a - t) * x)
            return head - tail
    else:
        raise ValueError(f"unknown weight {weight!r}; expected one of {WEIGHTS}")
    if rate <= 0:
        raise DomainError(f"integrand does not decay (rate {rate:g})")

    def f(x):
        return np.sin(xi * x) * g(x)

    return _oscillatory(f, xi, "sin", rate, spec)


def convolve(f, g):
    """Trapezoid-rule convolution (f * g)(z) = int f(u) g(z - u) du of two
    sampled densities on grids with a common uniform spacing h.

    The result lives on the sum grid; the quadrature error is O(h^2) for
    general smooth data and spectrally small for analytic, rapidly
    decaying densities.
    """
    hf, hg = f.spacing, g.spacing
    if hf is None or hg is None or not math.isclose(hf, hg, rel_tol=1e-9):
        raise GridMismatch("convolution needs two uniform grids with the same spacing")
    h = hf
    nf, ng = f.values.size, g.values.size
    full = np.convolve(f.values, g.values)
    k = np.arange(nf + ng - 1)
    lo = np.maximum(0, k - ng + 1)
    hi = np.minimum(nf - 1, k)
    ends = 0.5 * (f.values[lo] * g.values[k - lo] + f.values[hi] * g.values[k - hi])
    values = h * (full - ends)
    points = f.points[0] + g.points[0] + h * k
    return DensityGrid(points, values)


# --------------------------------------------------------------------------
# Levy stochastic area

_CHUNK = 1 << 14
_STEP_BLOCK = 128


def _simulate_chunk(seed_seq, n_paths, n_steps):
    # work with unit-variance increments and rescale once at the end
    rng = np.random.default_rng(seed_seq)
    x = np.zeros(n_paths)
    y = np.zeros(n_paths)
    area = np.zeros(n_paths)
    inc = np.empty((2, _STEP_BLOCK, n_paths))
    done = 0
    while done < n_steps:
        k = min(_STEP_BLOCK, n_steps - done)
        dx, dy = inc[0, :k], inc[1, :k]
        rng.standard_normal(out=dx)
        rng.standard_normal(out=dy)
        px = np.empty_like(dx)
        py = np.empty_like(dy)
        np.add(x, dx[0], out=px[0])
        np.add(y, dy[0], out=py[0])
        # row-by-row prefix sums are much faster than cumsum along axis 0
        for i in range(1, k):
            np.add(px[i - 1], dx[i], out=px[i])
            np.add(py[i - 1], dy[i], out=py[i])
        # post-step positions give the same sum as the left-point rule since
        # the dX dY terms cancel; the sum also equals the midpoint rule
        area += np.einsum("kp,kp->p", px, dy) - np.einsum("kp,kp->p", py, dx)
        x, y = px[-1], py[-1]
        done += k
    scale = 1.0 / n_steps
    return 0.5 * scale * (x * x + y * y), scale * area


@lru_cache(maxsize=2)
def simulate_area(n_paths, n_steps, seed, workers=1):
    """Simulate planar Brownian motion on [0, 1] and return, per path,
    |B_1|^2 / 2 and the Levy area int_0^1 (B^1 dB^2 - B^2 dB^1).

    Paths are generated in fixed-size chunks with independent
    SeedSequence children, so the output depends only on (n_paths,
    n_steps, seed), never on ``workers``.
    """
    sizes = [min(_CHUNK, n_paths - lo) for lo in range(0, n_paths, _CHUNK)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _simulate_chunk(job[0], job[1], n_steps), jobs))
    else:
        parts = [_simulate_chunk(s, n, n_steps) for s, n in jobs]
    half_r2 = np.concatenate([p[0] for p in parts])
    area = np.concatenate([p[1] for p in parts])
    half_r2.flags.writeable = False
    area.flags.writeable = False
    return half_r2, area


@dataclass(frozen=True)
class AreaEstimate:
    estimate: float
    stderr: float
    target: float
    raw: tuple           # (estimate at bandwidth, estimate at bandwidth / 2)
    raw_stderr: tuple
    accepted: tuple
    acceptance_rate: float


def _annulus_mean(half_r2, area, t, x, bandwidth):
    rel = np.sqrt(half_r2 / t)
    sel = np.abs(rel - 1.0) <= bandwidth
    vals = np.cos(x * area[sel])
    n = vals.size
    if n < 2:
        return float(vals.mean()) if n else math.nan, math.inf, n
    mean = compensated_sum(vals) / n
    sd = float(np.std(vals, ddof=1))
    return mean, sd / math.sqrt(n), n


def conditional_area_cf(t, x, spec=AreaSimSpec()):
    """E[cos(x A) | |B_1| in sqrt(2t)(1 +/- b)] with Richardson extrapolation
    over the bandwidths b and b/2; the conditioning bias is O(b^2)."""
    if t <= 0:
        raise DomainError("t must be positive")
    half_r2, area = simulate_area(spec.n_paths, spec.n_steps, spec.seed, spec.workers)
    b = spec.bandwidth
    e1, s1, n1 = _annulus_mean(half_r2, area, t, x, b)
    e2, s2, n2 = _annulus_mean(half_r2, area, t, x, b / 2)
    rate = n2 / spec.n_paths
    if rate < 1e-4:
        raise InsufficientAcceptance(f"acceptance rate {rate:.2e} below 1e-4")
    est = (4 * e2 - e1) / 3
    err = math.sqrt(16 * s2 * s2 + s1 * s1) / 3
    target = float(np.exp(-log_sinhc(x) + t * one_minus_x_coth(x)))
    return AreaEstimate(est, err, target, (e1, e2), (s1, s2), (n1, n2), rate)


def monte_carlo_levy_area(t, x, spec=AreaSimSpec()):
    """(estimate, stderr) of the conditional characteristic function of the
    Levy area given |B_1| = sqrt(2t); the exact value is phi_0(x) psi_t(x)."""
    res = conditional_area_cf(t, x, spec)
    return res.estimate, res.stderr


def gaussian_average_sech(x, spec=DEFAULT_QUADRATURE):
    """int_0^inf phi_0(x) psi_s(x) e^{-s} ds by quadrature in s (equals 1/cosh x)."""
    x = float(x)
    phi0 = math.exp(-float(log_sinhc(x)))
    rate = float(_x_coth_x(x))

    def f(s):
        return phi0 * np.exp(-s * rate)

    val, _ = integrate(f, 0.0, spec.cutoff(rate), abs_tol=spec.abs_tol, panel_width=spec.max_width,
                       n_nodes=spec.n_nodes, max_doublings=spec.max_doublings)
    return val


def fourier_phi_principal(omega, x, spec=DEFAULT_QUADRATURE):
    """int_R phi_{i w}(u) e^{i u x} du = 2 int_0^inf sin(w u) / (w sinh u) cos(u x) du by quadrature."""
    w = float(omega)

    def f(u):
        # sin(w u)/(w sinh u) = sinc(w u) * u / sinh(u), both factors stable at u = 0
        return np.sinc(w * u / math.pi) * np.exp(-log_sinhc(u)) * np.cos(x * u)

    return 2 * _oscillatory(f, x, "cos", 1.0, spec)
