"""Series engines for the Levy density q_t and the spherical kernels P_t(w, .).

All densities come from one double-series engine. With the rate
r_n = 2n + r0 and w_n = r_n - i xi, the m-outer rearrangement reads

    sum_{m>=0} c_m sum_{j>=0} (m)_j / j! * w_{j+m}^{-p(m)}

where c_m carries (-2t)^m. The real part gives cosine transforms (q_t),
the imaginary part sine transforms (I_t^-/+, J_t, and dq_t/dxi with one
extra power). For fixed m >= 1 the inner sum decays only like j^{-2}, so
it is summed directly up to N terms and the remainder is evaluated in
closed form through Hurwitz zeta functions (Euler-Maclaurin).

Truncation in m is certified with the majorant

    (2t)^m sum_j (m)_j/j! |w_{j+m}|^{-(m+1)} <= t^m / (m m!)

(uniform in xi), obtained from |w_n| >= 2n and the Gamma integral
1/n^{m+1} = (1/m!) int v^m e^{-nv} dv.
"""
from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NonConvergence, RegimeError
from .quadrature import integrate, integrate_panels
from .special import SpectralPoint, spherical_phi, log_sinhc
from .summation import compensated_sum, hurwitz_zeta

_EPS = np.finfo(float).eps
_BLOCK = 4096
_BASE_ROWS = 32
_SMALL_OMEGA = 1e-6
_CUT = 24.0


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation controls for the double series.

    ``rel_tol`` is relative to the xi-uniform majorant of the summed terms,
    which is the natural absolute scale of the density. ``max_m`` caps the
    outer index, ``max_j`` the number of directly summed inner terms.
    """

    rel_tol: float = 1e-10
    max_m: int = 80
    max_j: int = 400

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_m < 1 or self.max_j < 1:
            raise ValueError("max_m and max_j must be at least 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class SeriesResult:
    value: object
    bound: object
    n_terms: int
    target: float


@dataclass(frozen=True)
class DensityGrid:
    """Sampled density: strictly increasing ``points`` and matching ``values``."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim != 1 or pts.shape != vals.shape:
            raise ValueError("points and values must be 1-d and of equal length")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f, points):
        pts = np.asarray(points, dtype=float)
        return cls(pts, np.asarray(f(pts), dtype=float))

    @property
    def spacing(self):
        """Common step of a uniform grid, or None if the grid is not uniform."""
        if self.points.size < 2:
            return None
        d = np.diff(self.points)
        h = (self.points[-1] - self.points[0]) / (self.points.size - 1)
        return h if np.allclose(d, h, rtol=1e-9, atol=0) else None


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float


@dataclass(frozen=True)
class KernelDecomposition:
    """Lebesgue decomposition of P_t(w, .): optional atom plus a density in xi.

    ``total_mass_check`` is atom mass plus the quadrature of the density.
    """

    atom: Optional[Atom]
    density: Callable
    total_mass_check: float
    regime: str = field(default="")

    def on_grid(self, points):
        return DensityGrid.from_function(self.density, points)


# --------------------------------------------------------------------------
# the engine


def _majorants(t, growth, extra, count):
    """Uniform bounds for outer terms m = 1..count (index 0 unused)."""
    m = np.arange(1, count + 1, dtype=float)
    logm = np.log(m)
    lg = np.array([math.lgamma(k + 1.0) for k in m])
    log_bound = m * math.log(t) - (1 + extra) * logm - lg + (m + 1 + extra) * math.log(growth)
    return np.concatenate(([0.0], np.exp(log_bound)))


def _tail_sums(maj, t, growth):
    """tail[M] = sum_{m > M} maj[m], closed with a geometric remainder."""
    tail = np.concatenate((np.cumsum(maj[::-1])[::-1][1:], [0.0]))
    last = len(maj) - 1
    ratio = t * growth / (last + 1)
    tail = tail + (maj[last] * ratio / (1 - ratio) if ratio < 1 else np.inf)
    return tail


def _inner_tail(m, p, rate0, xi, n_direct):
    """sum_{j >= n_direct} (m)_j / j! * (2j + c)^{-p}, c = 2m + r0 - i xi.

    (m)_j / j! is a degree m-1 polynomial in j; rewritten in powers of w = 2j + c
    each monomial sums to a Hurwitz zeta value.
    Returns (value, err_estimate, abs_magnitude).
    """
    c = 2 * m + rate0 - 1j * xi
    coef = np.zeros((m,) + xi.shape, dtype=complex)
    coef[0] = 1.0
    for i in range(1, m):
        root = c - 2 * i
        shifted = np.zeros_like(coef)
        shifted[1:] = coef[:-1]
        coef = shifted - root * coef
    coef /= 2.0 ** (m - 1) * math.factorial(m - 1)
    q = n_direct + 0.5 * c
    value = np.zeros(xi.shape, dtype=complex)
    err = np.zeros(xi.shape)
    mag = np.zeros(xi.shape)
    for k in range(m):
        s = p - k
        z, e = hurwitz_zeta(s, q)
        scale = 2.0 ** (k - p)
        piece = coef[k] * scale * z
        value += piece
        err += np.abs(coef[k]) * scale * e
        mag += np.abs(piece)
    return value, err, mag


def _engine_block(t, rate0, xi, part, derivative, m_start, M, policy):
    extra = 1 if derivative else 0
    xmax = float(np.max(np.abs(xi))) if xi.size else 0.0
    n_of = [min(policy.max_j, _BASE_ROWS + m + math.ceil(xmax)) for m in range(M + 1)]
    rows = max(m + n_of[m] for m in range(m_start, M + 1))
    n = np.arange(rows)
    w = (2.0 * n + rate0)[:, None] - 1j * xi[None, :]
    first = m_start
    winv = np.zeros_like(w)
    winv[first:] = 1.0 / w[first:]
    power = winv ** (first + 1 + extra)

    outer = np.zeros((M + 1 - m_start,) + xi.shape)
    err = np.zeros(xi.shape)
    mag = np.zeros(xi.shape)
    take = np.real if part == "re" else np.imag
    for m in range(m_start, M + 1):
        if m > m_start:
            power = power * winv
        p = m + 1 + extra
        coef_m = (-2.0 * t) ** m * (-(m + 1) if derivative else 1)
        if m == 0:
            inner = take(power[0])
            inner_mag = np.abs(power[0])
            inner_err = 0.0
        else:
            N = n_of[m]
            j = np.arange(N, dtype=float)
            weights = np.ones(N)
            weights[1:] = np.cumprod((m + j[1:] - 1) / j[1:])
            terms = weights[:, None] * power[m:m + N]
            inner = compensated_sum(take(terms))
            tail, tail_err, tail_mag = _inner_tail(m, p, rate0, xi, N)
            inner = inner + take(tail)
            inner_mag = np.sum(weights[:, None] * np.abs(power[m:m + N]), axis=0) + tail_mag
            inner_err = tail_err
        outer[m - m_start] = coef_m * inner
        err += abs(coef_m) * inner_err
        mag += abs(coef_m) * inner_mag
    value = compensated_sum(outer)
    return value, err, mag


def _m_outer_series(t, rate0, xi, part, derivative=False, m_start=0, policy=DEFAULT_POLICY,
                    prefactor=1.0):
    if t <= 0:
        raise DomainError("t must be positive")
    if m_start == 0 and rate0 <= 0:
        raise DomainError(f"leading exponential rate {rate0:g} is not positive")
    if 2 + rate0 <= 0:
        raise DomainError(f"exponential rate 2 + {rate0:g} is not positive")
    xi_arr = np.asarray(xi, dtype=float)
    flat = xi_arr.ravel()
    extra = 1 if derivative else 0
    growth = 1.0 / (1.0 - max(0.0, -rate0) / 2.0)
    maj = _majorants(t, growth, extra, policy.max_m + 64)
    tails = _tail_sums(maj, t, growth)
    scale = float(np.sum(maj[1:]))
    target = policy.rel_tol * prefactor * scale
    need = np.nonzero(prefactor * tails[: policy.max_m + 1] <= 0.25 * target)[0]
    if need.size == 0:
        raise NonConvergence(
            f"outer tail not certified within max_m={policy.max_m} (t={t:g})",
            bound=float(prefactor * tails[policy.max_m]), target=target)
    M = max(int(need[0]), m_start)

    value = np.empty(flat.shape)
    bound = np.empty(flat.shape)
    for lo in range(0, flat.size, _BLOCK):
        chunk = flat[lo:lo + _BLOCK]
        v, e, mag = _engine_block(t, rate0, chunk, part, derivative, m_start, M, policy)
        value[lo:lo + _BLOCK] = prefactor * v
        bound[lo:lo + _BLOCK] = prefactor * (tails[M] + e + 4 * (M + _BASE_ROWS) * _EPS * mag)
    worst = float(np.max(bound)) if bound.size else 0.0
    if worst > target:
        raise NonConvergence(
            f"certified bound {worst:.3e} exceeds target {target:.3e}", bound=worst, target=target)
    return SeriesResult(_shape(value, xi_arr), _shape(bound, xi_arr), M + 1, target)


def _shape(flat, like):
    return float(flat[0]) if like.ndim == 0 else flat.reshape(like.shape)


# --------------------------------------------------------------------------
# the Levy density q_t


def qt_series(t, xi, policy=DEFAULT_POLICY):
    """q_t(xi) with its certified error bound, as a SeriesResult."""
    return _m_outer_series(t, t, xi, "re", policy=policy, prefactor=math.exp(t) / math.pi)


def qt_density(t, xi, policy=DEFAULT_POLICY):
    """Density q_t(xi) of the Levy semigroup with characteristic function psi_t.

    q_t(xi) = e^t/pi sum_m sum_j (-2t)^m (m)_j/j! [(2j+2m+t)^2 + xi^2]^{-(m+1)/2}
              T_{m+1}((2j+2m+t) / sqrt((2j+2m+t)^2 + xi^2))
    """
    return qt_series(t, xi, policy).value


def qt_derivative_series(t, xi, policy=DEFAULT_POLICY):
    return _m_outer_series(t, t, xi, "im", derivative=True, policy=policy,
                           prefactor=math.exp(t) / math.pi)


def qt_density_derivative(t, xi, policy=DEFAULT_POLICY):
    """d q_t / d xi from the sine-transform series (one extra power of w per term)."""
    return qt_derivative_series(t, xi, policy).value


def levy_density_closed(xi):
    """Levy measure density (pi/4) / sinh^2(pi xi / 2), xi != 0."""
    xi = np.abs(np.asarray(xi, dtype=float))
    if np.any(xi == 0):
        raise DomainError("the Levy density is singular at 0")
    e = np.exp(-math.pi * xi)
    return _scalar(math.pi * e / (1 - e) ** 2)


def levy_density_series(xi, J, accelerate=False):
    """Partial-fraction form 1/(pi xi^2) - 1/(2 pi) sum_{j=1}^J (j^2 - y^2)/(j^2 + y^2)^2, y = xi/2.

    With ``accelerate`` the remainder sum_{j>J} Re (j + iy)^{-2} is added in
    closed form (Hurwitz zeta), which gives the full small-time limit of q_t/t.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr == 0):
        raise DomainError("the Levy density is singular at 0")
    j = np.arange(1, J + 1, dtype=float)
    out = np.empty(xi_arr.size)
    for k, x in enumerate(xi_arr.ravel()):
        y2 = (x / 2) ** 2
        partial = math.fsum((j * j - y2) / (j * j + y2) ** 2)
        if accelerate:
            z, _ = hurwitz_zeta(2, np.array([J + 1 + 0.5j * x]))
            partial += float(z.real[0])
        out[k] = 1 / (math.pi * x * x) - partial / (2 * math.pi)
    return _shape(out, xi_arr)


# --------------------------------------------------------------------------
# principal series


def principal_kernel(t, omega, xi, policy=DEFAULT_POLICY):
    """(q_t(xi - w) - q_t(xi + w)) / (2w), with the w -> 0 limit -dq_t/dxi."""
    xi = np.asarray(xi, dtype=float)
    if abs(omega) < _SMALL_OMEGA:
        return -np.asarray(qt_density_derivative(t, xi, policy))
    both = qt_density(t, np.stack((xi - omega, xi + omega)), policy)
    return (both[0] - both[1]) / (2 * omega)


def principal_density(t, omega, xi, policy=DEFAULT_POLICY):
    """Density of P_t(i w, d xi): xi (q_t(xi - w) - q_t(xi + w)) / (2w); -xi q_t'(xi) at w = 0."""
    xi_arr = np.asarray(xi, dtype=float)
    return _scalar(xi_arr * principal_kernel(t, omega, xi_arr, policy))


# --------------------------------------------------------------------------
# complementary series


def _sign(sign):
    if sign in ("-", -1, "minus"):
        return -1
    if sign in ("+", 1, "plus"):
        return 1
    raise ValueError(f"sign must be '-' or '+', got {sign!r}")


def I_series_result(t, omega, xi, sign, policy=DEFAULT_POLICY):
    rate0 = t + _sign(sign) * omega
    if rate0 <= 0:
        raise DomainError(f"I_t^{sign} needs t {'-+'[_sign(sign) > 0]} w > 0 (got {rate0:g})")
    return _m_outer_series(t, rate0, xi, "im", policy=policy)


def I_series(t, omega, xi, sign, policy=DEFAULT_POLICY):
    """I_t^-/+(w, xi) = int_0^inf sin(x xi) e^{+/- w x} e^{-t x coth x} dx as a double series."""
    return I_series_result(t, omega, xi, sign, policy).value


def J_series(t, omega, xi, policy=DEFAULT_POLICY):
    """J_t(w, xi): the I_t^- series without its (j, m) = (0, 0) term.

    Every remaining rate 2j + 2m + t - w is positive whenever 2 + t - w > 0.
    """
    return _m_outer_series(t, t - omega, xi, "im", m_start=1, policy=policy).value


def _check_complementary(t, omega):
    if t <= 0:
        raise DomainError("t must be positive")
    if not abs(omega) < 1:
        raise DomainError("complementary parameter must lie in (-1, 1)")


def complementary_density(t, omega, xi, policy=DEFAULT_POLICY):
    """Density of P_t(w, d xi) for real w in (-1, 1) and t >= |w|:

        e^t xi (I_t^-(w, xi) - I_t^+(w, xi)) / (2 pi w).
    """
    _check_complementary(t, omega)
    if t < abs(omega):
        raise RegimeError(f"t={t:g} < |w|={abs(omega):g}: use subcritical_decomposition")
    xi_arr = np.asarray(xi, dtype=float)
    if abs(omega) < _SMALL_OMEGA:
        return principal_density(t, 0.0, xi_arr, policy)
    w = abs(omega)
    pref = math.exp(t) / (2 * math.pi * w)
    if t > w:
        diff = np.asarray(I_series(t, w, xi_arr, "-", policy)) - I_series(t, w, xi_arr, "+", policy)
        return _scalar(pref * xi_arr * diff)
    # t == |w|: the (0,0) term of I^- is the Abel-summed int sin(x xi) dx = 1/xi
    rest = np.asarray(J_series(t, w, xi_arr, policy)) - I_series(t, w, xi_arr, "+", policy)
    return _scalar(pref * (xi_arr * rest + 1.0))


# --------------------------------------------------------------------------
# subcritical regime 0 < t < |w|


def atom_mass(t, omega):
    """Mass e^t (|w| - t) / |w| of the atom of P_t(w, .) at |w| - t."""
    w = abs(omega)
    return math.exp(t) * (w - t) / w


def _check_subcritical(t, omega):
    _check_complementary(t, omega)
    if omega == 0 or t >= abs(omega):
        raise RegimeError("subcritical regime needs 0 < t < |w|, w != 0")


def subcritical_density(t, omega, xi, policy=DEFAULT_POLICY):
    """Density of G_t(w, d xi) = xi e^t/(2 pi w) [J_t - K_t],
    with K_t = I_t^+ - xi / ((w - t)^2 + xi^2); reflected for w < 0."""
    _check_subcritical(t, omega)
    w = abs(omega)
    xi_arr = np.asarray(xi, dtype=float)
    b = w - t
    k_t = np.asarray(I_series(t, w, xi_arr, "+", policy)) - xi_arr / (b * b + xi_arr * xi_arr)
    j_t = J_series(t, w, xi_arr, policy)
    return _scalar(math.exp(t) / (2 * math.pi * w) * xi_arr * (j_t - k_t))


def subcritical_decomposition(t, omega, policy=DEFAULT_POLICY):
    """Atom at |w| - t of mass e^t (|w| - t)/|w| plus the absolutely continuous G_t."""
    _check_subcritical(t, omega)
    atom = Atom(abs(omega) - t, atom_mass(t, omega))

    def density(xi):
        return subcritical_density(t, omega, xi, policy)

    mass = atom.mass + density_mass(density, abs(omega))
    return KernelDecomposition(atom, density, mass, "subcritical")


def kernel_decomposition(t, w, policy=DEFAULT_POLICY):
    """KernelDecomposition of P_t(w, .) for any spectral point ``w``."""
    if w.kind == "principal":
        omega = w.value

        def density(xi):
            return principal_density(t, omega, xi, policy)

        return KernelDecomposition(None, density, density_mass(density, abs(omega)), "principal")
    omega = w.value
    if omega != 0 and t < abs(omega):
        return subcritical_decomposition(t, omega, policy)

    def density(xi):
        return complementary_density(t, omega, xi, policy)

    return KernelDecomposition(None, density, density_mass(density, abs(omega)), "complementary")


# --------------------------------------------------------------------------
# integrals over xi


def integration_cutoff(shift=0.0):
    """Half-width R of the xi range; all densities here decay like e^{-pi |xi|}."""
    return _CUT + abs(shift)


def even_integral(f, shift=0.0, abs_tol=1e-12):
    """int_R f for an even vectorised f, as 2 int_0^R f."""
    val, err = integrate(f, 0.0, integration_cutoff(shift), abs_tol=abs_tol / 2, panel_width=0.25)
    return 2 * val, 2 * err


def density_mass(density, shift=0.0, abs_tol=1e-12):
    return even_integral(density, shift, abs_tol)[0]


def phi_principal_in_xi(xi, x):
    """phi_{i xi}(x) = sin(xi x) / (xi sinh x) as a function of the spectral variable."""
    return np.sinc(np.asarray(xi, dtype=float) * x / math.pi) * math.exp(-float(log_sinhc(x)))


def godement_reconstruction(t, w, x, policy=DEFAULT_POLICY, abs_tol=1e-12):
    """atom * phi_{atom}(x) + int phi_{i xi}(x) density(xi) d xi for P_t(w, .).

    The result should reproduce phi_w(x) psi_t(x).
    """
    dec = kernel_decomposition(t, w, policy)

    def integrand(xi):
        return phi_principal_in_xi(xi, x) * dec.density(xi)

    val, _ = even_integral(integrand, abs(w.value), abs_tol)
    if dec.atom is not None:
        val += dec.atom.mass * spherical_phi(SpectralPoint.complementary(dec.atom.location), x)
    return val


def harmonicity_residual(t, omega, policy=DEFAULT_POLICY, abs_tol=1e-12):
    """|int q_t(w - xi) xi d xi - w|: the identity function is Q_t-harmonic."""
    R = integration_cutoff(omega)
    val, _ = integrate(lambda xi: qt_density(t, omega - xi, policy) * xi, -R, R,
                       abs_tol=abs_tol, panel_width=0.25)
    return abs(val - omega)


def chapman_kolmogorov_residual(t, s, omega, gamma, grid=None, policy=DEFAULT_POLICY):
    """Residual of

        g int k_t(w, xi) (q_s(g - xi) - q_s(g + xi)) / (2 xi) xi d xi = g k_{t+s}(w, g),

    k_t(w, xi) = (q_t(xi - w) - q_t(xi + w)) / (2w). ``grid`` is an optional
    (lo, hi, n_panels) integration grid; by default [-R, R] with 0.25-wide panels.
    """
    if t <= 0 or s <= 0:
        raise DomainError("t and s must be positive")
    if gamma == 0:
        return 0.0
    if grid is None:
        R = integration_cutoff(abs(omega) + abs(gamma))
        grid = (-R, R, math.ceil(2 * R / 0.25))
    lo, hi, n = grid
    edges = np.linspace(lo, hi, int(n) + 1)

    def integrand(xi):
        qs = qt_density(s, np.stack((gamma - xi, gamma + xi)), policy)
        return principal_kernel(t, omega, xi, policy) * 0.5 * (qs[0] - qs[1])

    lhs, _ = integrate_panels(integrand, edges, abs_tol=1e-13)
    rhs = principal_kernel(t + s, omega, np.array([gamma]), policy)[0]
    return abs(gamma * lhs - gamma * rhs)


# --------------------------------------------------------------------------
# intertwining kernel


def intertwining_kernel(omega, x):
    """int phi_{iw}(u) e^{iux} du = (pi/w) sinh(pi w) / (cosh(pi w) + cosh(pi x)).

    At w = 0 the limit pi^2 / (1 + cosh(pi x)).
    """
    x = np.abs(np.asarray(x, dtype=float))
    w = abs(omega)
    a = math.pi * w
    if w < _SMALL_OMEGA:
        num = math.pi * math.pi * (1 + a * a / 6)
    else:
        num = math.pi * math.sinh(a) / w
    # divide through by cosh(pi x) to stay finite for large x
    bx = math.pi * x
    out = num * np.exp(-bx) * 2 / (1 + np.exp(-2 * bx) + 2 * math.cosh(a) * np.exp(-bx))
    return _scalar(out)


def _scalar(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr
