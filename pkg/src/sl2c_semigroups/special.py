"""Closed-form building blocks: Pochhammer symbols, Laguerre polynomials of
index -1, Chebyshev polynomials, spherical functions of SL(2,C) and the
positive definite function psi_t = exp(t (1 - x coth x)).

Everything here is pure and accepts numpy arrays wherever a real argument
appears, except the integer orders.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .summation import bernoulli_numbers


@dataclass(frozen=True, eq=False)
class SpectralPoint:
    """A point of the Gelfand spectrum i R u [-1, 1].

    ``kind`` is ``"principal"`` (the point i*xi) or ``"complementary"`` (a real
    omega in [-1, 1]). Points are compared as spherical functions, so
    Principal(xi) == Principal(-xi) and Principal(0) == Complementary(0).
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("principal", "complementary"):
            raise ValueError(f"unknown spectral kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise ValueError("spectral parameter must be finite")
        if self.kind == "complementary" and abs(self.value) > 1:
            raise ValueError("complementary parameter must lie in [-1, 1]")

    @classmethod
    def principal(cls, xi):
        return cls("principal", float(xi))

    @classmethod
    def complementary(cls, omega):
        return cls("complementary", float(omega))

    def _key(self):
        # phi_w is even in its parameter; the zero point is shared by both series
        if self.value == 0:
            return ("zero", 0.0)
        return (self.kind, abs(self.value))

    def __eq__(self, other):
        if not isinstance(other, SpectralPoint):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def pochhammer(a, j):
    """Rising factorial a(a+1)...(a+j-1), with (a)_0 = 1 and (0)_j = 0 for j >= 1."""
    if j < 0:
        raise ValueError("pochhammer order must be nonnegative")
    return float(math.prod(a + k for k in range(j)))


def laguerre_neg1(j, x):
    """L_j^(-1)(x) by the three-term recurrence

        n L_n = (2n - 2 - x) L_{n-1} - (n - 2) L_{n-2},  L_0 = 1, L_1 = -x.
    """
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if j == 0:
        return _scalar(prev)
    cur = -x
    for n in range(2, j + 1):
        prev, cur = cur, ((2 * n - 2 - x) * cur - (n - 2) * prev) / n
    return _scalar(cur)


def laguerre_neg1_all(j_max, x):
    """Stack [L_0^(-1)(x), ..., L_{j_max}^(-1)(x)] along a new leading axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((j_max + 1,) + x.shape)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = -x
    for n in range(2, j_max + 1):
        out[n] = ((2 * n - 2 - x) * out[n - 1] - (n - 2) * out[n - 2]) / n
    return out


def laguerre_neg1_direct(j, x):
    """L_j^(-1)(x) from the explicit sum (1/j!) sum_m (-1)^m C(j,m) (m)_{j-m} x^m.

    The sum is evaluated in exact rational arithmetic on the binary value of
    ``x`` and rounded once, so it has none of the cancellation the plain
    floating-point sum suffers for large j.
    """
    xf = Fraction(float(x))
    total = Fraction(0)
    for m in range(j + 1):
        coeff = math.comb(j, m) * math.prod(range(m, j))  # (m)_{j-m}, (0)_0 = 1
        if coeff:
            total += (-1) ** m * coeff * xf ** m
    return float(total / math.factorial(j))


def chebyshev_t(n, u):
    """Chebyshev polynomial of the first kind, T_n(u), by the stable recurrence."""
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if n == 0:
        return _scalar(prev)
    cur = u.copy()
    for _ in range(n - 1):
        prev, cur = cur, 2 * u * cur - prev
    return _scalar(cur)


def _even_series_coefficients(n_terms=20):
    """c_n = 2^{2n} B_{2n} / (2n)! for n = 1..n_terms, so that
    x coth x = 1 + sum_n c_n x^{2n} (radius of convergence pi)."""
    b = bernoulli_numbers(2 * n_terms)
    return np.array([float(4 ** k * b[2 * k] / math.factorial(2 * k)) for k in range(1, n_terms + 1)])


_C = _even_series_coefficients()
_SERIES_CUT = 1.0


def _even_series(z, coeffs):
    z2 = z * z
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = (acc + c) * z2
    return acc


def log_sinhc(z):
    """log(sinh(z) / z) for real z, overflow-free, with the z -> 0 limit 0.

    Below |z| = 1 the series sum_n c_n z^{2n} / (2n) avoids the cancellation
    in log of a number close to 1.
    """
    z = np.abs(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    small = z < _SERIES_CUT
    large = z > 20
    mid = ~(small | large)
    out[small] = _even_series(z[small], _C / (2 * np.arange(1, _C.size + 1)))
    out[mid] = np.log(np.sinh(z[mid]) / z[mid])
    zl = z[large]
    out[large] = zl - math.log(2) + np.log1p(-np.exp(-2 * zl)) - np.log(zl)
    return _scalar(out)


def spherical_phi(w, x):
    """Spherical function phi_w(x) = sinh(w x) / (w sinh x) for w in the spectrum.

    For a principal point i*xi this is sin(xi x) / (xi sinh x). The x = 0 and
    zero-parameter singularities are removable and give phi = 1 at x = 0.
    """
    x = np.asarray(x, dtype=float)
    if w.kind == "complementary":
        out = np.exp(log_sinhc(w.value * x) - log_sinhc(x))
    else:
        # np.sinc(z) = sin(pi z) / (pi z) with the z = 0 branch built in
        out = np.sinc(w.value * x / math.pi) * np.exp(-log_sinhc(x))
    return _scalar(out)


def one_minus_x_coth(x):
    """The Levy exponent 1 - x coth x, by its Taylor series below |x| = 1."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < _SERIES_CUT
    out[small] = -_even_series(x[small], _C)
    big = ~small
    out[big] = 1 - x[big] / np.tanh(x[big])
    return out


def levy_exponent_psi(t, x):
    """psi_t(x) = exp(t (1 - x coth x)), a positive definite function with values in (0, 1]."""
    if t <= 0:
        raise ValueError("psi_t needs t > 0")
    return _scalar(np.exp(t * one_minus_x_coth(x)))


def generating_partial_sum(t, x, J):
    """Partial sum exp(-t x) sum_{j<=J} L_j^(-1)(2 t x) exp(-2 j x) of the
    generating-function expansion of exp(-t x coth x), x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("the Laguerre expansion is stated for x >= 0")
    lag = laguerre_neg1_all(J, 2 * t * x)
    decay = np.exp(-2 * np.multiply.outer(np.arange(J + 1), x))
    return _scalar(np.exp(-t * x) * np.sum(lag * decay, axis=0))


def cauchy_density(s, d, r):
    """Radial profile of the Cauchy semigroup density in R^d at |y| = r."""
    if s <= 0:
        raise ValueError("Cauchy scale must be positive")
    k = (d + 1) / 2
    r = np.asarray(r, dtype=float)
    return _scalar(math.gamma(k) * math.pi ** (-k) * s * (s * s + r * r) ** (-k))


def _scalar(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr
