"""Compensated summation and Hurwitz-zeta tails for slowly decaying sums."""
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np


@lru_cache(maxsize=None)
def bernoulli_numbers(n):
    """Exact B_0..B_n (B_1 = -1/2) as Fractions, by the Akiyama-Tanigawa algorithm."""
    row = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    if n >= 1:
        out[1] = -out[1]
    return tuple(out)


_EM_TERMS = 8
_BERNOULLI = np.array([float(b) for b in bernoulli_numbers(2 * _EM_TERMS + 2)])


def compensated_sum(terms, axis=0):
    """Neumaier-compensated sum of `terms` along `axis`.

    Works elementwise on the remaining axes, so a stack of term vectors is
    reduced in a single pass. Complex input is compensated separately in
    the real and imaginary parts.
    """
    arr = np.asarray(terms)
    if np.iscomplexobj(arr):
        return (compensated_sum(arr.real, axis)
                + 1j * compensated_sum(arr.imag, axis))
    arr = np.moveaxis(arr.astype(float, copy=False), axis, 0)
    total = np.zeros(arr.shape[1:])
    comp = np.zeros(arr.shape[1:])
    for term in arr:
        new = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - new) + term, (term - new) + total)
        total = new
    out = total + comp
    return out if out.ndim else float(out)


def hurwitz_zeta(s, q, terms=_EM_TERMS):
    """Euler-Maclaurin evaluation of sum_{n>=0} (q + n)^(-s).

    Parameters
    ----------
    s : int
        Exponent, at least 2.
    q : complex ndarray
        Shift with positive real part; accuracy needs |q| well above
        (s + 2*terms) / (2*pi).

    Returns
    -------
    value : complex ndarray
    err : float ndarray
        Size of the first omitted correction, inflated by the sector factor
        sec(arg q)^(s + 2*terms + 1) that bounds the remainder off the real axis.
    """
    if s < 2:
        raise ValueError("hurwitz_zeta needs s >= 2")
    q = np.asarray(q, dtype=complex)
    qinv = 1.0 / q
    qs = q ** (-s)
    value = q * qs / (s - 1) + 0.5 * qs
    rising = float(s)                # (s)_{2k-1}
    power = qs * qinv                # q^{-s-2k+1}
    for k in range(1, terms + 1):
        value = value + _BERNOULLI[2 * k] / math.factorial(2 * k) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power = power * qinv * qinv
    k = terms + 1
    omitted = abs(_BERNOULLI[2 * k]) / math.factorial(2 * k) * rising * np.abs(power)
    sector = np.abs(q) / np.maximum(q.real, 1e-300)
    err = omitted * sector ** (s + 2 * k - 1)
    return value, err
