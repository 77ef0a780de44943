"""Panelled Gauss-Legendre quadrature with global panel doubling.

Each refinement halves every panel and the result is accepted once two
successive levels agree to ``abs_tol``; the returned error is that
difference. Integrands are called with a whole array of nodes at once.
"""
import math
from functools import lru_cache

import numpy as np

from .errors import ToleranceNotMet
from .summation import compensated_sum


@lru_cache(maxsize=None)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def panel_sums(f, edges, n_nodes=20):
    """Gauss-Legendre integral of ``f`` over each panel [edges[k], edges[k+1]]."""
    nodes, weights = _legendre(n_nodes)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = mid[:, None] + half[:, None] * nodes[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (fx @ weights)


def _split(edges, level):
    if level == 0:
        return np.asarray(edges, dtype=float)
    k = 2 ** level
    edges = np.asarray(edges, dtype=float)
    frac = np.arange(k) / k
    inner = edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * frac[None, :]
    return np.append(inner.ravel(), edges[-1])


def integrate_panels(f, edges, abs_tol=1e-12, n_nodes=20, max_doublings=6):
    """Integrate over the union of panels given by ``edges``.

    Returns ``(value, err)``. Raises ToleranceNotMet if ``max_doublings``
    refinements do not bring two successive levels within ``abs_tol``.
    """
    prev = compensated_sum(panel_sums(f, edges, n_nodes))
    for level in range(1, max_doublings + 1):
        cur = compensated_sum(panel_sums(f, _split(edges, level), n_nodes))
        err = abs(cur - prev)
        if err <= abs_tol:
            return cur, err
        prev = cur
    raise ToleranceNotMet(
        f"panel doubling stalled at |diff| = {err:.3e} > {abs_tol:.1e}")


def integrate(f, a, b, abs_tol=1e-12, panel_width=0.5, n_nodes=20, max_doublings=6):
    """Integrate a smooth vectorised ``f`` over [a, b] starting from panels
    no wider than ``panel_width``."""
    if b <= a:
        return 0.0, 0.0
    n = max(1, math.ceil((b - a) / panel_width))
    return integrate_panels(f, np.linspace(a, b, n + 1), abs_tol, n_nodes, max_doublings)


def oscillatory_edges(freq, upper, kind, max_width=1.0):
    """Panel edges on [0, upper] placed at the zeros of cos/sin(freq x),
    further split so no panel exceeds ``max_width``."""
    freq = abs(freq)
    if freq > 0:
        period = math.pi / freq
        offset = 0.5 * period if kind == "cos" else period
        zeros = np.arange(offset, upper, period)
    else:
        zeros = np.empty(0)
    edges = np.concatenate(([0.0], zeros, [upper]))
    edges = np.unique(edges)
    pieces = np.maximum(1, np.ceil(np.diff(edges) / max_width).astype(int))
    if np.all(pieces == 1):
        return edges
    out = [edges[:1]]
    for lo, hi, k in zip(edges[:-1], edges[1:], pieces):
        out.append(np.linspace(lo, hi, k + 1)[1:])
    return np.concatenate(out)
