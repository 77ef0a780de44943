"""Matrix calculus for the magnetic-field generator in sp(4, R).

4x4 real matrices act on (q1, q2, p1, p2) and the symplectic form is
J_1 = [[0, I2], [-I2, 0]]. All values are plain numpy arrays; the
dataclasses below only group them.
"""
from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError, StructureError

TOL = 1e-12

I2 = np.eye(2)
A2 = np.array([[0.0, -1.0], [1.0, 0.0]])
J1 = np.block([[np.zeros((2, 2)), I2], [-I2, np.zeros((2, 2))]])


def _check_alpha(alpha):
    if not alpha > 0:
        raise DomainError("alpha must be positive")


def build_generators(alpha):
    """Return (A_alpha, J_alpha):

        A_alpha = [[alpha A, I2], [-alpha^2 I2, alpha A]],  A = [[0, -1], [1, 0]]
        J_alpha = [[0, I2 / alpha], [-alpha I2, 0]]          (J_alpha^2 = -I4)
    """
    _check_alpha(alpha)
    a_mat = np.block([[alpha * A2, I2], [-alpha * alpha * I2, alpha * A2]])
    j_mat = np.block([[np.zeros((2, 2)), I2 / alpha], [-alpha * I2, np.zeros((2, 2))]])
    return a_mat, j_mat


def is_symplectic(S, tol=TOL):
    return float(np.max(np.abs(S.T @ J1 @ S - J1))) <= tol * max(1.0, float(np.max(np.abs(S))) ** 2)


def power_identity_residuals(alpha, j_max=6):
    """Relative residuals of

        A^{2j}   = (-1)^{j-1} (2 alpha)^{2j-1} A J_alpha
        A^{2j-1} = (-1)^{j-1} (2 alpha)^{2j-2} A

    for j = 1..j_max, as a list of (power, residual)."""
    a_mat, j_mat = build_generators(alpha)
    aj = a_mat @ j_mat
    out = []
    power = np.eye(4)
    for n in range(1, 2 * j_max + 1):
        power = power @ a_mat
        j = (n + 1) // 2
        sign = (-1) ** (j - 1)
        if n % 2 == 0:
            expected = sign * (2 * alpha) ** (2 * j - 1) * aj
        else:
            expected = sign * (2 * alpha) ** (2 * j - 2) * a_mat
        scale = np.max(np.abs(expected))
        out.append((n, float(np.max(np.abs(power - expected)) / scale)))
    return out


def uv_blocks(alpha, t):
    """U_alpha(t) = cos^2 I2 + sin cos A and V_alpha(t) = sin^2 A + sin cos I2, angle alpha t."""
    s, c = math.sin(alpha * t), math.cos(alpha * t)
    return c * c * I2 + s * c * A2, s * s * A2 + s * c * I2


def exp_tA_displayed(alpha, t):
    """I4 + sin^2(alpha t)/alpha A J_alpha + sin cos/alpha A_alpha.

    This is the matrix often written for e^{-tA_alpha}; it is in fact e^{+tA_alpha}.
    """
    a_mat, j_mat = build_generators(alpha)
    s, c = math.sin(alpha * t), math.cos(alpha * t)
    return np.eye(4) + s * s / alpha * (a_mat @ j_mat) + s * c / alpha * a_mat


def exp_neg_tA_closed(alpha, t):
    """e^{-t A_alpha} = I4 + sin^2(alpha t)/alpha A J_alpha - sin cos/alpha A_alpha.

    Equivalently [[U(-t), V(-t)/alpha], [-alpha V(-t), U(-t)]] with the U, V
    blocks of ``uv_blocks``. Periodic in t with period pi/alpha.
    """
    return exp_tA_displayed(alpha, -t)


def expm_taylor(B, tol=1e-18, max_terms=40):
    """exp(B) by scaling and squaring with a Taylor core."""
    B = np.asarray(B, dtype=float)
    norm = float(np.max(np.sum(np.abs(B), axis=0)))
    squarings = max(0, math.ceil(math.log2(norm)) + 2) if norm > 0 else 0
    X = B / 2.0 ** squarings
    result = np.eye(B.shape[0])
    term = np.eye(B.shape[0])
    for k in range(1, max_terms + 1):
        term = term @ X / k
        result = result + term
        if np.max(np.abs(term)) < tol:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def exp_neg_tA_series(alpha, t):
    """e^{-t A_alpha} from the exponential series, independent of the closed form."""
    a_mat, _ = build_generators(alpha)
    return expm_taylor(-t * a_mat)


def _core(P, what):
    """Extract C from P = C kron I2, raising StructureError otherwise."""
    C = np.array([[P[0, 0], P[0, 2]], [P[2, 0], P[2, 2]]])
    err = float(np.max(np.abs(P - np.kron(C, I2))))
    if err > TOL * max(1.0, float(np.max(np.abs(P)))):
        raise StructureError(f"{what} is not of the form C kron I2 (deviation {err:.2e})")
    return C


def gram_cores_closed(alpha, t):
    """The 2x2 cores of S S^T and S^T S for S = e^{-t A_alpha}, in closed form."""
    s, c = math.sin(alpha * t), math.cos(alpha * t)
    off = -s * c * (1 / alpha - alpha)
    big = c * c + s * s / (alpha * alpha)
    small = c * c + alpha * alpha * s * s
    return np.array([[big, off], [off, small]]), np.array([[small, off], [off, big]])


class GramProducts(NamedTuple):
    SSt: np.ndarray
    StS: np.ndarray
    left: np.ndarray
    right: np.ndarray


def gram_products(alpha, t):
    """Gram products of S = e^{-t A_alpha} and their verified 2x2 cores.

    Checks the C kron I2 pattern, agreement of the cores with the closed form,
    and the U/V relations U U^T = cos^2 I2, V V^T = sin^2 I2,
    U V^T = U^T V = sin cos I2.
    """
    S = exp_neg_tA_closed(alpha, t)
    sst, sts = S @ S.T, S.T @ S
    left, right = _core(sst, "S S^T"), _core(sts, "S^T S")
    want_l, want_r = gram_cores_closed(alpha, t)
    dev = max(float(np.max(np.abs(left - want_l))), float(np.max(np.abs(right - want_r))))
    if dev > TOL * max(1.0, float(np.max(np.abs(want_l)))):
        raise StructureError(f"Gram cores deviate from the closed form by {dev:.2e}")
    U, V = uv_blocks(alpha, t)
    s, c = math.sin(alpha * t), math.cos(alpha * t)
    for lhs, rhs in ((U @ U.T, c * c * I2), (V @ V.T, s * s * I2),
                     (U @ V.T, s * c * I2), (U.T @ V, s * c * I2)):
        if np.max(np.abs(lhs - rhs)) > TOL:
            raise StructureError("U/V block relations fail")
    return GramProducts(sst, sts, left, right)


@dataclass(frozen=True)
class CartanFactors:
    """S = M diag(l1 I2, l2 I2) R with M, R orthogonal and symplectic, l1 >= l2, l1 l2 = 1."""

    M: np.ndarray
    lambdas: tuple
    R: np.ndarray

    def middle(self):
        l1, l2 = self.lambdas
        return np.diag([l1, l1, l2, l2])

    def reassemble(self):
        return self.M @ self.middle() @ self.R

    def residuals(self, S):
        l1, l2 = self.lambdas
        eye = np.eye(4)
        return {
            "reassembly": float(np.max(np.abs(self.reassemble() - S))),
            "lambda_product": abs(l1 * l2 - 1.0),
            "M_orthogonal": float(np.max(np.abs(self.M @ self.M.T - eye))),
            "R_orthogonal": float(np.max(np.abs(self.R @ self.R.T - eye))),
            "M_symplectic": float(np.max(np.abs(self.M.T @ J1 @ self.M - J1))),
            "R_symplectic": float(np.max(np.abs(self.R.T @ J1 @ self.R - J1))),
        }


def _rotation_for(core):
    """Rotation [[c, -s], [s, c]] (c >= 0) whose first column spans the top
    eigenvector of the symmetric 2x2 ``core``; identity on a degenerate core."""
    a, b, d = core[0, 0], 0.5 * (core[0, 1] + core[1, 0]), core[1, 1]
    scale = max(abs(a), abs(d), 1.0)
    if abs(a - d) <= TOL * scale and abs(b) <= TOL * scale:
        return np.eye(2)
    theta = 0.5 * math.atan2(2 * b, a - d)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def cartan_decompose(S):
    """Cartan decomposition S = M diag(l1 I2, l2 I2) R of a symplectic S
    whose Gram product S S^T has the C kron I2 form.

    M lifts the eigenbasis rotation of the 2x2 core C (chosen closest to the
    identity); R comes from the polar factor (S S^T)^{-1/2} S.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (4, 4):
        raise StructureError("expected a 4x4 matrix")
    core = _core(S @ S.T, "S S^T")
    a, b, d = core[0, 0], 0.5 * (core[0, 1] + core[1, 0]), core[1, 1]
    mu1 = 0.5 * (a + d) + math.hypot(0.5 * (a - d), b)
    mu2 = (a * d - b * b) / mu1
    if not mu2 > 0:
        raise StructureError("S S^T is not positive definite")
    Q2 = _rotation_for(core)
    # the rotation [[c, -s], [s, c]] kron I2 has the orthogonal-symplectic block form
    M = np.kron(Q2, I2)
    l1, l2 = math.sqrt(mu1), math.sqrt(mu2)
    inv_root = M @ np.diag([1 / l1, 1 / l1, 1 / l2, 1 / l2]) @ M.T
    R = M.T @ (inv_root @ S)
    return CartanFactors(M, (l1, l2), R)


def identify_u2(Q, tol=TOL):
    """Map an orthogonal-symplectic [[G, F], [-F, G]] to G + iF in U(2)."""
    Q = np.asarray(Q, dtype=float)
    G, F = Q[:2, :2], Q[:2, 2:]
    dev = max(float(np.max(np.abs(Q[2:, 2:] - G))), float(np.max(np.abs(Q[2:, :2] + F))))
    if dev > tol:
        raise StructureError(f"matrix is not of the block form [[G, F], [-F, G]] (deviation {dev:.2e})")
    return G + 1j * F


def _to_su2(U):
    # principal square root of the determinant; the overall sign of the
    # SL(2,C) image is therefore a convention, not an invariant
    return U / np.sqrt(np.linalg.det(U))


def assign_sl2c(factors):
    """u(M) diag(l1, 1/l1) u(R) in SL(2, C), with u the U(2) image rescaled by det^{-1/2}."""
    l1 = factors.lambdas[0]
    um, ur = _to_su2(identify_u2(factors.M)), _to_su2(identify_u2(factors.R))
    return um @ np.diag([l1, 1 / l1]).astype(complex) @ ur


PHASE_CONVENTION = "U(2) factors rescaled by det^(-1/2), principal square root"


def pipeline(alpha, t):
    """Run the full chain for e^{-t A_alpha} and return a dict of matrices and residuals."""
    a_mat, j_mat = build_generators(alpha)
    S = exp_neg_tA_closed(alpha, t)
    series = exp_neg_tA_series(alpha, t)
    gram = gram_products(alpha, t)
    factors = cartan_decompose(S)
    um, ur = identify_u2(factors.M), identify_u2(factors.R)
    g = assign_sl2c(factors)
    eye2 = np.eye(2)
    res = factors.residuals(S)
    res.update({
        "closed_vs_series": float(np.max(np.abs(S - series))),
        "J_squared": float(np.max(np.abs(j_mat @ j_mat + np.eye(4)))),
        "power_identities": max(r for _, r in power_identity_residuals(alpha)),
        "det_left_core": abs(float(np.linalg.det(gram.left)) - 1.0),
        "det_right_core": abs(float(np.linalg.det(gram.right)) - 1.0),
        "u2_M_unitary": float(np.max(np.abs(um @ um.conj().T - eye2))),
        "u2_R_unitary": float(np.max(np.abs(ur @ ur.conj().T - eye2))),
        "sl2c_det": abs(complex(np.linalg.det(g)) - 1.0),
        "sl2c_singular_values": float(np.max(np.abs(
            np.linalg.svd(g, compute_uv=False) - np.array(factors.lambdas[:1] + (1 / factors.lambdas[0],))))),
    })
    return {
        "alpha": float(alpha),
        "t": float(t),
        "phase_convention": PHASE_CONVENTION,
        "A_alpha": a_mat,
        "J_alpha": j_mat,
        "exp_neg_tA": S,
        "gram_left_core": gram.left,
        "gram_right_core": gram.right,
        "cartan_M": factors.M,
        "cartan_lambdas": list(factors.lambdas),
        "cartan_R": factors.R,
        "u2_M": um,
        "u2_R": ur,
        "sl2c": g,
        "residuals": res,
    }


def _as_complex(x):
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        return arr
    arr = arr.astype(float)
    # serialised form: nested [re, im] pairs
    return arr[..., 0] + 1j * arr[..., 1]


def reverify(doc, tol=TOL):
    """Recheck the invariants of a (possibly deserialised) pipeline document.

    Returns a dict name -> (measured, passed).
    """
    S = np.asarray(doc["exp_neg_tA"], dtype=float)
    M, R = np.asarray(doc["cartan_M"], dtype=float), np.asarray(doc["cartan_R"], dtype=float)
    l1, l2 = doc["cartan_lambdas"]
    factors = CartanFactors(M, (l1, l2), R)
    out = {k: (v, v <= tol) for k, v in factors.residuals(S).items()}
    g = _as_complex(doc["sl2c"])
    d = abs(complex(np.linalg.det(g)) - 1.0)
    out["sl2c_det"] = (d, d <= tol)
    for key in ("u2_M", "u2_R"):
        u = _as_complex(doc[key])
        e = float(np.max(np.abs(u @ u.conj().T - np.eye(2))))
        out[key + "_unitary"] = (e, e <= tol)
    closed = exp_neg_tA_closed(doc["alpha"], doc["t"])
    e = float(np.max(np.abs(closed - S)))
    out["matrix_matches_closed_form"] = (e, e <= tol)
    return out
