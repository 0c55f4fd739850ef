"""Pure-numpy implementations of the hot kernels.

Mirrors the API of ``_kernels_cy`` (the compiled core); ``occert.kernels``
picks whichever is available at import time.  Everything here works on
plain float64 arrays in a g-orthonormal working basis.
"""

from __future__ import annotations

import numpy as np

# Lexicographic basis of 2-forms: index P <-> pair (i, j), i < j.
PAIRS = tuple((i, j) for i in range(6) for j in range(i + 1, 6))


def ricci_star_matrix(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """M[i, j] = sum_k R(e_i, e_k, J e_j, J e_k)."""
    T = np.tensordot(R, J, axes=([2], [0]))        # (i,k,b,j)
    return np.einsum("ikbj,bk->ij", T, J)


def refute_value(R: np.ndarray, J: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetrized star-Ricci form of (R, J)."""
    M = ricci_star_matrix(R, J)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def _givens_conj(J: np.ndarray, p: int, q: int, angle: float) -> np.ndarray:
    """E J E^T for the rotation E = exp(angle * (E_qp - E_pq))."""
    c, s = np.cos(angle), np.sin(angle)
    out = J.copy()
    rp, rq = out[p].copy(), out[q].copy()
    out[p] = c * rp - s * rq
    out[q] = s * rp + c * rq
    cp, cq = out[:, p].copy(), out[:, q].copy()
    out[:, p] = c * cp - s * cq
    out[:, q] = s * cp + c * cq
    return out


def refute_value_and_grad(R: np.ndarray, J: np.ndarray, eps: float) -> tuple[float, np.ndarray]:
    """Objective and its central-difference gradient over the 15 rotation
    generators (Givens conjugation keeps the perturbed J exactly on O(6))."""
    val = refute_value(R, J)
    grad = np.empty(len(PAIRS))
    for idx, (p, q) in enumerate(PAIRS):
        vp = refute_value(R, _givens_conj(J, p, q, eps))
        vm = refute_value(R, _givens_conj(J, p, q, -eps))
        grad[idx] = (vp - vm) / (2.0 * eps)
    return val, grad


def quad_value(R: np.ndarray, v1, v2, v3, v4) -> float:
    """R(v1, v2, v3, v4)."""
    return float(np.einsum("ijkl,i,j,k,l->", R, v1, v2, v3, v4))


def quad_value_and_grads(R: np.ndarray, v1, v2, v3, v4) -> tuple[float, np.ndarray]:
    """Value and the four partial contractions (gradient per argument)."""
    T3 = np.tensordot(R, v4, axes=([3], [0]))      # (i,j,k)
    T2 = np.tensordot(T3, v3, axes=([2], [0]))     # (i,j)
    g1 = T2 @ v2
    g2 = T2.T @ v1
    g3 = np.einsum("ijk,i,j->k", T3, v1, v2)
    g4 = np.einsum("ijkl,i,j,k->l", R, v1, v2, v3)
    val = float(v1 @ g1)
    return val, np.stack([g1, g2, g3, g4])
