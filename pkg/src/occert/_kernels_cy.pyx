# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: star-Ricci contraction, its smallest eigenvalue,
the Givens-perturbation gradient used by the refutation search, and
evaluation of 4-linear forms with gradients for the sup-norm ascent.

Mirrors occert._kernels_py; parity is covered by tests.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from scipy.linalg.cython_lapack cimport dsyev

cnp.import_array()

# Lexicographic pair basis, kept in sync with _kernels_py.PAIRS.
cdef int N = 6
cdef int NPAIRS = 15
cdef int[15] PAIR_P = [0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4]
cdef int[15] PAIR_Q = [1, 2, 3, 4, 5, 2, 3, 4, 5, 3, 4, 5, 4, 5, 5]


cdef void _ricci_star(const double* R, const double* J, double* M) noexcept nogil:
    # M[i,j] = sum_{k,a,b} R[i,k,a,b] J[a,j] J[b,k]
    cdef double T[36]
    cdef int i, j, k, a, b
    cdef double acc
    for i in range(N):
        for a in range(N):
            acc = 0.0
            for k in range(N):
                for b in range(N):
                    acc += R[((i * N + k) * N + a) * N + b] * J[b * N + k]
            T[i * N + a] = acc
    for i in range(N):
        for j in range(N):
            acc = 0.0
            for a in range(N):
                acc += T[i * N + a] * J[a * N + j]
            M[i * N + j] = acc


cdef double _min_eig_sym(double* M) noexcept nogil:
    # Smallest eigenvalue of the symmetric part of M (6x6).
    cdef double A[36]
    cdef double w[6]
    cdef double work[96]
    cdef int n = N, lda = N, lwork = 96, info = 0
    cdef int i, j
    for i in range(N):
        for j in range(N):
            A[i * N + j] = 0.5 * (M[i * N + j] + M[j * N + i])
    dsyev('N', 'L', &n, A, &lda, w, work, &lwork, &info)
    if info != 0:
        return 1e308
    return w[0]


cdef double _refute_value_raw(const double* R, const double* J) noexcept nogil:
    cdef double M[36]
    _ricci_star(R, J, M)
    return _min_eig_sym(M)


cdef void _givens_conj(const double* J, int p, int q, double angle,
                       double* out) noexcept nogil:
    # out = E J E^T for the plane rotation E = exp(angle (E_qp - E_pq))
    cdef double c = cos(angle), s = sin(angle)
    cdef double tp, tq
    cdef int i
    for i in range(36):
        out[i] = J[i]
    for i in range(N):
        tp = out[p * N + i]
        tq = out[q * N + i]
        out[p * N + i] = c * tp - s * tq
        out[q * N + i] = s * tp + c * tq
    for i in range(N):
        tp = out[i * N + p]
        tq = out[i * N + q]
        out[i * N + p] = c * tp - s * tq
        out[i * N + q] = s * tp + c * tq


def ricci_star_matrix(cnp.ndarray[double, ndim=4, mode="c"] R not None,
                      cnp.ndarray[double, ndim=2, mode="c"] J not None):
    """M[i, j] = sum_k R(e_i, e_k, J e_j, J e_k)."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] M = np.empty((6, 6))
    _ricci_star(<const double*> R.data, <const double*> J.data,
                <double*> M.data)
    return M


def refute_value(R, J):
    """Smallest eigenvalue of the symmetrized star-Ricci form of (R, J)."""
    cdef cnp.ndarray[double, ndim=4, mode="c"] Rc = np.ascontiguousarray(R, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Jc = np.ascontiguousarray(J, dtype=np.float64)
    return _refute_value_raw(<const double*> Rc.data, <const double*> Jc.data)


def refute_value_and_grad(R, J, double eps):
    """Objective and central-difference gradient over the 15 rotations."""
    cdef cnp.ndarray[double, ndim=4, mode="c"] Rc = np.ascontiguousarray(R, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Jc = np.ascontiguousarray(J, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] grad = np.empty(NPAIRS)
    cdef const double* Rp = <const double*> Rc.data
    cdef const double* Jp = <const double*> Jc.data
    cdef double* gp = <double*> grad.data
    cdef double Jt[36]
    cdef double vp, vm, val
    cdef int idx
    with nogil:
        val = _refute_value_raw(Rp, Jp)
        for idx in range(NPAIRS):
            _givens_conj(Jp, PAIR_P[idx], PAIR_Q[idx], eps, Jt)
            vp = _refute_value_raw(Rp, Jt)
            _givens_conj(Jp, PAIR_P[idx], PAIR_Q[idx], -eps, Jt)
            vm = _refute_value_raw(Rp, Jt)
            gp[idx] = (vp - vm) / (2.0 * eps)
    return val, grad


def quad_value(R, v1, v2, v3, v4):
    """R(v1, v2, v3, v4)."""
    cdef cnp.ndarray[double, ndim=4, mode="c"] Rc = np.ascontiguousarray(R, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] a = np.ascontiguousarray(v1, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] b = np.ascontiguousarray(v2, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] c = np.ascontiguousarray(v3, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] d = np.ascontiguousarray(v4, dtype=np.float64)
    cdef const double* Rp = <const double*> Rc.data
    cdef double acc = 0.0, row
    cdef int i, j, k, l
    with nogil:
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    row = 0.0
                    for l in range(N):
                        row += Rp[((i * N + j) * N + k) * N + l] * (<const double*> d.data)[l]
                    acc += row * (<const double*> a.data)[i] * (<const double*> b.data)[j] * (<const double*> c.data)[k]
    return acc


def quad_value_and_grads(R, v1, v2, v3, v4):
    """Value and the four partial contractions (gradient per argument)."""
    cdef cnp.ndarray[double, ndim=4, mode="c"] Rc = np.ascontiguousarray(R, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] a = np.ascontiguousarray(v1, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] b = np.ascontiguousarray(v2, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] c = np.ascontiguousarray(v3, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] d = np.ascontiguousarray(v4, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] grads = np.zeros((4, 6))
    cdef const double* Rp = <const double*> Rc.data
    cdef const double* ap = <const double*> a.data
    cdef const double* bp = <const double*> b.data
    cdef const double* cp = <const double*> c.data
    cdef const double* dp = <const double*> d.data
    cdef double* gp = <double*> grads.data
    cdef double T3[216]
    cdef double T2[36]
    cdef double acc, val
    cdef int i, j, k, l
    with nogil:
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    acc = 0.0
                    for l in range(N):
                        acc += Rp[((i * N + j) * N + k) * N + l] * dp[l]
                    T3[(i * N + j) * N + k] = acc
        for i in range(N):
            for j in range(N):
                acc = 0.0
                for k in range(N):
                    acc += T3[(i * N + j) * N + k] * cp[k]
                T2[i * N + j] = acc
        val = 0.0
        for i in range(N):
            for j in range(N):
                gp[0 * N + i] += T2[i * N + j] * bp[j]
                gp[1 * N + j] += T2[i * N + j] * ap[i]
            val += gp[0 * N + i] * ap[i]
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    gp[2 * N + k] += T3[(i * N + j) * N + k] * ap[i] * bp[j]
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    acc = ap[i] * bp[j] * cp[k]
                    for l in range(N):
                        gp[3 * N + l] += Rp[((i * N + j) * N + k) * N + l] * acc
    return val, grads
