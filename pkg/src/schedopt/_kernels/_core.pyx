# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the controlled game-Riccati fixed point and the
closed-loop Monte Carlo trial simulator.

Mirrors the interface of the pure NumPy module; selected at import by the
package's kernel loader.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

NAME = "compiled"


cdef void _matmul(const double* X, const double* Y, double* out,
                  int p, int q, int r) noexcept nogil:
    # out[p x r] = X[p x q] @ Y[q x r]
    cdef int i, j, k
    cdef double acc
    for i in range(p):
        for j in range(r):
            acc = 0.0
            for k in range(q):
                acc += X[i * q + k] * Y[k * r + j]
            out[i * r + j] = acc


cdef void _matmul_t1(const double* X, const double* Y, double* out,
                     int p, int q, int r) noexcept nogil:
    # out[p x r] = X^T @ Y with X stored as [q x p]
    cdef int i, j, k
    cdef double acc
    for i in range(p):
        for j in range(r):
            acc = 0.0
            for k in range(q):
                acc += X[k * p + i] * Y[k * r + j]
            out[i * r + j] = acc


cdef int _cholesky(const double* M, double* L, int n, double shift) noexcept nogil:
    # lower-triangular factor of (M - shift*I); returns -1 on pivot failure
    cdef int i, j, k
    cdef double acc
    for i in range(n):
        for j in range(i + 1):
            acc = M[i * n + j]
            if i == j:
                acc -= shift
            for k in range(j):
                acc -= L[i * n + k] * L[j * n + k]
            if i == j:
                if acc <= 0.0:
                    return -1
                L[i * n + i] = sqrt(acc)
            else:
                L[i * n + j] = acc / L[j * n + j]
    return 0


cdef void _chol_solve(const double* L, const double* B, double* X,
                      int n, int k) noexcept nogil:
    # solve (L L^T) X = B for B of shape [n x k]
    cdef int i, j, c
    cdef double acc
    for c in range(k):
        for i in range(n):
            acc = B[i * k + c]
            for j in range(i):
                acc -= L[i * n + j] * X[j * k + c]
            X[i * k + c] = acc / L[i * n + i]
        for i in range(n - 1, -1, -1):
            acc = X[i * k + c]
            for j in range(i + 1, n):
                acc -= L[j * n + i] * X[j * k + c]
            X[i * k + c] = acc / L[i * n + i]


cdef double _max_abs(const double* M, int size) noexcept nogil:
    cdef int i
    cdef double v = 0.0
    for i in range(size):
        if fabs(M[i]) > v:
            v = fabs(M[i])
    return v


cdef void _symmetrize(double* M, int n) noexcept nogil:
    cdef int i, j
    cdef double v
    for i in range(n):
        for j in range(i):
            v = 0.5 * (M[i * n + j] + M[j * n + i])
            M[i * n + j] = v
            M[j * n + i] = v


def pgamma_fixed_point(A_in, B_in, Q_in, R_in, double gamma, double tol,
                       int max_iter):
    """Iterate P <- Fc(Fa(P)) from 0.  Returns (code, P, iterations).

    code 0: converged, 1: gamma^2*I - P lost definiteness, 2: out of budget.
    """
    cdef cnp.ndarray[double, ndim=2, mode="c"] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] B = np.ascontiguousarray(B_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Q = np.ascontiguousarray(Q_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] R = np.ascontiguousarray(R_in, dtype=np.float64)
    cdef int n = A.shape[0]
    cdef int m = B.shape[1]
    cdef double g2 = gamma * gamma

    cdef cnp.ndarray[double, ndim=2, mode="c"] P = np.zeros((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] S = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] L = np.zeros((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] X = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] F = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] FA = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] FB = np.empty((n, m))
    cdef cnp.ndarray[double, ndim=2, mode="c"] AFA = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] AFB = np.empty((n, m))
    cdef cnp.ndarray[double, ndim=2, mode="c"] BFB = np.empty((m, m))
    cdef cnp.ndarray[double, ndim=2, mode="c"] Sc = np.empty((m, m))
    cdef cnp.ndarray[double, ndim=2, mode="c"] Lc = np.zeros((m, m))
    cdef cnp.ndarray[double, ndim=2, mode="c"] Y = np.empty((m, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] Gain = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=2, mode="c"] Pn = np.empty((n, n))

    cdef double* pP = &P[0, 0]
    cdef double* pS = &S[0, 0]
    cdef double* pL = &L[0, 0]
    cdef double* pX = &X[0, 0]
    cdef double* pF = &F[0, 0]
    cdef double* pA = &A[0, 0]
    cdef double* pB = &B[0, 0]
    cdef double* pQ = &Q[0, 0]
    cdef double* pR = &R[0, 0]
    cdef double* pPn = &Pn[0, 0]

    cdef int it, i, j
    cdef double shift, diff

    for it in range(1, max_iter + 1):
        # S = g2*I - P, definiteness check with relative shift
        for i in range(n):
            for j in range(n):
                pS[i * n + j] = (g2 if i == j else 0.0) - pP[i * n + j]
        shift = 1e-9 * (1.0 + _max_abs(pS, n * n))
        if _cholesky(pS, pL, n, shift) < 0:
            return 1, None, it
        _cholesky(pS, pL, n, 0.0)
        # F = Fa(P) = P + P S^-1 P
        _chol_solve(pL, pP, pX, n, n)
        _matmul(pP, pX, pF, n, n, n)
        for i in range(n * n):
            pF[i] += pP[i]
        _symmetrize(pF, n)
        # Fc(F)
        _matmul(pF, pA, &FA[0, 0], n, n, n)
        _matmul(pF, pB, &FB[0, 0], n, n, m)
        _matmul_t1(pA, &FA[0, 0], &AFA[0, 0], n, n, n)
        _matmul_t1(pA, &FB[0, 0], &AFB[0, 0], n, n, m)
        _matmul_t1(pB, &FB[0, 0], &BFB[0, 0], m, n, m)
        for i in range(m * m):
            (&Sc[0, 0])[i] = pR[i] + (&BFB[0, 0])[i]
        if _cholesky(&Sc[0, 0], &Lc[0, 0], m, 0.0) < 0:
            return 1, None, it
        # Y = Sc^-1 (B^T F A), reusing X as the m x n right-hand side
        _matmul_t1(pB, &FA[0, 0], pX, m, n, n)
        _chol_solve(&Lc[0, 0], pX, &Y[0, 0], m, n)
        _matmul(&AFB[0, 0], &Y[0, 0], &Gain[0, 0], n, m, n)
        for i in range(n * n):
            pPn[i] = (&AFA[0, 0])[i] + pQ[i] - (&Gain[0, 0])[i]
        _symmetrize(pPn, n)
        diff = 0.0
        for i in range(n * n):
            if fabs(pPn[i] - pP[i]) > diff:
                diff = fabs(pPn[i] - pP[i])
        for i in range(n * n):
            pP[i] = pPn[i]
        if diff < tol:
            return 0, P.copy(), it
    return 2, None, max_iter


def simulate_trials(A_in, B_in, K_in, Q_in, R_in, sigma_in, noise_in):
    """Closed-loop cost sums for a batch of trials; see the pure twin."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] B = np.ascontiguousarray(B_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] K = np.ascontiguousarray(K_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Q = np.ascontiguousarray(Q_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] R = np.ascontiguousarray(R_in, dtype=np.float64)
    cdef cnp.ndarray[signed char, ndim=1, mode="c"] sigma = np.ascontiguousarray(sigma_in, dtype=np.int8)
    cdef cnp.ndarray[double, ndim=3, mode="c"] noise = np.ascontiguousarray(noise_in, dtype=np.float64)

    cdef int N = noise.shape[0]
    cdef int T = noise.shape[1]
    cdef int n = noise.shape[2]
    cdef int m = B.shape[1]
    cdef int h = sigma.shape[0]

    cdef cnp.ndarray[double, ndim=1, mode="c"] costs = np.zeros(N)
    cdef cnp.ndarray[double, ndim=1, mode="c"] x = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] xhat = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] u = np.zeros(m)
    cdef cnp.ndarray[double, ndim=1, mode="c"] xn = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] xhn = np.zeros(n)

    cdef double* pA = &A[0, 0]
    cdef double* pB = &B[0, 0]
    cdef double* pK = &K[0, 0]
    cdef double* pQ = &Q[0, 0]
    cdef double* pR = &R[0, 0]
    cdef double* px = &x[0]
    cdef double* pxh = &xhat[0]
    cdef double* pu = &u[0]
    cdef double* pxn = &xn[0]
    cdef double* pxhn = &xhn[0]
    cdef signed char* psig = &sigma[0]
    cdef double* pnoise = &noise[0, 0, 0]

    cdef int trial, t, i, j
    cdef double acc, cost, drive

    with nogil:
        for trial in range(N):
            for i in range(n):
                px[i] = 0.0
                pxh[i] = 0.0
            cost = 0.0
            for t in range(T):
                if psig[t % h]:
                    for i in range(n):
                        pxh[i] = px[i]
                for i in range(m):
                    acc = 0.0
                    for j in range(n):
                        acc += pK[i * n + j] * pxh[j]
                    pu[i] = acc
                for i in range(n):
                    acc = 0.0
                    for j in range(n):
                        acc += pQ[i * n + j] * px[j]
                    cost += px[i] * acc
                for i in range(m):
                    acc = 0.0
                    for j in range(m):
                        acc += pR[i * m + j] * pu[j]
                    cost += pu[i] * acc
                for i in range(n):
                    drive = 0.0
                    for j in range(m):
                        drive += pB[i * m + j] * pu[j]
                    acc = 0.0
                    for j in range(n):
                        acc += pA[i * n + j] * px[j]
                    pxn[i] = acc + drive + pnoise[(trial * T + t) * n + i]
                    acc = 0.0
                    for j in range(n):
                        acc += pA[i * n + j] * pxh[j]
                    pxhn[i] = acc + drive
                for i in range(n):
                    px[i] = pxn[i]
                    pxh[i] = pxhn[i]
            costs[trial] = cost
    return costs
