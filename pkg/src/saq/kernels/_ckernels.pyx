# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numeric kernels; see ``_pykernels`` for layouts and semantics."""

import numpy as np
from libc.math cimport fabs, sqrt, isfinite
from libc.stdlib cimport malloc, free

NAME = "compiled"

cdef enum:
    MAXD = 32


cdef struct System:
    const int* exps
    const double* coefs
    const long long* offsets
    int m
    int n
    int k


cdef void eval_range(System* s, const double* z, int count, double* out) noexcept nogil:
    cdef int q, v, r
    cdef long long t
    cdef double acc, term
    for q in range(count):
        acc = 0.0
        for t in range(s.offsets[q], s.offsets[q + 1]):
            term = s.coefs[t]
            for v in range(s.m):
                for r in range(s.exps[t * s.m + v]):
                    term *= z[v]
            acc += term
        out[q] = acc


cdef bint lu_solve(double* A, double* b, int d) noexcept nogil:
    """Solve A s = b in place (solution left in b); False on a zero pivot."""
    cdef int c, r, cc, piv
    cdef double best, f, tmp
    for c in range(d):
        piv = c
        best = fabs(A[c * d + c])
        for r in range(c + 1, d):
            if fabs(A[r * d + c]) > best:
                best = fabs(A[r * d + c])
                piv = r
        if best == 0.0:
            return False
        if piv != c:
            for cc in range(d):
                tmp = A[c * d + cc]
                A[c * d + cc] = A[piv * d + cc]
                A[piv * d + cc] = tmp
            tmp = b[c]
            b[c] = b[piv]
            b[piv] = tmp
        for r in range(c + 1, d):
            f = A[r * d + c] / A[c * d + c]
            if f != 0.0:
                for cc in range(c, d):
                    A[r * d + cc] -= f * A[c * d + cc]
                b[r] -= f * b[c]
    for c in range(d - 1, -1, -1):
        tmp = b[c]
        for cc in range(c + 1, d):
            tmp -= A[c * d + cc] * b[cc]
        b[c] = tmp / A[c * d + c]
    return True


cdef double norm(const double* v, int d) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(d):
        acc += v[i] * v[i]
    return sqrt(acc)


cdef void build_kkt(System* s, const double* vals, const double* y, const double* mu,
                    const double* p, double* F, double* K) noexcept nogil:
    cdef int n = s.n, k = s.k, d = s.n + s.k
    cdef int i, l, j
    cdef double acc
    for i in range(d * d):
        K[i] = 0.0
    for i in range(n):
        acc = y[i] - p[i]
        for j in range(k):
            acc += mu[j] * vals[k + j * n + i]
        F[i] = acc
        for l in range(n):
            acc = 1.0 if i == l else 0.0
            for j in range(k):
                acc += mu[j] * vals[k + k * n + (j * n + i) * n + l]
            K[i * d + l] = acc
        for j in range(k):
            K[i * d + n + j] = vals[k + j * n + i]
            K[(n + j) * d + i] = vals[k + j * n + i]
    for j in range(k):
        F[n + j] = vals[j]


cdef bint min_norm_multiplier(System* s, const double* vals, const double* rhs, double* out) noexcept nogil:
    """Solve (J J^T) out = J rhs for the k multipliers."""
    cdef int n = s.n, k = s.k
    cdef int a, b, i
    cdef double G[MAXD * MAXD]
    cdef double acc
    for a in range(k):
        for b in range(k):
            acc = 0.0
            for i in range(n):
                acc += vals[k + a * n + i] * vals[k + b * n + i]
            G[a * k + b] = acc
        acc = 0.0
        for i in range(n):
            acc += vals[k + a * n + i] * rhs[i]
        out[a] = acc
    return lu_solve(G, out, k)


def eval_polys(const int[:, ::1] exps, const double[::1] coefs, const long long[::1] offsets,
               const double[::1] z, int count=-1):
    cdef System s
    cdef int P = offsets.shape[0] - 1
    if count < 0:
        count = P
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] ov = out
    s.exps = &exps[0, 0]
    s.coefs = &coefs[0]
    s.offsets = &offsets[0]
    s.m = exps.shape[1]
    with nogil:
        eval_range(&s, &z[0], count, &ov[0])
    return out


def int_signs(const long long[:, ::1] exps, const long long[::1] coefs, int degree,
              const long long[:, ::1] nums, const long long[::1] dens):
    cdef Py_ssize_t M = nums.shape[0], T = coefs.shape[0], n = nums.shape[1]
    cdef Py_ssize_t i, t, v
    cdef long long acc, term, e, tot, r
    out = np.zeros(M, dtype=np.int8)
    cdef signed char[::1] ov = out
    with nogil:
        for i in range(M):
            acc = 0
            for t in range(T):
                term = coefs[t]
                tot = 0
                for v in range(n):
                    e = exps[t, v]
                    tot += e
                    for r in range(e):
                        term *= nums[i, v]
                for r in range(degree - tot):
                    term *= dens[i]
                acc += term
            ov[i] = (acc > 0) - (acc < 0)
    return out


def project(const int[:, ::1] exps, const double[::1] coefs, const long long[::1] offsets,
            int n, int k, x, y0, int max_iter, double tol):
    cdef System s
    if 2 * n > MAXD or k > n:
        raise ValueError("system too large for the compiled kernel")
    s.exps = &exps[0, 0]
    s.coefs = &coefs[0]
    s.offsets = &offsets[0]
    s.m = 2 * n
    s.n = n
    s.k = k
    cdef int count = k + k * n
    cdef double z[MAXD]
    cdef double znew[MAXD]
    cdef double vals[MAXD * MAXD + MAXD]
    cdef double vnew[MAXD * MAXD + MAXD]
    cdef double w[MAXD]
    cdef double step[MAXD]
    cdef double gn, gn_new, alpha
    cdef int i, j, it = 0, h
    cdef bint accepted
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y0, dtype=np.float64)
    for i in range(n):
        z[i] = xv[i]
        z[n + i] = yv[i]
        znew[i] = xv[i]
    with nogil:
        eval_range(&s, z, count, vals)
        gn = norm(vals, k)
        while it < max_iter and gn > tol:
            it += 1
            # minimum-norm correction J^T (J J^T)^{-1} g
            for j in range(k):
                w[j] = vals[j]
            if not _gram_solve(&s, vals, w):
                break
            for i in range(n):
                step[i] = 0.0
                for j in range(k):
                    step[i] += vals[k + j * n + i] * w[j]
            alpha = 1.0
            accepted = False
            for h in range(30):
                for i in range(n):
                    znew[n + i] = z[n + i] - alpha * step[i]
                eval_range(&s, znew, count, vnew)
                gn_new = norm(vnew, k)
                if isfinite(gn_new) and gn_new < gn:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                break
            for i in range(n):
                z[n + i] = znew[n + i]
            for i in range(count):
                vals[i] = vnew[i]
            gn = gn_new
    y = np.array([z[n + i] for i in range(n)], dtype=np.float64)
    return y, gn, it


cdef bint _gram_solve(System* s, const double* vals, double* w) noexcept nogil:
    cdef int n = s.n, k = s.k
    cdef int a, b, i
    cdef double G[MAXD * MAXD]
    cdef double acc
    for a in range(k):
        for b in range(k):
            acc = 0.0
            for i in range(n):
                acc += vals[k + a * n + i] * vals[k + b * n + i]
            G[a * k + b] = acc
    return lu_solve(G, w, k)


def kkt_solve(const int[:, ::1] exps, const double[::1] coefs, const long long[::1] offsets,
              int n, int k, x, y0, p, int max_iter, double tol):
    cdef System s
    if 2 * n > MAXD or k > n:
        raise ValueError("system too large for the compiled kernel")
    s.exps = &exps[0, 0]
    s.coefs = &coefs[0]
    s.offsets = &offsets[0]
    s.m = 2 * n
    s.n = n
    s.k = k
    cdef int d = n + k
    cdef int P = offsets.shape[0] - 1
    cdef double* vals = <double*> malloc(P * sizeof(double))
    cdef double* vnew = <double*> malloc(P * sizeof(double))
    if vals == NULL or vnew == NULL:
        free(vals)
        free(vnew)
        raise MemoryError()
    cdef double z[MAXD]
    cdef double znew[MAXD]
    cdef double pp[MAXD]
    cdef double mu[MAXD]
    cdef double munew[MAXD]
    cdef double rhs[MAXD]
    cdef double F[MAXD]
    cdef double Fnew[MAXD]
    cdef double K[MAXD * MAXD]
    cdef double Knew[MAXD * MAXD]
    cdef double A[MAXD * MAXD]
    cdef double sv[MAXD]
    cdef double f, f_new, lam = 0.0, scale, acc
    cdef int i, j, l, it = 0
    cdef bint ok
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y0, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    for i in range(n):
        z[i] = xv[i]
        z[n + i] = yv[i]
        znew[i] = xv[i]
        pp[i] = pv[i]
    with nogil:
        eval_range(&s, z, P, vals)
        for i in range(n):
            rhs[i] = pp[i] - z[n + i]
        if not min_norm_multiplier(&s, vals, rhs, mu):
            for j in range(k):
                mu[j] = 0.0
        build_kkt(&s, vals, &z[n], mu, pp, F, K)
        f = norm(F, d)
        while it < max_iter and f > tol:
            it += 1
            ok = True
            if lam == 0.0:
                for i in range(d * d):
                    A[i] = K[i]
                for i in range(d):
                    sv[i] = -F[i]
                ok = lu_solve(A, sv, d)
            else:
                scale = 1e-300
                for i in range(d):
                    for l in range(d):
                        acc = 0.0
                        for j in range(d):
                            acc += K[j * d + i] * K[j * d + l]
                        A[i * d + l] = acc
                    if A[i * d + i] > scale:
                        scale = A[i * d + i]
                    acc = 0.0
                    for j in range(d):
                        acc -= K[j * d + i] * F[j]
                    sv[i] = acc
                for i in range(d):
                    A[i * d + i] += lam * scale
                ok = lu_solve(A, sv, d)
            if ok:
                for i in range(d):
                    if not isfinite(sv[i]):
                        ok = False
            if ok:
                for i in range(n):
                    znew[n + i] = z[n + i] + sv[i]
                for j in range(k):
                    munew[j] = mu[j] + sv[n + j]
                eval_range(&s, znew, P, vnew)
                build_kkt(&s, vnew, &znew[n], munew, pp, Fnew, Knew)
                f_new = norm(Fnew, d)
                if isfinite(f_new) and f_new < f:
                    for i in range(n):
                        z[n + i] = znew[n + i]
                    for j in range(k):
                        mu[j] = munew[j]
                    for i in range(d):
                        F[i] = Fnew[i]
                    for i in range(d * d):
                        K[i] = Knew[i]
                    for i in range(P):
                        vals[i] = vnew[i]
                    f = f_new
                    lam = lam / 10.0 if lam > 1e-7 else 0.0
                    continue
            lam = 1e-8 if lam == 0.0 else lam * 10.0
            if lam > 1e8:
                break
    free(vals)
    free(vnew)
    y = np.array([z[n + i] for i in range(n)], dtype=np.float64)
    muo = np.array([mu[j] for j in range(k)], dtype=np.float64)
    return y, muo, f, it
