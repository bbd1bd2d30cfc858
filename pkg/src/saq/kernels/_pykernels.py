"""Reference NumPy implementations of the numeric kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and algorithm.  Array layouts:

* a packed polynomial system is ``(exps, coefs, offsets)`` with ``exps`` an
  ``int32`` array of shape ``(T, m)``, ``coefs`` ``float64`` of shape ``(T,)``
  and ``offsets`` ``int64`` of shape ``(P + 1,)``; polynomial ``q`` owns terms
  ``offsets[q]:offsets[q + 1]`` and every polynomial owns at least one term.
* a relation system over ``z = (x, y)`` with ``k`` equations in ``n`` + ``n``
  variables lists ``g_j`` first, then ``dg_j/dy_i`` at ``k + j*n + i``, then
  ``d2g_j/dy_i dy_l`` at ``k + k*n + (j*n + i)*n + l``.
"""

import numpy as np

NAME = "python"


def int_signs(exps, coefs, degree, nums, dens):
    """Signs of an integer polynomial at the rational points ``nums / dens``.

    The polynomial is homogenised to ``degree`` so the computation stays in
    integers; the caller guarantees no intermediate exceeds int64.
    """
    if len(coefs) == 0:
        return np.zeros(len(dens), dtype=np.int8)
    monos = np.prod(nums[:, None, :] ** exps[None, :, :], axis=2)
    pads = degree - exps.sum(axis=1)
    homog = dens[:, None] ** pads[None, :]
    vals = (monos * homog) @ coefs
    return np.sign(vals).astype(np.int8)


def eval_polys(exps, coefs, offsets, z, count=-1):
    if count < 0:
        count = len(offsets) - 1
    stop = offsets[count]
    terms = coefs[:stop] * np.prod(z[None, :] ** exps[:stop], axis=1)
    return np.add.reduceat(terms, offsets[:count])


def _jacobian(vals, n, k):
    return vals[k:k + k * n].reshape(k, n)


def _kkt(vals, n, k, y, mu, p):
    J = _jacobian(vals, n, k)
    H = vals[k + k * n:k + k * n + k * n * n].reshape(k, n, n)
    F = np.concatenate([y - p + J.T @ mu, vals[:k]])
    K = np.zeros((n + k, n + k))
    K[:n, :n] = np.eye(n) + np.tensordot(mu, H, axes=1)
    K[:n, n:] = J.T
    K[n:, :n] = J
    return F, K


def project(exps, coefs, offsets, n, k, x, y0, max_iter, tol):
    """Minimum-norm Gauss-Newton onto ``{y : g(x, y) = 0}``.

    Returns ``(y, |g|, iterations)``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    count = k + k * n
    vals = eval_polys(exps, coefs, offsets, np.concatenate([x, y]), count)
    g = vals[:k]
    gn = np.sqrt(g @ g)
    it = 0
    while it < max_iter and gn > tol:
        it += 1
        J = _jacobian(vals, n, k)
        try:
            w = np.linalg.solve(J @ J.T, g)
        except np.linalg.LinAlgError:
            break
        step = J.T @ w
        alpha = 1.0
        accepted = False
        for _ in range(30):
            y_new = y - alpha * step
            vals_new = eval_polys(exps, coefs, offsets, np.concatenate([x, y_new]), count)
            g_new = vals_new[:k]
            gn_new = np.sqrt(g_new @ g_new)
            if np.isfinite(gn_new) and gn_new < gn:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        y, vals, g, gn = y_new, vals_new, g_new, gn_new
    return y, float(gn), it


def kkt_solve(exps, coefs, offsets, n, k, x, y0, p, max_iter, tol):
    """Damped Newton on the stationarity system of ``min |y - p|^2`` s.t. ``g = 0``.

    Pure Newton steps are tried first; a rejected or singular step switches
    to Levenberg-Marquardt steps whose damping relaxes back to zero on
    success.  Returns ``(y, mu, |F|, iterations)`` where ``p - y = J^T mu``
    at a stationary point.
    """
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    d = n + k
    vals = eval_polys(exps, coefs, offsets, np.concatenate([x, y]))
    J = _jacobian(vals, n, k)
    try:
        mu = np.linalg.solve(J @ J.T, J @ (p - y))
    except np.linalg.LinAlgError:
        mu = np.zeros(k)
    F, K = _kkt(vals, n, k, y, mu, p)
    f = np.sqrt(F @ F)
    lam = 0.0
    it = 0
    while it < max_iter and f > tol:
        it += 1
        ok = True
        if lam == 0.0:
            try:
                s = np.linalg.solve(K, -F)
            except np.linalg.LinAlgError:
                ok = False
        else:
            KtK = K.T @ K
            scale = max(np.max(np.diag(KtK)), 1e-300)
            try:
                s = np.linalg.solve(KtK + lam * scale * np.eye(d), -K.T @ F)
            except np.linalg.LinAlgError:
                ok = False
        if ok and np.all(np.isfinite(s)):
            y_new = y + s[:n]
            mu_new = mu + s[n:]
            vals_new = eval_polys(exps, coefs, offsets, np.concatenate([x, y_new]))
            F_new, K_new = _kkt(vals_new, n, k, y_new, mu_new, p)
            f_new = np.sqrt(F_new @ F_new)
            if np.isfinite(f_new) and f_new < f:
                y, mu, F, K, f = y_new, mu_new, F_new, K_new, f_new
                lam = lam / 10.0 if lam > 1e-7 else 0.0
                continue
        lam = 1e-8 if lam == 0.0 else lam * 10.0
        if lam > 1e8:
            break
    return y, mu, float(f), it
