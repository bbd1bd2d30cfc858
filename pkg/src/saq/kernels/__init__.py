"""Hot numeric kernels with a compiled backend and a NumPy fallback.

The compiled extension ``_ckernels`` is used when it has been built;
otherwise ``_pykernels`` is selected at import.  :func:`use_backend`
switches explicitly, which the benchmark and the agreement tests use.
"""

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels

INT64_SAFE = 2 ** 62


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return _active.NAME


def use_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    previous = _active.NAME
    _active = _BACKENDS[name]
    return previous


def get_backend(name=None):
    return _active if name is None else _BACKENDS[name]


def pack_polys(polys):
    """Pack float images of ``polys`` (all in the same ring) for the kernels."""
    polys = list(polys)
    m = polys[0].nvars
    exps, coefs, offsets = [], [], [0]
    for p in polys:
        items = sorted(p.items())
        if not items:
            items = [((0,) * m, 0)]
        for e, c in items:
            exps.append(e)
            coefs.append(float(c))
        offsets.append(len(coefs))
    return (
        np.ascontiguousarray(np.array(exps, dtype=np.int32).reshape(-1, m)),
        np.ascontiguousarray(coefs, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int64),
    )


def eval_polys(packed, z, count=-1):
    exps, coefs, offsets = packed
    return _active.eval_polys(exps, coefs, offsets, np.ascontiguousarray(z, dtype=np.float64), count)


def project(packed, n, k, x, y0, max_iter=50, tol=1e-12):
    exps, coefs, offsets = packed
    return _active.project(exps, coefs, offsets, n, k, x, y0, max_iter, tol)


def kkt_solve(packed, n, k, x, y0, p, max_iter=100, tol=1e-13):
    exps, coefs, offsets = packed
    return _active.kkt_solve(exps, coefs, offsets, n, k, x, y0, p, max_iter, tol)


def rational_signs(poly, nums, dens):
    """Exact signs of ``poly`` at the rational points ``nums[i] / dens[i]``.

    ``nums`` is an integer array of shape ``(M, nvars)`` and ``dens`` a
    positive integer array of shape ``(M,)``.  Falls back to Python integers
    when the int64 kernel could overflow.
    """
    exps, coefs, degree = poly.integer_form()
    M = len(dens)
    if not coefs:
        return np.zeros(M, dtype=np.int8)
    big = max(int(np.max(np.abs(nums))) if nums.size else 0, int(np.max(dens)) if M else 1, 1)
    bound = sum(abs(c) for c in coefs) * big ** degree
    if bound < INT64_SAFE:
        return _active.int_signs(
            np.ascontiguousarray(exps, dtype=np.int64).reshape(len(coefs), -1),
            np.ascontiguousarray(coefs, dtype=np.int64),
            degree,
            np.ascontiguousarray(nums, dtype=np.int64),
            np.ascontiguousarray(dens, dtype=np.int64),
        )
    out = np.empty(M, dtype=np.int8)
    for i in range(M):
        row = [int(v) for v in nums[i]]
        den = int(dens[i])
        acc = 0
        for e, c in zip(exps, coefs):
            t = c * den ** (degree - sum(e))
            for v, k in zip(row, e):
                if k:
                    t *= v ** k
            acc += t
        out[i] = (acc > 0) - (acc < 0)
    return out
