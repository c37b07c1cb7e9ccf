"""Lowest eigenpairs of a real symmetric tridiagonal matrix.

Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
iteration with a pivoted tridiagonal LU. Both are plain Python loops over
the matrix rows: the matrices here have at most a few thousand rows and
only a handful of eigenpairs are requested.

The matrix is first split wherever an off-diagonal is negligible, so a
diagonal matrix yields exact coordinate eigenvectors even for degenerate
eigenvalues.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericalError

EPS = np.finfo(float).eps
_SAFE_MIN = np.finfo(float).tiny
_MAX_BISECT = 4000


def gershgorin_bounds(d, e):
    d = np.asarray(d, dtype=float)
    e = np.abs(np.asarray(e, dtype=float))
    radius = np.zeros_like(d)
    radius[:-1] += e
    radius[1:] += e
    return float(np.min(d - radius)), float(np.max(d + radius))


def sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues strictly below ``x``.

    ``d`` is the diagonal and ``e2`` the squared off-diagonal, both as Python
    sequences. Uses the LDL^T pivot recurrence; tiny pivots are replaced by
    ``-pivmin``.
    """
    count = 0
    p = d[0] - x
    if abs(p) < pivmin:
        p = -pivmin
    if p < 0:
        count += 1
    for i in range(1, len(d)):
        p = d[i] - x - e2[i - 1] / p
        if abs(p) < pivmin:
            p = -pivmin
        if p < 0:
            count += 1
    return count


def bisect_eigenvalues(d, e, n_eigs, atol=EPS):
    """The ``n_eigs`` smallest eigenvalues, ascending, by bisection.

    Each eigenvalue is refined until its bracket is narrower than
    ``2 eps |lam|`` or ``atol``, or until the midpoint stops moving.
    """
    d = [float(v) for v in d]
    e2 = [float(v) ** 2 for v in e]
    n = len(d)
    if not 1 <= n_eigs <= n:
        raise DomainError(f"n_eigs={n_eigs} must lie in [1, {n}]")
    lo0, hi0 = gershgorin_bounds(d, e)
    scale = max(abs(lo0), abs(hi0), 1.0)
    lo0 -= 2 * EPS * scale + atol
    hi0 += 2 * EPS * scale + atol
    pivmin = _SAFE_MIN * max(1.0, max(e2, default=0.0))

    out = []
    lo_k = lo0
    for k in range(n_eigs):
        lo, hi = lo_k, hi0
        for _ in range(_MAX_BISECT):
            width = hi - lo
            if width <= 2 * EPS * max(abs(lo), abs(hi)) or width <= atol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(d, e2, mid, pivmin) > k:
                hi = mid
            else:
                lo = mid
        else:
            raise NumericalError("bisection did not converge", index=k, lo=lo, hi=hi)
        lam = 0.5 * (lo + hi)
        out.append(lam)
        # eigenvalue k+1 is >= eigenvalue k
        lo_k = lo
    return np.array(out)


def _gttrf(dl, d, du):
    """Pivoted LU of a tridiagonal matrix (the LAPACK ``gttrf`` scheme)."""
    n = len(d)
    dl, d, du = list(dl), list(d), list(du)
    du2 = [0.0] * max(n - 2, 0)
    swap = [False] * max(n - 1, 0)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] != 0.0:
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] -= fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            swap[i] = True
    return dl, d, du, du2, swap


def _gtts(factors, b):
    dl, d, du, du2, swap = factors
    n = len(d)
    b = list(b)
    for i in range(n - 1):
        if swap[i]:
            b[i], b[i + 1] = b[i + 1], b[i] - dl[i] * b[i + 1]
        else:
            b[i + 1] -= dl[i] * b[i]
    b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]
    return b


def inverse_iteration(d, e, lam, previous=(), n_iter=3, rng=None):
    """Unit eigenvector of the tridiagonal ``(d, e)`` for eigenvalue ``lam``.

    ``previous`` holds already accepted eigenvectors of the same block; the
    iterate is kept orthogonal to them so clustered eigenvalues still give an
    orthonormal set.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    if n == 1:
        return np.ones(1)
    norm = max(float(np.max(np.abs(d))) + 2 * float(np.max(np.abs(e), initial=0.0)), _SAFE_MIN)
    # a perturbed shift keeps the LU factors invertible
    shift = lam + 2 * EPS * max(abs(lam), norm * 1e-3)
    factors = list(_gttrf(e.tolist(), (d - shift).tolist(), e.tolist()))
    piv = factors[1]
    for i, p in enumerate(piv):
        if p == 0.0:
            piv[i] = EPS * norm
    if rng is None:
        rng = np.random.default_rng(20100925)
    x = rng.uniform(-1.0, 1.0, n)
    basis = [np.asarray(v) for v in previous]
    for _ in range(n_iter):
        for v in basis:
            x -= np.dot(v, x) * v
        x = np.asarray(_gtts(factors, x.tolist()))
        for v in basis:
            x -= np.dot(v, x) * v
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise NumericalError("inverse iteration broke down", eigenvalue=lam, size=n)
        x /= nrm
    residual = d * x - lam * x
    residual[:-1] += e * x[1:]
    residual[1:] += e * x[:-1]
    res = float(np.linalg.norm(residual))
    if res > 1e4 * EPS * max(norm, 1.0) * math.sqrt(n):
        raise NumericalError("inverse iteration did not converge", eigenvalue=lam, residual=res, size=n)
    return x


def split_blocks(d, e):
    """Index ranges ``[start, stop)`` of the unreduced diagonal blocks."""
    d = np.abs(np.asarray(d, dtype=float))
    e = np.abs(np.asarray(e, dtype=float))
    blocks = []
    start = 0
    for i, ei in enumerate(e):
        if ei == 0.0 or ei <= EPS * math.sqrt(d[i] * d[i + 1]):
            blocks.append((start, i + 1))
            start = i + 1
    blocks.append((start, len(d)))
    return blocks


def fix_sign(v, rtol=1e-10):
    """Flip ``v`` so its largest-magnitude entry is positive.

    Entries within ``rtol`` of the maximum magnitude count as tied; the tie
    goes to the lowest index.
    """
    mag = np.abs(v)
    top = mag.max()
    idx = int(np.flatnonzero(mag >= top * (1.0 - rtol))[0])
    return -v if v[idx] < 0 else v


def lowest_eigenpairs(d, e, n_eigs):
    """The ``n_eigs`` smallest eigenpairs of the symmetric tridiagonal ``(d, e)``.

    Returns ``(w, V)`` with ``w`` ascending and the columns of ``V``
    orthonormal, each signed by :func:`fix_sign`. Equal eigenvalues from
    different blocks are ordered by block position.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    if len(e) != n - 1:
        raise DomainError(f"off-diagonal must have length {n - 1}, got {len(e)}")
    if not 1 <= n_eigs <= n:
        raise DomainError(f"n_eigs={n_eigs} must lie in [1, {n}]")

    candidates = []
    for start, stop in split_blocks(d, e):
        bd, be = d[start:stop], e[start:stop - 1]
        k = min(n_eigs, stop - start)
        if stop - start == 1:
            lams = np.array([bd[0]])
        else:
            lams = bisect_eigenvalues(bd, be, k)
        for lam in lams:
            candidates.append((float(lam), start, stop))
    candidates.sort(key=lambda c: (c[0], c[1]))
    chosen = candidates[:n_eigs]

    w = np.empty(n_eigs)
    V = np.zeros((n, n_eigs))
    accepted: dict[int, list[np.ndarray]] = {}
    for col, (lam, start, stop) in enumerate(chosen):
        prev = accepted.setdefault(start, [])
        vec = inverse_iteration(d[start:stop], e[start:stop - 1], lam, previous=prev)
        prev.append(vec)
        full = np.zeros(n)
        full[start:stop] = vec
        w[col] = lam
        V[:, col] = fix_sign(full)
    return w, V
