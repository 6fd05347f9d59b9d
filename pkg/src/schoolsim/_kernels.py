"""Pairwise prey-prey force sums.

The numba kernel visits pairs (i < j) in a fixed order and scatters each pair
force to both members, so the reduction order never depends on scheduling.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False


def pair_sums_numpy(x, v, alive, alpha, beta, r, p, q, eps):
    n, d = x.shape
    out = np.zeros((n, d))
    idx = np.flatnonzero(alive)
    if len(idx) < 2:
        return out
    xa, va = x[idx], v[idx]
    dx = xa[:, None, :] - xa[None, :, :]
    dv = va[:, None, :] - va[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", dx, dx))
    np.fill_diagonal(dist, np.inf)
    dist = np.maximum(dist, eps)
    s = r / dist
    sp = s ** p
    sq = s ** q
    a = -alpha * (sp - sq)
    b = -beta * (sp + sq)
    out[idx] = np.einsum("ij,ijk->ik", a, dx) + np.einsum("ij,ijk->ik", b, dv)
    return out


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _ipow(s, n):
        out = 1.0
        while n > 0:
            if n & 1:
                out *= s
            s *= s
            n >>= 1
        return out

    @njit(cache=True)
    def _pair_sums_numba(x, v, alive, alpha, beta, r, p, q, eps, out):
        n, d = x.shape
        gap = q - p
        # even integer exponents reduce to powers of r^2 / |dx|^2, no sqrt or pow
        even = p == 2.0 * np.floor(p / 2.0) and gap == 2.0 * np.floor(gap / 2.0) and q <= 64.0
        hp = int(p // 2)
        hg = int(gap // 2)
        r2 = r * r
        eps2 = eps * eps
        for i in range(n):
            for k in range(d):
                out[i, k] = 0.0
        for i in range(n):
            if not alive[i]:
                continue
            for j in range(i + 1, n):
                if not alive[j]:
                    continue
                dist2 = 0.0
                for k in range(d):
                    diff = x[i, k] - x[j, k]
                    dist2 += diff * diff
                if even:
                    if dist2 < eps2:
                        dist2 = eps2
                    s2 = r2 / dist2
                    sp = _ipow(s2, hp)
                    sq = sp * _ipow(s2, hg)
                else:
                    dist = np.sqrt(dist2)
                    if dist < eps:
                        dist = eps
                    s = r / dist
                    sp = s ** p
                    sq = sp * s ** gap
                a = -alpha * (sp - sq)
                b = -beta * (sp + sq)
                for k in range(d):
                    f = a * (x[i, k] - x[j, k]) + b * (v[i, k] - v[j, k])
                    out[i, k] += f
                    out[j, k] -= f
        return out

    def pair_sums(x, v, alive, alpha, beta, r, p, q, eps):
        out = np.empty(x.shape)
        return _pair_sums_numba(
            np.ascontiguousarray(x, dtype=np.float64),
            np.ascontiguousarray(v, dtype=np.float64),
            np.ascontiguousarray(alive, dtype=np.bool_),
            float(alpha), float(beta), float(r), float(p), float(q), float(eps), out,
        )

else:  # pragma: no cover
    pair_sums = pair_sums_numpy
