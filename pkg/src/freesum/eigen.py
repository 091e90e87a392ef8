"""Hermitian eigensolver: Householder tridiagonalization followed by implicit QL."""
from __future__ import annotations

import math

import numba
import numpy as np

from .errors import EigenConvergenceError

SWEEPS_PER_DIM = 30


@numba.njit(cache=True, nogil=True)
def _householder_kernel(a, q, want_q):
    """In-place Householder reduction of a Hermitian ``a`` to tridiagonal form.

    Reflector ``k`` is ``I - 2 v v^*`` acting on rows and columns ``k+1..``;
    when ``want_q`` the reflectors are accumulated into the columns of ``q``.
    """
    n = a.shape[0]
    v = np.empty(n, dtype=np.complex128)
    p = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        sigma2 = 0.0
        for i in range(k + 1, n):
            sigma2 += a[i, k].real ** 2 + a[i, k].imag ** 2
        if sigma2 == 0.0:
            continue
        sigma = math.sqrt(sigma2)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0 else 1.0 + 0j
        alpha = -phase * sigma
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] -= alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real ** 2 + v[i].imag ** 2
        vn = math.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        for i in range(m):
            s = 0j
            for j in range(m):
                s += a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = s
        vp = 0.0
        for i in range(m):
            vp += (v[i].conjugate() * p[i]).real
        for i in range(m):
            p[i] -= vp * v[i]
        for i in range(m):
            for j in range(m):
                a[k + 1 + i, k + 1 + j] -= 2.0 * (v[i] * p[j].conjugate() + p[i] * v[j].conjugate())
        for i in range(k + 1, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha.conjugate()
        if want_q:
            for r in range(n):
                s = 0j
                for j in range(m):
                    s += q[r, k + 1 + j] * v[j]
                for j in range(m):
                    q[r, k + 1 + j] -= 2.0 * s * v[j].conjugate()


def tridiagonalize(a, want_q=True):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, q)`` with ``q^* a q`` equal to the real tridiagonal matrix
    with diagonal ``d`` and off-diagonal ``e`` (``e[k]`` couples ``k`` and
    ``k+1``; ``e[-1] = 0``).  ``q`` is ``None`` when ``want_q`` is false.
    """
    a = np.array(a, dtype=np.complex128, copy=True, order="C")
    n = a.shape[0]
    q = np.eye(n, dtype=np.complex128) if want_q else np.zeros((1, 1), dtype=np.complex128)
    _householder_kernel(a, q, want_q)
    d = a.diagonal().real.copy()
    off = a.diagonal(-1).copy()
    # unitary diagonal rescaling turns the complex off-diagonal real and non-negative
    phases = np.ones(n, dtype=complex)
    for k in range(n - 1):
        mag = abs(off[k])
        phases[k + 1] = phases[k] * (off[k] / mag if mag > 0 else 1.0)
    e = np.zeros(n)
    e[: n - 1] = np.abs(off)
    if not want_q:
        return d, e, None
    return d, e, q * phases[None, :]


@numba.njit(cache=True, nogil=True)
def _tql_kernel(d, e, zt, want_vectors, max_sweeps):
    """Implicit-shift QL on a real symmetric tridiagonal matrix, in place.

    ``zt`` holds eigenvectors as rows.  Returns -1 on success, otherwise the
    index of the sub-block that failed to split.
    """
    n = d.size
    eps = 2.220446049250313e-16
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(n):
                        f = zt[i + 1, k]
                        zt[i + 1, k] = s * zt[i, k] + c * f
                        zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tridiagonal_eigen(d, e, want_vectors=True):
    """Eigenvalues (ascending) and, optionally, real eigenvectors as columns."""
    d = np.array(d, dtype=float, copy=True)
    e = np.array(e, dtype=float, copy=True)
    n = d.size
    zt = np.eye(n) if want_vectors else np.zeros((1, 1))
    block = _tql_kernel(d, e, zt, want_vectors, SWEEPS_PER_DIM * max(n, 1))
    if block >= 0:
        raise EigenConvergenceError(
            f"QL iteration did not converge within {SWEEPS_PER_DIM * n} sweeps "
            f"(sub-block starting at index {block})", block)
    order = np.argsort(d, kind="stable")
    if not want_vectors:
        return d[order], None
    return d[order], zt[order].T


def eigh(a, want_vectors=True):
    """Eigen-decomposition of a Hermitian array: ascending eigenvalues, unitary columns."""
    a = np.asarray(a)
    n = a.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0), dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), np.ones((1, 1), dtype=complex)
    d, e, q = tridiagonalize(a, want_q=want_vectors)
    vals, z = tridiagonal_eigen(d, e, want_vectors)
    if not want_vectors:
        return vals, None
    return vals, q @ z
