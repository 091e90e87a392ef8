"""Cauchy transforms on the upper half-plane and Stieltjes inversion."""
from __future__ import annotations

import csv
import math
from functools import singledispatch
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .measures import Atomic, Empirical, FreePoisson, GridDensity, Measure, Semicircle

_CHUNK = 1 << 22


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point with strictly positive imaginary part."""

    re: float
    im: float

    def __post_init__(self):
        if not self.im > 0:
            raise PreconditionError(f"point must lie in the upper half-plane, got Im z = {self.im}")

    @property
    def z(self):
        return complex(self.re, self.im)


def _as_z(z):
    if isinstance(z, HalfPlanePoint):
        z = z.z
    za = np.asarray(z, dtype=complex)
    if np.any(~(za.imag > 0)):
        raise PreconditionError("Cauchy transforms are evaluated on Im z > 0 only")
    return za


def _ret(z, values):
    if isinstance(z, HalfPlanePoint) or np.ndim(z) == 0:
        return complex(values)
    return values


def cauchy_transform(m: Measure, z):
    """``G(z) = int 1/(z - t) m(dt)`` for ``Im z > 0``, vectorized over ``z``."""
    za = _as_z(z)
    return _ret(z, _cauchy(m, za))


@singledispatch
def _cauchy(m, z):
    raise TypeError(f"no Cauchy transform for {type(m).__name__}")


def _atomic_sum(points, masses, z):
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK // max(points.size, 1))
    for s in range(0, flat.size, step):
        zz = flat[s : s + step]
        out[s : s + step] = (masses[None, :] / (zz[:, None] - points[None, :])).sum(axis=1)
    return out.reshape(z.shape)


@_cauchy.register
def _(m: Atomic, z):
    return _atomic_sum(m.points, m.masses, z)


@_cauchy.register
def _(m: Empirical, z):
    locs, masses = m.atoms()
    return _atomic_sum(locs, masses, z)


@_cauchy.register
def _(m: Semicircle, z):
    return semicircle_cauchy(z - m.center, m.variance)


@_cauchy.register
def _(m: FreePoisson, z):
    lam, alpha = m.rate, m.jump
    # G_X(z) = G_Y(z / alpha) / alpha with Y of jump one; reflect for alpha < 0
    w = z / alpha
    if alpha < 0:
        return np.conj(_free_poisson_unit(lam, np.conj(w))) / alpha
    return _free_poisson_unit(lam, w) / alpha


def _free_poisson_unit(lam, w):
    c, r = 1.0 + lam, 2.0 * math.sqrt(lam)
    d = w - c
    # (w - c) sqrt(1 - r^2/(w - c)^2) is analytic on the upper half-plane and ~ w
    root = d * np.sqrt(1.0 - (r / d) ** 2)
    return _lower_root(w + 1.0 - lam - root, w + 1.0 - lam + root, 2.0 * w, 1.0 / w)


def _lower_root(num_a, num_b, den, product):
    """Root in the closed lower half-plane of a quadratic with roots ``num/den``.

    The root of larger modulus is taken directly and the other recovered from
    the product of the roots, which avoids cancellation for large ``|z|``.
    """
    big = np.where(np.abs(num_a) >= np.abs(num_b), num_a, num_b) / den
    small = product / big
    return np.where(small.imag <= 0, small, big)


@_cauchy.register
def _(m: GridDensity, z):
    # exact integral of the piecewise-linear density against 1/(z - t)
    x, f = m.grid, m.values
    h = np.diff(x)
    slope = np.diff(f) / h
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK // x.size)
    for s in range(0, flat.size, step):
        zz = flat[s : s + step, None]
        # log((z - x_k)/(z - x_{k+1})) = log1p(h_k / (z - x_{k+1})), no branch cut in C+
        logratio = np.log1p(h[None, :] / (zz - x[None, 1:]))
        fz = f[None, :-1] + slope[None, :] * (zz - x[None, :-1])
        out[s : s + step] = (fz * logratio).sum(axis=1) - np.dot(slope, h)
    return out.reshape(z.shape)


def semicircle_cauchy(z, variance=1.0):
    """Closed-form Cauchy transform of the centred semicircle law.

    Returns ``(z - sqrt(z^2 - 4 s^2)) / (2 s^2)`` with the root chosen so the
    result lies in the lower half-plane; the other root of the quadratic
    ``s^2 G^2 - z G + 1 = 0`` equals ``1/(s^2 G)`` and lies above.
    """
    za = _as_z(z)
    s = np.sqrt(za * za - 4.0 * variance)
    return _ret(z, _lower_root(za - s, za + s, 2.0 * variance, 1.0 / variance))


def default_eta(window, resolution):
    """Inversion height tied to the grid pitch: four grid steps."""
    lo, hi = window
    return 4.0 * (hi - lo) / resolution


def stieltjes_invert(g, window, resolution, eta=None) -> GridDensity:
    """Recover a density from a Cauchy transform ``g`` by Stieltjes inversion.

    Parameters
    ----------
    g : callable
        Vectorized map ``z -> G(z)`` on the upper half-plane.
    window : (float, float)
        Interval on which the density is sampled.
    resolution : int
        Number of grid nodes (at least 8).
    eta : float, optional
        Height of the evaluation line ``x + i eta``; defaults to
        :func:`default_eta`.  Must lie in ``(1e-6, 1)``.

    Returns
    -------
    GridDensity
        ``max(-Im g(x + i eta) / pi, 0)`` renormalized, with ``eta`` attached.
    """
    if resolution < 8:
        raise PreconditionError("resolution must be at least 8")
    lo, hi = map(float, window)
    if not hi > lo:
        raise PreconditionError("window must satisfy lo < hi")
    if eta is None:
        eta = default_eta((lo, hi), resolution)
    if not 1e-6 < eta < 1:
        raise PreconditionError(f"eta must lie in (1e-6, 1), got {eta}")
    x = np.linspace(lo, hi, int(resolution))
    vals = np.asarray(g(x + 1j * eta))
    dens = np.clip(-vals.imag / math.pi, 0.0, None)
    return GridDensity(x, dens, eta)


def write_trace_csv(path, z, values):
    """Write ``re(z), im(z), re(G), im(G)`` rows."""
    z = np.ravel(np.asarray(z, dtype=complex))
    values = np.ravel(np.asarray(values, dtype=complex))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_z", "im_z", "re_g", "im_g"])
        for zz, gg in zip(z, values):
            w.writerow([format(v, ".17g") for v in (zz.real, zz.imag, gg.real, gg.imag)])
