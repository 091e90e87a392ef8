"""Free additive convolution by subordination, and the atom calculus of free sums."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, ParameterError, PreconditionError, ZeroDenominatorError
from .measures import Atomic, GridDensity, Measure
from .transforms import cauchy_transform, default_eta, stieltjes_invert

Transform = Callable[[np.ndarray], np.ndarray]

UNDAMPED_STEPS = 200
DAMPING = 0.5
MAX_FAILURE_FRACTION = 0.01
_EPS = np.finfo(float).eps


def transform_of(m: Measure | Transform) -> Transform:
    """Vectorized Cauchy transform of ``m``; callables pass through unchanged."""
    if isinstance(m, Measure):
        return lambda z: cauchy_transform(m, np.asarray(z, dtype=complex))
    return m


def _reciprocal(g, u):
    gu = np.asarray(g(u))
    bad = (gu == 0) | ~np.isfinite(gu)
    if np.any(bad):
        raise ZeroDenominatorError(
            f"Cauchy transform vanished or overflowed at {int(bad.sum())} iterate(s), "
            f"first at u = {np.asarray(u)[bad][0]!r}"
        )
    return 1.0 / gu


@dataclass
class SubordinationResult:
    """Subordination functions sampled on a set of points of the upper half-plane.

    ``omega2`` is the fixed point of ``w -> z + H1(z + H2(w))`` with
    ``H(u) = 1/G(u) - u`` and ``omega1 = z + H2(omega2)``, so that
    ``G_{m1 ⊞ m2}(z) = G_{m1}(omega1(z)) = G_{m2}(omega2(z))``.
    """

    z: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    tol: float = field(default=1e-12)

    @property
    def failure_fraction(self) -> float:
        return float(np.mean(~self.converged)) if self.z.size else 0.0

    @property
    def worst_residual(self) -> float:
        return float(np.max(self.residual)) if self.z.size else 0.0

    def write_csv(self, path):
        """Per-point diagnostics: z, both subordination values, iterations, residual."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_z", "im_z", "re_omega1", "im_omega1", "re_omega2", "im_omega2",
                        "iterations", "residual", "converged"])
            for k in range(self.z.size):
                row = [self.z[k].real, self.z[k].imag, self.omega1[k].real, self.omega1[k].imag,
                       self.omega2[k].real, self.omega2[k].imag]
                w.writerow([format(v, ".17g") for v in row]
                           + [int(self.iterations[k]), format(self.residual[k], ".17g"),
                              int(self.converged[k])])


def _solve_fixed_point(f, z, start, tol, max_iter, floor):
    """Iterate ``w -> f(z, w)`` pointwise.

    Plain iteration for the first ``UNDAMPED_STEPS`` steps; afterwards each
    step is a Newton step on ``f(w) - w`` (complex derivative by central
    difference), falling back to the damped step ``w + DAMPING (f(w) - w)``
    whenever Newton leaves the admissible half-plane ``Im w >= floor``.
    """
    w = start.astype(complex)
    iters = np.zeros(z.shape, dtype=np.int64)
    done = np.zeros(z.shape, dtype=bool)
    for k in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        za, wa = z[act], w[act]
        fw = f(za, wa)
        if k < UNDAMPED_STEPS:
            wn = fw
        else:
            h = 1e-7 * np.maximum(np.abs(wa.imag), 1e-3)
            with np.errstate(all="ignore"):
                try:
                    d = (f(za, wa + h) - f(za, wa - h)) / (2 * h)
                    wn = wa + (fw - wa) / (1.0 - d)
                except ZeroDenominatorError:
                    wn = np.full_like(wa, np.nan)
            damped = wa + DAMPING * (fw - wa)
            reject = ~np.isfinite(wn) | (wn.imag < floor[act])
            wn = np.where(reject, damped, wn)
        thr = np.maximum(tol, 16 * _EPS * np.abs(wn))
        w[act] = wn
        iters[act] = k + 1
        done[act] = (np.abs(wn - wa) <= thr) | (np.abs(fw - wa) <= thr)
    return w, iters, done


def subordinate(m1, m2, z, tol=1e-12, max_iter=2000) -> SubordinationResult:
    """Solve the subordination equations of ``m1 ⊞ m2`` at the points ``z``.

    Parameters
    ----------
    m1, m2 : Measure or callable
        Measures, or vectorized Cauchy transforms on the upper half-plane.
    z : array_like of complex
        Evaluation points, ``Im z > 0``.
    tol : float
        Step-size tolerance, at least ``1e-14``.
    max_iter : int
        Iteration cap per point.
    """
    if tol < 1e-14:
        raise ParameterError("tol must be at least 1e-14")
    if max_iter < 1:
        raise ParameterError("max_iter must be positive")
    g1, g2 = transform_of(m1), transform_of(m2)
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(~(z.imag > 0)):
        raise PreconditionError("subordination requires Im z > 0")

    def h2(u):
        return _reciprocal(g2, u) - u

    def f(zz, ww):
        u = zz + h2(ww)
        return zz + _reciprocal(g1, u) - u

    w, iters, done = _solve_fixed_point(f, z, z + 1j, tol, max_iter, z.imag)
    omega2 = w
    omega1 = z + h2(w)
    residual = np.abs(f(z, w) - w)
    slack = 1e-9 * z.imag
    inside = (omega1.imag >= z.imag - slack) & (omega2.imag >= z.imag - slack)
    converged = done & inside & np.isfinite(residual)
    return SubordinationResult(z, omega1, omega2, iters, residual, converged, tol)


def _check_failures(res: SubordinationResult, what="subordination"):
    if res.failure_fraction > MAX_FAILURE_FRACTION:
        bad = np.flatnonzero(~res.converged)
        k = bad[np.argmax(res.residual[bad])]
        raise ConvergenceError(
            f"{what} failed at {bad.size}/{res.z.size} points "
            f"(worst residual {res.residual[k]:.3e} at z = {res.z[k]!r}, "
            f"{res.iterations[k]} iterations)"
        )


def convolution_window(m1: Measure, m2: Measure, margin=1.0):
    """Minkowski sum of the two supports, widened by ``margin`` on each side."""
    a1, b1 = m1.support_interval()
    a2, b2 = m2.support_interval()
    return (a1 + a2 - margin, b1 + b2 + margin)


def free_convolve(m1: Measure, m2: Measure, window=None, resolution=4096, eta=None,
                  tol=1e-12, max_iter=2000, return_diagnostics=False):
    """Density of ``m1 ⊞ m2`` sampled on a grid.

    The transform ``G(z) = G_{m1}(omega1(z))`` is evaluated on the line
    ``x + i eta`` and inverted with :func:`stieltjes_invert`.

    Raises
    ------
    ConvergenceError
        If more than 1% of the grid points fail to converge.
    ZeroDenominatorError
        If a transform vanishes along an iteration path.
    """
    if window is None:
        window = convolution_window(m1, m2)
    if eta is None:
        eta = default_eta(window, resolution)
    holder = {}

    def g(zs):
        res = subordinate(m1, m2, zs, tol=tol, max_iter=max_iter)
        _check_failures(res)
        holder["res"] = res
        return transform_of(m1)(res.omega1)

    out = stieltjes_invert(g, window, resolution, eta)
    if return_diagnostics:
        return out, holder["res"]
    return out


def free_convolve_transform(m1, m2, tol=1e-12, max_iter=2000) -> Transform:
    """Cauchy transform of ``m1 ⊞ m2`` as a callable, solved afresh at each call."""
    g1 = transform_of(m1)

    def g(z):
        z = np.asarray(z, dtype=complex)
        res = subordinate(m1, m2, z.ravel(), tol=tol, max_iter=max_iter)
        _check_failures(res)
        return g1(res.omega1).reshape(z.shape)

    return g


def fold_transforms(items: Sequence, tol=1e-12, max_iter=2000) -> Transform:
    """Balanced binary fold of ``⊞`` over measures or transforms."""
    items = list(items)
    if not items:
        raise ParameterError("nothing to convolve")
    while len(items) > 1:
        nxt = [free_convolve_transform(items[i], items[i + 1], tol, max_iter)
               for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return transform_of(items[0])


def free_power_transform(base, t, tol=1e-12, max_iter=2000) -> Transform:
    """Cauchy transform of the free convolution power ``base^{⊞t}``, ``t >= 1``.

    Uses the subordination ``G_t(z) = G(omega(z))`` where ``omega`` solves
    ``omega = z/t + (1 - 1/t) F(omega)`` and ``F = 1/G``.
    """
    if t < 1:
        raise ParameterError("free convolution powers need t >= 1")
    gb = transform_of(base)

    def f(zz, ww):
        return zz / t + (1.0 - 1.0 / t) * _reciprocal(gb, ww)

    def g(z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        w, iters, done = _solve_fixed_point(f, flat, flat + 1j, tol, max_iter, flat.imag / t)
        residual = np.abs(f(flat, w) - w)
        ok = done & (w.imag >= flat.imag / t * (1 - 1e-9))
        res = SubordinationResult(flat, w, w, iters, residual, ok, tol)
        _check_failures(res, "free power subordination")
        return gb(w).reshape(z.shape)

    return g


def free_clt_distribution(base: Measure, n: int, window=None, resolution=8192, eta=None,
                          tol=1e-12, max_iter=2000) -> GridDensity:
    """Law of ``(X_1 + ... + X_n)/sqrt(n)`` for free copies of a standardized ``base``.

    Parameters
    ----------
    base : Measure
        Mean 0 and variance 1, both checked to within ``1e-8``.
    n : int
        Number of summands, ``2 <= n <= 4096``.
    window : (float, float), optional
        Defaults to ``[-R, R]`` with ``R`` the smaller of the trivial bound
        ``sqrt(n) M`` and the free norm bound ``2 + M/sqrt(n)`` plus 0.5, where
        ``M`` bounds the support of ``base``.
    """
    n = int(n)
    if not 2 <= n <= 4096:
        raise ParameterError("n must lie in [2, 4096]")
    if abs(base.mean) > 1e-8 or abs(base.variance - 1.0) > 1e-8:
        raise PreconditionError(
            f"base must have mean 0 and variance 1, got {base.mean!r} and {base.variance!r}"
        )
    rn = math.sqrt(n)
    if window is None:
        lo, hi = base.support_interval()
        big = max(abs(lo), abs(hi))
        r = min(rn * big, 2.0 + big / rn) + 0.5
        window = (-r, r)
    power = free_power_transform(base, n, tol, max_iter)
    return stieltjes_invert(lambda z: rn * power(rn * z), window, resolution, eta)


# --- atoms -----------------------------------------------------------------

ATOM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AtomList:
    """Atoms of a (sub-)probability measure: sorted distinct locations, masses in (0, 1]."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float).ravel()
        mas = np.asarray(self.masses, dtype=float).ravel()
        if loc.shape != mas.shape:
            raise ParameterError("locations and masses differ in length")
        if np.any(~np.isfinite(loc)) or np.any(~((mas > 0) & (mas <= 1))):
            raise ParameterError("masses must lie in (0, 1] at finite locations")
        if mas.sum() > 1 + 1e-12:
            raise ParameterError(f"atom masses sum to {mas.sum()!r} > 1")
        order = np.argsort(loc, kind="stable")
        loc, mas = loc[order], mas[order]
        if np.any(np.diff(loc) <= 0):
            raise ParameterError("atom locations must be distinct")
        loc.flags.writeable = False
        mas.flags.writeable = False
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mas)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls([p for p, _ in pairs], [m for _, m in pairs])

    @classmethod
    def from_measure(cls, m: Measure):
        loc, mas = m.atoms()
        return cls(loc, mas)

    def __len__(self):
        return self.locations.size

    def as_dict(self):
        return dict(zip(self.locations.tolist(), self.masses.tolist()))

    def to_measure(self) -> Atomic:
        """Normalized atomic measure (requires total mass one)."""
        return Atomic(self.locations, self.masses)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["location", "mass"])
            for a, m in zip(self.locations, self.masses):
                w.writerow([format(a, ".17g"), format(m, ".17g")])


def convolution_atoms(a1: AtomList, a2: AtomList, tol=ATOM_TOL) -> AtomList:
    """Atoms of the free convolution of two measures with the given atoms.

    ``alpha + beta`` is an atom exactly when ``m1(alpha) + m2(beta) > 1``,
    with mass ``m1(alpha) + m2(beta) - 1``.  Excesses not above ``tol`` are
    treated as rounding of an exact tie and dropped.
    """
    excess = a1.masses[:, None] + a2.masses[None, :] - 1.0
    i, j = np.nonzero(excess > tol)
    return AtomList(a1.locations[i] + a2.locations[j], excess[i, j])


def nfold_atoms(a: AtomList, n: int, tol=ATOM_TOL) -> AtomList:
    """Atoms of the ``n``-fold free convolution power, by left fold."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    acc = a
    for _ in range(n - 1):
        acc = convolution_atoms(acc, a, tol)
    return acc
