"""Upper bounds on the Kolmogorov distance from Cauchy transform differences.

Two bounds are evaluated term by term.  With ``D(z) = |G_mu(z) - G_nu(z)|``:

``theorem``
    ``C_g * (t1 + t2 + t3 + g*pi*t4)`` with ``t1 = int_{-inf}^{2} D(u+i) du``.
``corollary``
    ``C_gk * (t1' + t2 + t3 + pi*t5 + g*pi*t4)`` with ``t1'`` over ``[-A, 2]``
    and ``t5 = int_{|x|>B} |F_mu - F_nu| dx``.

Shared terms: ``t2 = sup_x int_v^1 D(x+iy) dy`` over ``|x| <= 2 - eps/2``,
``t3 = (1/v) sup_x int_{|y|<2va} |F_nu(x) - F_nu(x+y)| dy`` and
``t4 = max(F_nu(-2+eps), 1 - F_nu(2-eps))``.  Quadrature error estimates are
added to the integral terms, never subtracted.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .errors import ParameterError, PreconditionError, QuadratureError
from .measures import Atomic, Empirical, Measure
from .transforms import cauchy_transform

_QUAD_LIMIT = 400
_SUP_SEEDS = 64
_SUP_KEEP = 3
_GOLDEN_STEPS = 40
_SMOOTH_GRID = 257
_SMOOTH_LEVELS = 3
_ROUNDOFF_OK = 1e-8


def gamma_of(a: float) -> float:
    """Cauchy mass of ``(-a, a)``, i.e. ``(2/pi) arctan(a)``."""
    if not a > 0:
        raise ParameterError("a must be positive")
    return 2.0 * math.atan(a) / math.pi


@dataclass(frozen=True)
class BaiParameters:
    """Admissible parameters; ``A`` and ``B`` are needed only for the corollary form.

    Every hypothesis is checked strictly at construction.
    """

    v: float
    eps: float
    a: float
    A: float | None = None
    B: float | None = None
    gamma: float = field(init=False)
    kappa: float | None = field(init=False)
    c_gamma: float = field(init=False)
    c_gamma_kappa: float | None = field(init=False)

    def __post_init__(self):
        v, eps, a = float(self.v), float(self.eps), float(self.a)
        if not 0 < v < 1:
            raise ParameterError(f"v must lie in (0, 1), got {v}")
        if not 0 < eps < 2:
            raise ParameterError(f"eps must lie in (0, 2), got {eps}")
        g = gamma_of(a)
        if not g > 0.5:
            raise ParameterError(f"gamma = {g} must exceed 1/2 (needs a > 1)")
        if not eps > 2 * v * a:
            raise ParameterError(f"eps = {eps} must exceed 2 v a = {2 * v * a}")
        kappa = ckappa = None
        if (self.A is None) != (self.B is None):
            raise ParameterError("A and B must be given together")
        if self.A is not None:
            A, B = float(self.A), float(self.B)
            if not A > B > 0:
                raise ParameterError(f"need A > B > 0, got A = {A}, B = {B}")
            kappa = 2 * B / (math.pi * (A - B) * (2 * g - 1))
            if not kappa < 1:
                raise ParameterError(f"kappa = {kappa} must be below 1")
            ckappa = 1.0 / ((2 * g - 1) * math.pi * (1 - kappa))
        for k, val in (("v", v), ("eps", eps), ("a", a), ("gamma", g), ("kappa", kappa),
                       ("c_gamma", 1.0 / ((2 * g - 1) * math.pi)), ("c_gamma_kappa", ckappa)):
            object.__setattr__(self, k, val)

    @property
    def has_cutoffs(self) -> bool:
        return self.A is not None


@dataclass(frozen=True)
class BaiBreakdown:
    """Every term of an assembled bound, with the parameters used."""

    variant: str
    params: BaiParameters
    line_integral: float
    segment_sup: float
    smoothness: float
    tail: float
    far_field: float | None
    constant: float
    bound: float
    segment_argmax: float = math.nan
    smoothness_argmax: float = math.nan
    refinements: int = 0

    CSV_FIELDS = ("variant", "v", "eps", "a", "A", "B", "gamma", "kappa", "constant",
                  "line_integral", "segment_sup", "smoothness", "tail", "far_field", "bound")

    def csv_row(self):
        p = self.params
        vals = dict(variant=self.variant, v=p.v, eps=p.eps, a=p.a, A=p.A, B=p.B,
                    gamma=p.gamma, kappa=p.kappa, constant=self.constant,
                    line_integral=self.line_integral, segment_sup=self.segment_sup,
                    smoothness=self.smoothness, tail=self.tail, far_field=self.far_field,
                    bound=self.bound)
        return [_fmt(vals[k]) for k in self.CSV_FIELDS]

    def as_dict(self):
        d = asdict(self)
        d["params"] = asdict(self.params)
        return d


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def write_breakdowns_csv(path, rows, comments=()):
    with open(path, "w", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh)
        w.writerow(BaiBreakdown.CSV_FIELDS)
        for r in rows:
            w.writerow(r.csv_row())


# ---------------------------------------------------------------- quadrature

def _quad(fn, lo, hi, term, points=None):
    """``(value, abserr)`` of a scalar integral; raises if quadrature gives up."""
    if hi <= lo:
        return 0.0, 0.0
    pts = None
    if points is not None:
        pts = [p for p in np.unique(points) if lo < p < hi]
        if len(pts) > _QUAD_LIMIT // 2:
            return _quad_pieces(fn, [lo, *pts, hi], term)
    out = integrate.quad(fn, lo, hi, points=pts or None, limit=_QUAD_LIMIT,
                         epsabs=1e-11, epsrel=1e-10, full_output=1)
    val, err, ier = out[0], out[1], (out[3] if len(out) > 3 else 0)
    # ier == 2 is a roundoff stall, harmless once the absolute error is tiny
    if ier and not (ier == 2 and err <= _ROUNDOFF_OK) or not math.isfinite(val):
        msg = out[3] if len(out) > 3 else "non-finite value"
        raise QuadratureError(f"quadrature failed in {term}: {msg}", term)
    return val, err


def _quad_pieces(fn, edges, term):
    tot = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad(fn, lo, hi, term)
        tot += v
        err += e
    return tot, err


def _transform_gap(mu, nu):
    def gap(z):
        return abs(cauchy_transform(mu, complex(z)) - cauchy_transform(nu, complex(z)))
    return gap


def _require_second_moment(m: Measure, name):
    try:
        m2 = m.moment(2)
    except Exception as exc:  # pragma: no cover - defensive
        raise PreconditionError(f"{name} has no usable second moment: {exc}") from exc
    if not math.isfinite(m2):
        raise PreconditionError(f"{name} must have a finite second moment")


def _reach(*ms):
    return max(max(abs(x) for x in m.support_interval()) for m in ms)


# ------------------------------------------------------------------- terms

_TAIL_BUDGET = 1e-10


def line_tail_bound(mu: Measure, nu: Measure, T: float) -> float:
    """Bound on ``int_{-inf}^{-T} |G_mu(u+i) - G_nu(u+i)| du`` for ``T >= 2R``.

    From ``1/(z-t) = 1/z + t/z^2 + t^2/z^3 + t^3/(z^3 (z-t))`` and
    ``|z - t| >= |u|/2`` on the supports:
    ``|dm1|/T + |dm2|/(2T^2) + 2(a3_mu + a3_nu)/(3T^3)``.
    """
    d1 = abs(mu.mean - nu.mean)
    d2 = abs(mu.moment(2) - nu.moment(2))
    a3 = mu.abs_moment(3) + nu.abs_moment(3)
    return d1 / T + d2 / (2 * T ** 2) + 2 * a3 / (3 * T ** 3)


def line_integral(mu: Measure, nu: Measure, lower=None):
    """``int_{lower}^{2} |G_mu(u+i) - G_nu(u+i)| du``; ``lower=None`` means ``-inf``.

    For the half-line the range is cut at ``-T`` with :func:`line_tail_bound`
    below ``1e-10``, and that bound is returned inside the error estimate.
    """
    gap = _transform_gap(mu, nu)
    if lower is not None:
        return _quad(lambda u: gap(u + 1j), float(lower), 2.0, "line_integral")
    t0 = max(4.0, 2.0 * _reach(mu, nu))
    b = _TAIL_BUDGET / 3
    d1 = abs(mu.mean - nu.mean)
    d2 = abs(mu.moment(2) - nu.moment(2))
    a3 = mu.abs_moment(3) + nu.abs_moment(3)
    T = max(t0, d1 / b, math.sqrt(d2 / (2 * b)), (2 * a3 / (3 * b)) ** (1 / 3))
    edges = [2.0, -t0]
    while edges[-1] > -T:
        edges.append(max(10 * edges[-1], -T))
    val, err = _quad_pieces(lambda u: gap(u + 1j), edges[::-1], "line_integral")
    return val, err + line_tail_bound(mu, nu, T)


def _golden_max(fn, lo, hi, steps=_GOLDEN_STEPS):
    r = (math.sqrt(5) - 1) / 2
    c, d = hi - r * (hi - lo), lo + r * (hi - lo)
    fc, fd = fn(c), fn(d)
    for _ in range(steps):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - r * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + r * (hi - lo)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _sup_search(fn, lo, hi, seeds=_SUP_SEEDS, keep=_SUP_KEEP):
    """Seed grid plus golden-section polishing around the best ``keep`` seeds.

    ``fn`` maps an array of abscissae to values.
    """
    xs = np.linspace(lo, hi, seeds)
    vals = fn(xs)
    best_x, best = float(xs[np.argmax(vals)]), float(vals.max())
    step = xs[1] - xs[0]
    scalar = lambda x: float(fn(np.array([x]))[0])
    for k in np.argsort(vals)[::-1][:keep]:
        x, f = _golden_max(scalar, max(lo, xs[k] - step), min(hi, xs[k] + step))
        if f > best:
            best_x, best = x, f
    return best_x, best


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel_rule(lo, hi, panels):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _gl_integrate(fn, lo, hi, panels=8):
    """Composite 16-point Gauss-Legendre along the last axis of ``fn(nodes)``.

    Returns the value on ``2*panels`` panels and, as error estimate, its gap to
    the value on ``panels`` panels.
    """
    n1, w1 = _panel_rule(lo, hi, panels)
    n2, w2 = _panel_rule(lo, hi, 2 * panels)
    coarse = fn(n1) @ w1
    fine = fn(n2) @ w2
    return fine, np.abs(fine - coarse)


def segment_sup(mu: Measure, nu: Measure, v: float, eps: float):
    """``sup_{|x| <= 2 - eps/2} int_v^1 |G_mu(x+iy) - G_nu(x+iy)| dy`` and its argmax.

    The inner integral uses :func:`_gl_integrate`; its error estimate is added.
    """
    def inner(xs):
        def gap(ys):
            z = xs[:, None] + 1j * ys[None, :]
            return np.abs(cauchy_transform(mu, z) - cauchy_transform(nu, z))
        val, err = _gl_integrate(gap, v, 1.0)
        return val + err

    half = 2.0 - eps / 2.0
    x, val = _sup_search(inner, -half, half)
    return val, x


def _window_mass(nu: Measure, xs, h):
    """``int_0^h (F(x+y) - F(x-y)) dy``, equal to ``int_{|y|<h} |F(x) - F(x+y)| dy``.

    Exact for atomic laws; otherwise quadrature with the error estimate added.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if isinstance(nu, (Atomic, Empirical)):
        loc, mas = nu.atoms()
        return np.clip(h - np.abs(loc[None, :] - xs[:, None]), 0.0, None) @ mas

    def diff(ys):
        return nu.cdf(xs[:, None] + ys[None, :]) - nu.cdf(xs[:, None] - ys[None, :])

    val, err = _gl_integrate(diff, 0.0, h)
    return val + err


def smoothness_term(nu: Measure, v: float, a: float):
    """``(1/v) sup_x int_{|y|<2va} |F_nu(x) - F_nu(x+y)| dy`` and its argmax.

    Exact for atomic laws, where the sup sits at an atom.  Otherwise a grid
    over the support widened by ``4va`` is refined three times around the
    running maximum.
    """
    h = 2.0 * v * a
    if isinstance(nu, (Atomic, Empirical)):
        loc, _ = nu.atoms()
        vals = _window_mass(nu, loc, h)
        k = int(np.argmax(vals))
        return float(vals[k]) / v, float(loc[k])

    lo, hi = nu.support_interval()
    lo, hi = lo - 2 * h, hi + 2 * h
    xs = np.linspace(lo, hi, _SMOOTH_GRID)
    best_x, best = None, -1.0
    for _ in range(_SMOOTH_LEVELS + 1):
        vals = _window_mass(nu, xs, h)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best_x, best = float(xs[k]), float(vals[k])
        step = xs[1] - xs[0]
        xs = np.linspace(max(lo, best_x - step), min(hi, best_x + step), 33)
    return best / v, best_x


def tail_term(nu: Measure, eps: float) -> float:
    """``max(F_nu(-2 + eps), 1 - F_nu(2 - eps))``, defined for ``0 < eps <= 2``."""
    if not 0 < eps <= 2:
        raise ParameterError("eps must lie in (0, 2]")
    return float(max(nu.cdf(-2.0 + eps), 1.0 - nu.cdf(2.0 - eps)))


def far_field_term(mu: Measure, nu: Measure, B: float):
    """``int_{|x|>B} |F_mu - F_nu| dx``.

    Both laws have compact support, so the integrand vanishes beyond the
    larger support radius and the integral is taken exactly over what remains.
    """
    r = _reach(mu, nu)
    if r <= B:
        return 0.0, 0.0
    breaks = np.concatenate([mu.atoms()[0], nu.atoms()[0],
                             np.ravel([mu.support_interval(), nu.support_interval()])])

    def diff(x):
        return abs(mu.cdf(x) - nu.cdf(x))

    right = _quad(diff, B, r, "far_field", breaks)
    left = _quad(diff, -r, -B, "far_field", breaks)
    return right[0] + left[0], right[1] + left[1]


# ---------------------------------------------------------------- assembly

def _shared_terms(mu, nu, p):
    _require_second_moment(mu, "mu")
    _require_second_moment(nu, "nu")
    t2, x2 = segment_sup(mu, nu, p.v, p.eps)
    t3, x3 = smoothness_term(nu, p.v, p.a)
    t4 = tail_term(nu, p.eps)
    return t2, x2, t3, x3, t4


def bai_bound_theorem(mu: Measure, nu: Measure, p: BaiParameters) -> BaiBreakdown:
    """Bound on ``Delta(mu, nu)`` from the half-line form."""
    t1, e1 = line_integral(mu, nu)
    t2, x2, t3, x3, t4 = _shared_terms(mu, nu, p)
    t1 += e1
    bound = p.c_gamma * (t1 + t2 + t3 + p.gamma * math.pi * t4)
    return BaiBreakdown("theorem", p, t1, t2, t3, t4, None, p.c_gamma, bound, x2, x3,
                        _SMOOTH_LEVELS)


def bai_bound_corollary(mu: Measure, nu: Measure, p: BaiParameters) -> BaiBreakdown:
    """Bound on ``Delta(mu, nu)`` from the form with cutoffs ``A > B``."""
    if not p.has_cutoffs:
        raise ParameterError("the corollary form needs A and B")
    t1, e1 = line_integral(mu, nu, lower=-p.A)
    t5, e5 = far_field_term(mu, nu, p.B)
    t2, x2, t3, x3, t4 = _shared_terms(mu, nu, p)
    t1 += e1
    t5 += e5
    bound = p.c_gamma_kappa * (t1 + t2 + t3 + math.pi * t5 + p.gamma * math.pi * t4)
    return BaiBreakdown("corollary", p, t1, t2, t3, t4, t5, p.c_gamma_kappa, bound, x2, x3,
                        _SMOOTH_LEVELS)


def semicircle_smoothness_bound(v, a):
    """Closed-form cap on the smoothness term for the standard semicircle law."""
    return 4.0 * a * a * v / math.pi


def semicircle_tail_bound(eps):
    """Closed-form cap on the tail term for the standard semicircle law."""
    return eps ** 1.5 / math.pi
