"""Lyapunov fractions, rate formulas with their hypotheses, and rate fitting."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .errors import GateError, ParameterError, PreconditionError
from .measures import Measure

_REL = 1e-12


@dataclass(frozen=True)
class MomentProfile:
    """Norm and moment data of one centred summand.

    Parameters
    ----------
    norm_bound : float or None
        Operator norm (support radius); ``None`` for unbounded summands.
    variance : float
        ``phi(X^2)``, positive.
    abs_moment_3, abs_moment_4 : float
        ``phi(|X|^3)`` and ``phi(|X|^4)``.
    """

    norm_bound: float | None
    variance: float
    abs_moment_3: float
    abs_moment_4: float

    def __post_init__(self):
        s2, m3, m4 = self.variance, self.abs_moment_3, self.abs_moment_4
        if not s2 > 0:
            raise ParameterError("variance must be positive")
        if m3 < 0 or m4 < 0:
            raise ParameterError("absolute moments must be non-negative")
        if m3 * m3 > s2 * m4 * (1 + _REL):
            raise ParameterError("moments violate phi(|X|^3)^2 <= phi(X^2) phi(X^4)")
        if self.norm_bound is not None:
            b = self.norm_bound
            if b < 0:
                raise ParameterError("norm bound must be non-negative")
            if m3 > b ** 3 * (1 + _REL) or m4 > b ** 4 * (1 + _REL) or s2 > b * b * (1 + _REL):
                raise ParameterError("moments exceed the powers of the norm bound")

    @classmethod
    def from_measure(cls, m: Measure, bounded=True, center_tol=1e-8):
        """Profile of a centred law; the norm bound is its support radius."""
        if abs(m.mean) > center_tol * max(1.0, math.sqrt(m.moment(2))):
            raise PreconditionError(f"summand must be centred, mean is {m.mean!r}")
        lo, hi = m.support_interval()
        nb = max(abs(lo), abs(hi)) if bounded else None
        return cls(nb, m.moment(2), m.abs_moment(3), m.moment(4))


@dataclass(frozen=True)
class LyapunovReport:
    """``B_n^2`` and the Lyapunov fractions of a family of ``n`` summands.

    Support-type fractions ``L_S3``, ``L_S4`` and ``max_norm`` are ``None``
    unless every summand has a norm bound.  ``common`` holds the shared
    profile when all summands are identical.
    """

    n: int
    B2: float
    L3: float
    L4: float
    L_S3: float | None
    L_S4: float | None
    max_norm: float | None
    common: MomentProfile | None = None

    @property
    def bounded(self) -> bool:
        return self.L_S3 is not None


def lyapunov_report(profiles: Sequence[MomentProfile]) -> LyapunovReport:
    """Fractions ``sum phi(|X_i|^k) / B_n^k`` and ``sum |X_i|^k / B_n^k`` for ``k = 3, 4``."""
    profiles = list(profiles)
    if not profiles:
        raise PreconditionError("need at least one summand")
    B2 = math.fsum(p.variance for p in profiles)
    if not B2 > 0:
        raise PreconditionError("total variance B_n^2 must be positive")
    L3 = math.fsum(p.abs_moment_3 for p in profiles) / B2 ** 1.5
    L4 = math.fsum(p.abs_moment_4 for p in profiles) / B2 ** 2
    LS3 = LS4 = mx = None
    if all(p.norm_bound is not None for p in profiles):
        LS3 = math.fsum(p.norm_bound ** 3 for p in profiles) / B2 ** 1.5
        LS4 = math.fsum(p.norm_bound ** 4 for p in profiles) / B2 ** 2
        mx = max(p.norm_bound for p in profiles)
    common = profiles[0] if all(p == profiles[0] for p in profiles) else None
    return LyapunovReport(len(profiles), B2, L3, L4, LS3, LS4, mx, common)


class Theorem(enum.Enum):
    """Rate statements with checkable hypotheses."""

    THM_1_1 = "thm1.1"   # bounded, general: log-corrected rate
    COR_1_2 = "cor1.2"   # bounded, general: support radius
    COR_1_3 = "cor1.3"   # bounded, identical: log n / sqrt(n)
    THM_1_4 = "thm1.4"   # fourth moments, general
    COR_1_5 = "cor1.5"   # fourth moments, identical: n^{-1/4}


@dataclass(frozen=True)
class GateResult:
    theorem: Theorem
    passed: bool
    violations: tuple
    notes: tuple = ()

    def __bool__(self):
        return self.passed


def _need_bounded(report, theorem):
    if not report.bounded:
        raise PreconditionError(f"{theorem.value} needs a norm bound for every summand")


def _need_identical(report, violations):
    p = report.common
    if p is None:
        violations.append("summands must be identically distributed")
        return None
    if abs(p.variance - 1.0) > 1e-12:
        violations.append(f"phi(X_1^2) = 1 fails: phi(X_1^2) = {p.variance!r}")
    return p


def precondition_gate(report: LyapunovReport, theorem: Theorem) -> GateResult:
    """Check the hypotheses of ``theorem``; every failure names the strict inequality."""
    v, notes = [], []
    if theorem in (Theorem.THM_1_1, Theorem.COR_1_2):
        _need_bounded(report, theorem)
        cap = 1 / 16 if theorem is Theorem.THM_1_1 else 1 / 64
        label = "1/16" if theorem is Theorem.THM_1_1 else "1/64"
        if not report.L_S4 < cap:
            v.append(f"L_S4 < {label} fails: L_S4 = {report.L_S4!r}")
        if theorem is Theorem.THM_1_1 and not report.L_S3 < 1 / (2 * math.e):
            v.append(f"L_S3 < 1/(2e) fails: L_S3 = {report.L_S3!r}")
    elif theorem is Theorem.COR_1_3:
        _need_bounded(report, theorem)
        p = _need_identical(report, v)
        if p is not None and not report.n > 16 * p.norm_bound ** 4:
            v.append(f"n > 16 |X_1|^4 fails: n = {report.n}, 16 |X_1|^4 = {16 * p.norm_bound ** 4!r}")
    elif theorem in (Theorem.THM_1_4, Theorem.COR_1_5):
        if theorem is Theorem.COR_1_5:
            _need_identical(report, v)
        notes.append("n >= n0 (existence of U_n) is not checkable; the Lindeberg "
                     "condition is a limit statement, see lindeberg_functional")
    else:  # pragma: no cover
        raise ParameterError(f"unknown theorem {theorem!r}")
    return GateResult(theorem, not v, tuple(v), tuple(notes))


def theorem_bound(report: LyapunovReport, theorem: Theorem, C: float = 1.0, n: int | None = None) -> float:
    """Right-hand side of ``theorem``'s rate with absolute constant ``C``.

    ``COR_1_2`` returns the support radius instead of a distance bound.

    Raises
    ------
    GateError
        If :func:`precondition_gate` fails.
    """
    if not C > 0:
        raise ParameterError("C must be positive")
    gate = precondition_gate(report, theorem)
    if not gate:
        raise GateError(f"hypotheses of {theorem.value} fail: " + "; ".join(gate.violations),
                        gate.violations)
    n = report.n if n is None else int(n)
    if theorem is Theorem.THM_1_1:
        a, b = report.L_S3, report.L_S4
        return C * max(abs(math.log(a)) * a, abs(math.log(b)) * math.sqrt(b))
    if theorem is Theorem.COR_1_2:
        return support_radius(report)
    if theorem is Theorem.COR_1_3:
        return C * report.common.norm_bound ** 3 * math.log(n) / math.sqrt(n)
    if theorem is Theorem.THM_1_4:
        L = report.L4
        return C * (L ** 0.25 + math.sqrt(n) * L ** 0.75 + n * L ** 1.25)
    return C * report.common.abs_moment_4 ** 1.25 / n ** 0.25


def support_radius(report: LyapunovReport) -> float:
    """``2 + max|X_i|/B_n + 57 L_S4^{1/2}`` (requires ``L_S4 < 1/64``)."""
    gate = precondition_gate(report, Theorem.COR_1_2)
    if not gate:
        raise GateError("support radius hypotheses fail: " + "; ".join(gate.violations),
                        gate.violations)
    return 2.0 + report.max_norm / math.sqrt(report.B2) + 57.0 * math.sqrt(report.L_S4)


def identical_support_radius(norm: float, n: int) -> float:
    """``2 + 58 |X_1|^2 / sqrt(n)``, valid for ``n > 64 |X_1|^4``."""
    if not n > 64 * norm ** 4:
        raise GateError(f"n > 64 |X_1|^4 fails: n = {n}", [f"n > 64 |X_1|^4 fails: n = {n}"])
    return 2.0 + 58.0 * norm ** 2 / math.sqrt(n)


# --------------------------------------------------------------- Lindeberg

def truncated_second_moment(m: Measure, t: float) -> float:
    """``int_{|x| > t} x^2 m(dx)`` (strict inequality at atoms)."""
    loc, mas = m.atoms()
    out = float(np.sum(mas[np.abs(loc) > t] * loc[np.abs(loc) > t] ** 2)) if loc.size else 0.0
    try:
        m.density(0.0)
    except TypeError:
        return out
    lo, hi = m.support_interval()
    f = lambda x: x * x * m.density(x)
    if hi > t:
        out += integrate.quad(f, max(t, lo), hi, limit=200)[0]
    if lo < -t:
        out += integrate.quad(f, lo, min(-t, hi), limit=200)[0]
    return out


def lindeberg_functional(measures: Iterable[Measure], eps: float) -> float:
    """``(1/B_n^2) sum_i int_{|x| > eps B_n} x^2 m_i(dx)`` with ``B_n^2 = sum m_i(x^2)``."""
    if not eps > 0:
        raise ParameterError("eps must be positive")
    measures = list(measures)
    B2 = math.fsum(m.moment(2) for m in measures)
    if not B2 > 0:
        raise PreconditionError("total variance must be positive")
    t = eps * math.sqrt(B2)
    return math.fsum(truncated_second_moment(m, t) for m in measures) / B2


# ------------------------------------------------------------------ fitting

@dataclass(frozen=True)
class RateFit:
    exponent: float
    log_factor_included: bool
    constant: float
    max_abs_residual: float

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        out = self.constant * n ** self.exponent
        return out * np.log(n) if self.log_factor_included else out


def rate_fit(series, with_log: bool = False) -> RateFit:
    """Least-squares fit of ``delta = c n^p`` (times ``log n`` if ``with_log``) on log scales.

    Parameters
    ----------
    series : iterable of (n, delta)
        At least four points with strictly increasing ``n`` (``n >= 2``) and
        positive ``delta``.
    """
    pts = [(float(n), float(d)) for n, d in series]
    if len(pts) < 4:
        raise PreconditionError("need at least four points")
    ns = np.array([p[0] for p in pts])
    ds = np.array([p[1] for p in pts])
    if np.any(np.diff(ns) <= 0):
        raise PreconditionError("n must be strictly increasing")
    if np.any(~(ds > 0)) or np.any(~np.isfinite(ds)):
        raise PreconditionError("degenerate series: every delta must be positive and finite")
    if with_log and np.any(ns < 2):
        raise PreconditionError("the log factor needs n >= 2")
    x = np.log(ns)
    y = np.log(ds) - (np.log(np.log(ns)) if with_log else 0.0)
    design = np.column_stack([np.ones_like(x), x])
    (logc, p), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([logc, p])
    return RateFit(float(p), bool(with_log), float(math.exp(logc)), float(np.abs(resid).max()))
