"""Random Hermitian matrices, self-normalized matrix sums and operator inequalities."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import csvio
from .eigen import eigh
from .errors import (EigenConvergenceError, InequalityViolation, InvertibilityError,
                     ParameterError, PreconditionError)

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
SPECTRAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A square matrix equal to its conjugate transpose.

    The asymmetry ``max|M - M^*|`` may not exceed ``1e-12`` relative to
    ``max(1, max|M|)``; the stored entries are the exactly Hermitian part.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise PreconditionError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise PreconditionError("matrix entries must be finite")
        if m.size:
            scale = max(1.0, float(np.abs(m).max()))
            asym = float(np.abs(m - m.conj().T).max())
            if asym > HERMITIAN_TOL * scale:
                raise PreconditionError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, N):
        return cls(np.eye(N))

    def eigenvalues(self):
        return eigh(self.entries, want_vectors=False)[0]

    def norm(self) -> float:
        """Operator norm, the largest absolute eigenvalue."""
        if self.N == 0:
            return 0.0
        ev = self.eigenvalues()
        return float(max(abs(ev[0]), abs(ev[-1])))

    def trace(self) -> float:
        """Normalized trace ``tr_N``."""
        return float(np.trace(self.entries).real) / self.N

    def frobenius(self) -> float:
        """Normalized Hilbert-Schmidt norm ``tr_N(M^* M)^{1/2}``."""
        return float(np.linalg.norm(self.entries)) / math.sqrt(self.N)

    def square(self) -> "HermitianMatrix":
        return HermitianMatrix(self.entries @ self.entries)


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float

    def apply(self, fn) -> HermitianMatrix:
        """Functional calculus ``Q fn(Lambda) Q^*``."""
        q = self.eigenvectors
        return HermitianMatrix((q * fn(self.eigenvalues)[None, :]) @ q.conj().T)


def hermitian_eigen(m: HermitianMatrix) -> SpectralDecomposition:
    """Eigenvalues (ascending) and a unitary eigenvector frame, with checked accuracy.

    Raises
    ------
    EigenConvergenceError
        If the iteration stalls, or the relative residual
        ``|MQ - Q Lambda|_F / |M|_F`` or the unitarity defect exceeds ``1e-10``.
    """
    a = m.entries
    vals, vecs = eigh(a)
    defect = np.linalg.norm(a @ vecs - vecs * vals[None, :])
    scale = np.linalg.norm(a)
    residual = float(defect / scale) if scale > 0 else float(defect)
    unit = float(np.abs(vecs.conj().T @ vecs - np.eye(m.N)).max()) if m.N else 0.0
    if residual > SPECTRAL_TOL or unit > SPECTRAL_TOL:
        raise EigenConvergenceError(
            f"spectral decomposition inaccurate: residual {residual:.3e}, unitarity {unit:.3e}", -1)
    return SpectralDecomposition(vals, vecs, residual)


def replica_rng(seed: int, replica: int = 0, index: int = 0) -> np.random.Generator:
    """Independent stream for matrix ``index`` of replica ``replica`` under base ``seed``.

    The three integers are mixed by :class:`numpy.random.SeedSequence`, so any
    single matrix can be regenerated without drawing the others.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, replica, index])))


def sample_gue(N: int, rng: np.random.Generator) -> HermitianMatrix:
    """GUE matrix scaled by ``N^{-1/2}``.

    Diagonal entries are real standard normal; off-diagonal entries have
    independent real and imaginary parts of variance 1/2.
    """
    if N < 1:
        raise ParameterError("N must be positive")
    g = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
    upper = np.triu(g, 1)
    m = upper + upper.conj().T
    m[np.diag_indices(N)] = rng.standard_normal(N)
    return HermitianMatrix(m / math.sqrt(N))


def sample_gue_family(n: int, N: int, seed: int, replica: int = 0):
    """``n`` independent GUE matrices, matrix ``i`` drawn from ``replica_rng(seed, replica, i)``."""
    return [sample_gue(N, replica_rng(seed, replica, i)) for i in range(n)]


class SelfNormalizedSum(NamedTuple):
    U: HermitianMatrix
    S: HermitianMatrix
    V2: HermitianMatrix


def _check_family(xs: Sequence[HermitianMatrix]):
    if not xs:
        raise ParameterError("need at least one matrix")
    N = xs[0].N
    if any(x.N != N for x in xs):
        raise PreconditionError("all matrices must share the same dimension")
    return N


def sums(xs: Sequence[HermitianMatrix], normalization="count"):
    """``(S, V^2)`` for ``c = sqrt(n)`` (``"count"``) or ``c^2 = sum tr_N X_i^2`` (``"variance"``).

    ``S = sum X_i / c`` and ``V^2 = sum X_i^2 / c^2``.
    """
    _check_family(xs)
    n = len(xs)
    total = sum(x.entries for x in xs)
    squares = sum(x.entries @ x.entries for x in xs)
    if normalization == "count":
        c2 = float(n)
    elif normalization == "variance":
        c2 = float(np.trace(squares).real) / xs[0].N
        if not c2 > 0:
            raise InvertibilityError("sum of variances vanishes", 0.0)
    else:
        raise ParameterError(f"unknown normalization {normalization!r}")
    return HermitianMatrix(total / math.sqrt(c2)), HermitianMatrix(squares / c2)


def build_self_normalized(xs: Sequence[HermitianMatrix], pinv_floor=None,
                          normalization="count") -> SelfNormalizedSum:
    """``U = (V^2)^{-1/4} S (V^2)^{-1/4}`` through the spectral decomposition of ``V^2``.

    Parameters
    ----------
    xs : sequence of HermitianMatrix
    pinv_floor : float, optional
        Smallest admissible eigenvalue of ``V^2``; defaults to ``1e-12 |V^2|``.
    normalization : {"count", "variance"}
        See :func:`sums`.  ``U`` does not depend on it.

    Raises
    ------
    InvertibilityError
        If the least eigenvalue of ``V^2`` is not above the floor.
    """
    S, V2 = sums(xs, normalization)
    dec = hermitian_eigen(V2)
    top = float(dec.eigenvalues[-1])
    floor = 1e-12 * max(top, 0.0) if pinv_floor is None else float(pinv_floor)
    low = float(dec.eigenvalues[0])
    if not low > floor:
        raise InvertibilityError(
            f"V^2 is not invertible: least eigenvalue {low:.3e} <= floor {floor:.3e}", low)
    root = dec.apply(lambda lam: lam ** -0.25).entries
    U = HermitianMatrix(root @ S.entries @ root)
    return SelfNormalizedSum(U, S, V2)


def trace_resolvent(m, z, eigenvalues=None):
    """``tr_N((z - M)^{-1})``, i.e. the mean of ``1/(z - lambda_k)``; vectorized over ``z``."""
    from .transforms import HalfPlanePoint

    scalar = isinstance(z, HalfPlanePoint) or np.ndim(z) == 0
    if isinstance(z, HalfPlanePoint):
        z = z.z
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(~(za.imag > 0)):
        raise PreconditionError("resolvent traces are evaluated on Im z > 0 only")
    lam = m.eigenvalues() if eigenvalues is None else np.asarray(eigenvalues, dtype=float)
    out = (1.0 / (za[:, None] - lam[None, :])).mean(axis=1)
    return complex(out[0]) if scalar else out


# --------------------------------------------------------------- inequalities

@dataclass(frozen=True)
class CheckResult:
    """One inequality: ``margin = rhs - lhs`` (non-negative when it holds)."""

    name: str
    kind: str
    lhs: float
    rhs: float
    holds: bool | None
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class InequalityReport:
    n: int
    N: int
    checks: dict = field(default_factory=dict)
    seed: int | None = None

    def __getitem__(self, name) -> CheckResult:
        return self.checks[name]

    @property
    def deterministic_ok(self) -> bool:
        return all(c.holds is not False for c in self.checks.values() if c.kind == "deterministic")

    def rows(self):
        for c in self.checks.values():
            yield [self.seed, self.n, self.N, c.name, c.kind, c.lhs, c.rhs, c.margin,
                   "" if c.holds is None else c.holds]

    CSV_HEADER = ["seed", "n", "N", "check", "kind", "lhs", "rhs", "margin", "holds"]


def _neumann_check(V2: HermitianMatrix, tol=1e-8, max_terms=100000):
    N = V2.N
    d = np.eye(N) - V2.entries
    dist = HermitianMatrix(d).norm()
    if not dist < 1:
        return CheckResult("neumann", "deterministic", dist, 1.0, None,
                           f"not applicable: |I - V^2| = {dist:.6g} >= 1")
    dec = hermitian_eigen(V2)
    inv = dec.apply(lambda lam: 1.0 / lam).entries
    partial, term = np.eye(N, dtype=complex), np.eye(N, dtype=complex)
    for k in range(1, max_terms):
        term = term @ d
        partial = partial + term
        if np.abs(term).max() < 1e-17 or dist ** k < 1e-17:
            break
    err = float(np.abs(partial - inv).max())
    inv_norm = float(1.0 / dec.eigenvalues[0])
    cap = 1.0 / (1.0 - dist)
    holds = err <= tol and inv_norm <= cap * (1 + 1e-12)
    return CheckResult("neumann", "deterministic", inv_norm, cap, holds,
                       f"series error {err:.3e}, |I - V^2| = {dist:.6g}")


def bikchentaev_margin(ts: Sequence[np.ndarray], weights) -> float:
    """Least eigenvalue of ``sum w_i |T_i|^2 - |sum w_i T_i|^2`` with ``|T|^2 = T^* T``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12 or w.size != len(ts):
        raise ParameterError("weights must be a probability vector matching the matrices")
    mix = sum(wi * t for wi, t in zip(w, ts))
    gap = sum(wi * (t.conj().T @ t) for wi, t in zip(w, ts)) - mix.conj().T @ mix
    return float(eigh(0.5 * (gap + gap.conj().T), want_vectors=False)[0][0])


def frobenius_bound(S: HermitianMatrix, V2: HermitianMatrix, n: int) -> float:
    """``2 |S|_2 + 3 sqrt(2n) |V^2 - I|_2`` in normalized Hilbert-Schmidt norms."""
    dev = HermitianMatrix(V2.entries - np.eye(V2.N)).frobenius()
    return 2.0 * S.frobenius() + 3.0 * math.sqrt(2.0 * n) * dev


def voiculescu_check(xs: Sequence[HermitianMatrix], slack=0.2) -> CheckResult:
    """``|sum X_i| <= max|X_i| + 2 (sum tr_N X_i^2)^{1/2} + slack``, a statistical check."""
    N = _check_family(xs)
    total = HermitianMatrix(sum(x.entries for x in xs)).norm()
    # tr(X^2) = sum |x_jk|^2 for Hermitian X
    second = sum(float(np.sum(np.abs(x.entries) ** 2)) for x in xs) / N
    rhs = max(x.norm() for x in xs) + 2.0 * math.sqrt(second) + slack
    return CheckResult("voiculescu", "statistical", total, rhs, total <= rhs)


def check_operator_inequalities(xs: Sequence[HermitianMatrix], weights=None, slack=0.2,
                                seed=None, strict=True, tol=1e-9) -> InequalityReport:
    """Evaluate five operator inequalities for a Hermitian family.

    ``neumann``
        Neumann series of ``(V^2)^{-1}`` and ``|(V^2)^{-1}| <= 1/(1 - |I - V^2|)``,
        when ``|I - V^2| < 1``.
    ``bikchentaev``
        ``|sum w_i X_i|^2 <= sum w_i |X_i|^2`` for convex ``weights``.
    ``norm``
        ``|U| <= sqrt(n)``.
    ``frobenius``
        ``|U|_2 <= 2|S|_2 + 3 sqrt(2n) |V^2 - I|_2``.
    ``voiculescu``
        ``|sum X_i| <= max|X_i| + 2 (sum tr_N X_i^2)^{1/2} + slack``; exact only
        in the free limit, so a failure is logged rather than raised.

    With ``strict`` a failed deterministic check raises :class:`InequalityViolation`.
    """
    N = _check_family(xs)
    n = len(xs)
    rep = InequalityReport(n, N, seed=seed)
    U, S, V2 = build_self_normalized(xs)

    rep.checks["neumann"] = _neumann_check(V2)

    if weights is None:
        weights = np.full(n, 1.0 / n)
    bik = bikchentaev_margin([x.entries for x in xs], weights)
    rep.checks["bikchentaev"] = CheckResult("bikchentaev", "deterministic", -bik, 0.0,
                                            bik >= -tol)

    unorm = U.norm()
    rep.checks["norm"] = CheckResult("norm", "deterministic", unorm, math.sqrt(n),
                                     unorm <= math.sqrt(n) + tol)

    ufro = U.frobenius()
    cap = frobenius_bound(S, V2, n)
    rep.checks["frobenius"] = CheckResult("frobenius", "deterministic", ufro, cap,
                                          ufro <= cap + tol, f"|S|_2 = {S.frobenius():.6g}")

    rep.checks["voiculescu"] = voiculescu_check(xs, slack)
    if not rep.checks["voiculescu"].holds:
        c = rep.checks["voiculescu"]
        log.warning("voiculescu bound exceeded: seed=%s n=%d N=%d margin=%.6g",
                    seed, n, N, c.rhs - c.lhs)

    if strict and not rep.deterministic_ok:
        bad = [c for c in rep.checks.values() if c.kind == "deterministic" and c.holds is False]
        raise InequalityViolation("; ".join(f"{c.name}: {c.lhs:.17g} > {c.rhs:.17g}"
                                            for c in bad))
    return rep


def free_poisson_edges(n: int):
    """Spectrum ``[1 - 2/sqrt(n) + 1/n, 1 + 2/sqrt(n) + 1/n]`` of the normalized sum of ``n`` free squares."""
    r = 2.0 / math.sqrt(n)
    return 1.0 - r + 1.0 / n, 1.0 + r + 1.0 / n


def write_eigenvalues_csv(path, values, meta=None):
    return csvio.write(path, ["eigenvalue"], ([v] for v in np.asarray(values)), meta)
