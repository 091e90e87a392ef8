"""Command-line experiment driver.

Every subcommand writes a CSV (``--out``, default stdout) whose ``#`` lines
record the seed, sizes and ``git describe`` of the source tree.

Exit codes: 0 success, 1 deterministic inequality violated, 2 precondition or
gate failure, 3 numeric non-convergence, 4 I/O or configuration error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as cfg
from . import csvio
from .bai import BaiBreakdown, BaiParameters, bai_bound_corollary, bai_bound_theorem
from .errors import ConfigError, ConvergenceError, InequalityViolation, PreconditionError
from .freeconv import AtomList, convolution_atoms, free_clt_distribution, free_convolve, nfold_atoms
from .matrices import (
    HermitianMatrix,
    InequalityReport,
    build_self_normalized,
    check_operator_inequalities,
    free_poisson_edges,
    replica_rng,
    sample_gue_family,
    trace_resolvent,
)
from .measures import Atomic, Semicircle, kolmogorov_report, load, save
from .rates import rate_fit
from .transforms import semicircle_cauchy

log = logging.getLogger("freesum")

EXIT_OK, EXIT_VIOLATION, EXIT_PRECONDITION, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4


# ------------------------------------------------------------------ helpers

def _floats(text):
    return [float(t) for t in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(t) for t in str(text).replace(",", " ").split()]


def _window(text):
    vals = _floats(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ValueError("window must be two increasing numbers 'lo,hi'")
    return tuple(vals)


def _bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _pairs(text):
    out = []
    for item in str(text).replace(" ", "").split(","):
        if item:
            loc, _, mass = item.partition(":")
            out.append((float(loc), float(mass)))
    return out


def _meta(args, **extra):
    meta = {"command": args.command, "seed": args.seed}
    meta.update(extra)
    meta["git"] = csvio.git_describe()
    return meta


def _pmap(fn, items, workers):
    """Order-preserving map, threaded when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"{args.command}: missing required option(s): "
                          + ", ".join("--" + m.replace("_", "-") for m in missing))


def two_point_law(p: float) -> Atomic:
    """Standardized two-point law: mass ``p`` at ``sqrt((1-p)/p)``, ``1-p`` at ``-sqrt(p/(1-p))``."""
    if not 0 < p < 1:
        raise PreconditionError("two-point weight p must lie in (0, 1)")
    return Atomic(np.array([-math.sqrt(p / (1 - p)), math.sqrt((1 - p) / p)]),
                  np.array([1 - p, p]))


# -------------------------------------------------------------- subcommands

def cmd_semicircle(args):
    law = Semicircle(args.variance, args.center)
    lo, hi = args.window or law.support_interval()
    x = np.linspace(lo, hi, args.points)
    rows = zip(x, law.density(x), law.cdf(x))
    csvio.write(args.out, ["x", "density", "cdf"], rows,
                _meta(args, variance=args.variance, center=args.center))


def _density_rows(m, points):
    x = m.grid if points is None else np.linspace(*m.support_interval(), points)
    return zip(x, m.density(x), m.cdf(x))


def cmd_convolve(args):
    _require(args, "m1", "m2")
    m1, m2 = load(args.m1), load(args.m2)
    res = free_convolve(m1, m2, window=args.window, resolution=args.resolution, eta=args.eta)
    meta = _meta(args, resolution=args.resolution, eta=res.eta)
    if args.reference:
        rep = kolmogorov_report(res, load(args.reference))
        meta.update(delta=rep.value, delta_at=rep.location)
    if args.save:
        save(res, args.save)
    csvio.write(args.out, ["x", "density", "cdf"], _density_rows(res, args.points), meta)


def cmd_clt(args):
    base = load(args.base) if args.base else two_point_law(args.p)
    omega = Semicircle()

    def one(n):
        t0 = time.perf_counter()
        law = free_clt_distribution(base, n, resolution=args.resolution, eta=args.eta)
        rep = kolmogorov_report(law, omega)
        return [n, rep.value, rep.location, time.perf_counter() - t0]

    rows = _pmap(one, args.n, args.workers)
    meta = _meta(args, n=",".join(map(str, args.n)), resolution=args.resolution, eta=args.eta)
    if len(rows) >= 4:
        fit = rate_fit([(r[0], r[1]) for r in rows], with_log=args.with_log)
        meta.update(exponent=fit.exponent, constant=fit.constant,
                    max_abs_residual=fit.max_abs_residual, with_log=fit.log_factor_included)
    csvio.write(args.out, ["n", "delta", "argmax", "seconds"], rows, meta)


def cmd_bai(args):
    _require(args, "mu", "nu")
    mu, nu = load(args.mu), load(args.nu)
    p = BaiParameters(args.v, args.eps, args.a, args.A, args.B)
    delta = kolmogorov_report(mu, nu).value
    out = []
    if args.variant in ("theorem", "both"):
        out.append(bai_bound_theorem(mu, nu, p))
    if args.variant in ("corollary", "both"):
        if not p.has_cutoffs:
            raise PreconditionError("the corollary variant needs both A and B")
        out.append(bai_bound_corollary(mu, nu, p))
    header = list(BaiBreakdown.CSV_FIELDS) + ["delta", "certified"]
    rows = [b.csv_row() + [delta, delta <= b.bound] for b in out]
    csvio.write(args.out, header, rows, _meta(args))


def _gue_replica(args, r):
    xs = sample_gue_family(args.n, args.N, args.seed, r)
    U, S, V2 = build_self_normalized(xs)
    z = complex(args.z_re, args.z_im)
    u_vals = U.eigenvalues()
    v_vals = V2.eigenvalues()
    err = abs(trace_resolvent(U, z, u_vals) - complex(semicircle_cauchy(z)))
    lo, hi = free_poisson_edges(args.n)
    w = args.widen
    inside = bool(v_vals[0] >= lo - w and v_vals[-1] <= hi + w)
    return [r, err, float(np.abs(u_vals).max()), v_vals[0], v_vals[-1], lo, hi, inside]


def cmd_gue_selfnorm(args):
    rows = _pmap(lambda r: _gue_replica(args, r), range(args.replicas), args.workers)
    errs = [row[1] for row in rows]
    meta = _meta(args, n=args.n, N=args.N, z=complex(args.z_re, args.z_im),
                 median_resolvent_error=float(np.median(errs)),
                 inside_fraction=sum(row[-1] for row in rows) / len(rows))
    header = ["replica", "resolvent_error", "u_norm", "v2_min", "v2_max",
              "edge_lo", "edge_hi", "v2_inside"]
    csvio.write(args.out, header, rows, meta)


def _random_hermitian(N, rng):
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return HermitianMatrix((a + a.conj().T) / 2)


def _ineq_replica(args, r):
    if args.family == "gue":
        xs = sample_gue_family(args.n, args.N, args.seed, r)
    else:
        xs = [_random_hermitian(args.N, replica_rng(args.seed, r, i)) for i in range(args.n)]
    rep = check_operator_inequalities(xs, slack=args.slack, seed=args.seed, strict=False)
    return [[r] + row for row in rep.rows()], rep


def cmd_ineq(args):
    results = _pmap(lambda r: _ineq_replica(args, r), range(args.replicas), args.workers)
    rows = [row for chunk, _ in results for row in chunk]
    csvio.write(args.out, ["replica"] + InequalityReport.CSV_HEADER, rows,
                _meta(args, n=args.n, N=args.N, family=args.family))
    bad = [(r, c) for r, (_, rep) in enumerate(results) for c in rep.checks.values()
           if c.kind == "deterministic" and c.holds is False]
    if bad:
        raise InequalityViolation("; ".join(f"replica {r} {c.name}: {c.lhs:.17g} > {c.rhs:.17g}"
                                            for r, c in bad))


def _read_series(path):
    meta, header, rows = csvio.read(path)
    try:
        i, j = header.index("n"), header.index("delta")
    except ValueError:
        raise ConfigError(f"{path}: needs 'n' and 'delta' columns") from None
    try:
        return [(int(float(row[i])), float(row[j])) for row in rows]
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_rate_fit(args):
    if args.input is None and args.series is None:
        raise ConfigError("rate-fit: give --input or --series")
    series = _read_series(args.input) if args.input else [(int(n), d) for n, d in args.series]
    fit = rate_fit(series, with_log=args.with_log)
    header = ["exponent", "log_factor_included", "constant", "max_abs_residual", "points"]
    csvio.write(args.out, header, [[fit.exponent, fit.log_factor_included, fit.constant,
                                    fit.max_abs_residual, len(series)]], _meta(args))


def _atom_source(pairs, path, what):
    if pairs is not None:
        return AtomList.from_pairs(pairs)
    if path is not None:
        return AtomList.from_measure(load(path))
    raise ConfigError(f"atoms: give --{what} or --{what}-file")


def cmd_atoms(args):
    a = _atom_source(args.first, args.first_file, "first")
    if args.second is not None or args.second_file is not None:
        out = convolution_atoms(a, _atom_source(args.second, args.second_file, "second"))
    else:
        out = nfold_atoms(a, args.n)
    csvio.write(args.out, ["location", "mass"], zip(out.locations, out.masses),
                _meta(args, n=args.n))


# ------------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--config", default=None, help="flat 'subcommand.key = value' file")
    p.add_argument("--workers", type=int, default=1, help="threads for independent replicas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freesum", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("semicircle", help="semicircle density and CDF table")
    p.add_argument("--variance", type=float, default=1.0)
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--window", type=_window, default=None)
    p.set_defaults(func=cmd_semicircle)

    p = sub.add_parser("convolve", help="free convolution of two measure files")
    p.add_argument("--m1")
    p.add_argument("--m2")
    p.add_argument("--resolution", type=int, default=4096)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--window", type=_window, default=None)
    p.add_argument("--points", type=int, default=None, help="resample the output table")
    p.add_argument("--reference", default=None, help="measure file to measure the distance to")
    p.add_argument("--save", default=None, help="write the result as a measure file")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("clt", help="free CLT laws and their distance to the semicircle")
    p.add_argument("--base", default=None, help="measure file (mean 0, variance 1)")
    p.add_argument("--p", type=float, default=0.8, help="weight of the two-point base law")
    p.add_argument("--n", type=_ints, default=[4, 8, 16, 32, 64, 128, 256])
    p.add_argument("--resolution", type=int, default=16384)
    p.add_argument("--eta", type=float, default=1e-4)
    p.add_argument("--with-log", type=_bool, default=False)
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("bai", help="Bai-type bound breakdown for a measure pair")
    p.add_argument("--mu")
    p.add_argument("--nu")
    p.add_argument("--v", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=1.2)
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--A", type=float, default=8.0)
    p.add_argument("--B", type=float, default=3.0)
    p.add_argument("--variant", choices=["theorem", "corollary", "both"], default="both")
    p.set_defaults(func=cmd_bai)

    p = sub.add_parser("gue-selfnorm", help="self-normalized GUE sums")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--replicas", type=int, default=5)
    p.add_argument("--z-re", type=float, default=0.0)
    p.add_argument("--z-im", type=float, default=1.0)
    p.add_argument("--widen", type=float, default=0.15)
    p.set_defaults(func=cmd_gue_selfnorm)

    p = sub.add_parser("ineq", help="operator inequality report")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--replicas", type=int, default=10)
    p.add_argument("--family", choices=["gue", "random"], default="gue")
    p.add_argument("--slack", type=float, default=0.2)
    p.set_defaults(func=cmd_ineq)

    p = sub.add_parser("rate-fit", help="power-law fit of a distance series")
    p.add_argument("--input", default=None, help="CSV with 'n' and 'delta' columns")
    p.add_argument("--series", type=_pairs, default=None, help="'n:delta,n:delta,...'")
    p.add_argument("--with-log", type=_bool, default=False)
    p.set_defaults(func=cmd_rate_fit)

    p = sub.add_parser("atoms", help="atoms of free convolutions")
    p.add_argument("--first", type=_pairs, default=None, help="'location:mass,...'")
    p.add_argument("--first-file", default=None)
    p.add_argument("--second", type=_pairs, default=None)
    p.add_argument("--second-file", default=None)
    p.add_argument("--n", type=int, default=2, help="n-fold power when no second law is given")
    p.set_defaults(func=cmd_atoms)

    for p in sub.choices.values():
        _common(p)
    return parser


def _converters(subparser):
    conv = {}
    for act in subparser._actions:
        if act.dest in ("help", "config", "func") or not act.option_strings:
            continue
        fn = act.type or str
        if act.choices is not None:
            choices = act.choices

            def fn(raw, _f=fn, _c=choices):
                val = _f(raw)
                if val not in _c:
                    raise ValueError(f"expected one of {sorted(_c)}")
                return val
        conv[act.dest] = fn
    return conv


def parse_args(argv=None):
    """Parse ``argv``; values from ``--config`` act as defaults that flags override."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        sections = cfg.load(args.config)
        subs = parser._subparsers._group_actions[0].choices
        unknown = sorted(set(sections) - set(subs))
        if unknown:
            raise ConfigError(f"unknown subcommand section(s) in config: {', '.join(unknown)}")
        # every section is validated so a typo anywhere in the file fails loudly
        resolved = {name: cfg.resolve(body, _converters(subs[name]), name)
                    for name, body in sections.items()}
        subs[args.command].set_defaults(**resolved.get(args.command, {}))
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except InequalityViolation as exc:
        print(f"inequality violated: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigError, OSError) as exc:
        print(f"I/O or configuration error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
