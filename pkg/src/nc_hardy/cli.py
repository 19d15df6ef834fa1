"""Command-line front end.

Exit codes: 0 all checks passed, 1 at least one violation, 2 usage or
configuration error.
"""

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__
from .algebra import TracialAlgebra
from .constants import k2k_constant, lp_operator_norm
from .fixtures import read_fixture, to_fixture
from .harness import SCHEMA_VERSION, ConfigError, TrialConfig
from .sampling import random_algebra, sample_operator
from .szego import jensen_search, szego_infimum, szego_infimum_right
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
SZEGO_TOL = 1e-8


class UsageError(Exception):
    pass


def _now():
    return datetime.now(timezone.utc).isoformat()


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _emit(args, text):
    fh, close = _open_out(args.out)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _manifest(command, config, seed, started, out):
    return {
        "command": command,
        "config": config,
        "version": __version__,
        "seed": seed,
        "started": started,
        "finished": _now(),
        "outputs": [out] if out not in (None, "-") else ["<stdout>"],
    }


def _document(manifest, **body):
    return json.dumps({"schema": SCHEMA_VERSION, "manifest": manifest, **body}, indent=2) + "\n"


def _csv(rows, header):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _config_from(args):
    return TrialConfig(
        dims=tuple(args.dims),
        block_spec=args.blocks,
        weight_spec=args.weights,
        trials=args.trials,
        seed=args.seed,
        tolerance=args.tol,
    )


def cmd_verify(args):
    started = _now()
    names = list(SUITES) if args.suites.strip() == "all" else [s.strip() for s in args.suites.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown or not names:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)} or 'all'")
    cfg = _config_from(args)
    fh, close = _open_out(args.out)
    try:
        reports = [run_suite(name, cfg) for name in names]
        if args.format == "csv":
            rows = [(r.name, k, repr(v)) for r in reports for k, v in r.constants.items()]
            rows += [(r.name, "pass", int(r.passed)) for r in reports]
            fh.write(_csv(rows, ("suite", "metric", "value")))
        else:
            config = {"suites": names, **cfg.to_dict()}
            manifest = _manifest("verify", config, cfg.seed, started, args.out)
            fh.write(_document(manifest, reports=[r.to_dict() for r in reports]))
    finally:
        if close:
            fh.close()
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_constants(args):
    started = _now()
    if args.kmax < 1:
        raise UsageError("--kmax must be >= 1")
    rows = []
    for k in range(1, args.kmax + 1):
        K = k2k_constant(k)
        rows.append((2 * k, K, 2 * K))
    if args.format == "csv":
        _emit(args, _csv([(p, repr(K), repr(K2)) for p, K, K2 in rows], ("p", "K", "2K")))
    else:
        manifest = _manifest("constants", {"kmax": args.kmax}, None, started, args.out)
        _emit(args, _document(manifest, rows=[{"p": p, "K": K, "2K": K2} for p, K, K2 in rows]))
    return EXIT_OK


def _bundled_fixture():
    ref = resources.files("nc_hardy") / "data" / "szego_example.json"
    with resources.as_file(ref) as path:
        return read_fixture(path)


def cmd_szego(args):
    started = _now()
    if args.fixture:
        try:
            alg, a = read_fixture(args.fixture)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read fixture {args.fixture}: {exc}") from None
    elif args.dim:
        rng = np.random.default_rng(args.seed)
        alg = random_algebra(args.dim, rng, args.blocks, args.weights)
        a = sample_operator(alg, "block-upper-invertible", rng) + 1.5 * alg.identity()
    else:
        alg, a = _bundled_fixture()
    sides = ("left", "right") if args.side == "both" else (args.side,)
    solutions = []
    ok = True
    for side in sides:
        sol = szego_infimum(alg, a) if side == "left" else szego_infimum_right(alg, a)
        agree = sol.relative_gap <= SZEGO_TOL
        ok &= agree
        solutions.append(
            {
                "side": side,
                "achieved": sol.achieved,
                "predicted": sol.predicted,
                "relative_gap": sol.relative_gap,
                "normal_equation_residual": sol.residual,
                "gram_condition": sol.gram_condition,
                "minimizer_vs_closed_form": alg.norm2(sol.minimizer - sol.closed_form),
                "pass": agree,
                "minimizer": to_fixture(alg, sol.minimizer),
                "closed_form": to_fixture(alg, sol.closed_form),
            }
        )
    config = {"fixture": args.fixture, "dim": args.dim, "side": args.side}
    manifest = _manifest("szego", config, args.seed if args.dim else None, started, args.out)
    _emit(args, _document(manifest, witness=to_fixture(alg, a), solutions=solutions))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_jensen_search(args):
    started = _now()
    cfg = _config_from(args)
    report = jensen_search(cfg)
    manifest = _manifest("jensen-search", cfg.to_dict(), cfg.seed, started, args.out)
    _emit(args, _document(manifest, reports=[report.to_dict()]))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_sweep(args):
    if any(p < 1 for p in args.p_list):
        raise UsageError("--p-list values must be >= 1")
    if any(d < 1 for d in args.dims):
        raise UsageError("--dims values must be >= 1")
    rows = []
    for dim in args.dims:
        alg = TracialAlgebra.uniform(dim) if args.blocks == "singletons" and args.weights == "uniform" else (
            random_algebra(dim, np.random.default_rng(args.seed), args.blocks, args.weights)
        )
        for p in args.p_list:
            if p == 2:
                est = lp_operator_norm(alg, 2, "exact-l2").value
            else:
                rng = np.random.default_rng([args.seed, dim, int(round(p * 1000))])
                est = lp_operator_norm(
                    alg, p, "multistart", restarts=args.restarts, iterations=args.iterations,
                    rng=rng, hermitian=args.hermitian,
                ).value
            bound = ""
            if float(p).is_integer() and int(p) % 2 == 0:
                K = k2k_constant(int(p) // 2)
                bound = repr(K if args.hermitian else 2 * K)
            rows.append((dim, repr(float(p)), repr(est), bound))
    _emit(args, _csv(rows, ("dim", "p", "estimate", "proven_bound")))
    return EXIT_OK


def _add_sampling(parser, trials, seed):
    parser.add_argument("--dims", type=_int_list, default=[2, 4, 8])
    parser.add_argument("--blocks", default="random", help="singletons | random | fixed:K")
    parser.add_argument("--weights", default="random", choices=("uniform", "random"))
    parser.add_argument("--trials", type=int, default=trials)
    parser.add_argument("--seed", type=int, default=seed)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="nc-hardy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run inequality suites")
    p.add_argument("--suites", default="all", help=f"comma list of {', '.join(SUITES)} or 'all'")
    _add_sampling(p, trials=100, seed=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="table of K_2k")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("szego", help="Szego infimum for a fixture or a sampled operator")
    p.add_argument("--fixture", default=None, help="matrix fixture (default: bundled example)")
    p.add_argument("--dim", type=int, default=None, help="sample a random a of this dimension instead")
    p.add_argument("--blocks", default="random")
    p.add_argument("--weights", default="random", choices=("uniform", "random"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", choices=("left", "right", "both"), default="both")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_szego)

    p = sub.add_parser("jensen-search", help="explore the H-infinity Jensen question")
    _add_sampling(p, trials=300, seed=7)
    p.set_defaults(func=cmd_jensen_search)

    p = sub.add_parser("sweep", help="empirical L^p norms of the conjugation (CSV)")
    p.add_argument("--p-list", type=_float_list, default=[1.5, 2, 3, 4, 6])
    p.add_argument("--dims", type=_int_list, default=[2, 4, 8])
    p.add_argument("--blocks", default="singletons")
    p.add_argument("--weights", default="uniform", choices=("uniform", "random"))
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iterations", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hermitian", action="store_true", help="restrict to self-adjoint inputs")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"nc-hardy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
