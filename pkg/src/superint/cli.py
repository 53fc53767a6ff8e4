"""Command-line entry point: ``superint <subcommand>``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import catalog, dynamics, verify
from .catalog import BindingError, CatalogError, bind
from .exact import parse_gauss
from .orbits import QuadE2, QuadS2, classify, parse_coefficients
from .phase import PhasePoint

SEED_ENV = "SUPERINT_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV}={raw!r} is not an integer") from None


def _params(items: Sequence[str] | None) -> dict[str, str] | None:
    if not items:
        return None
    out = {}
    for it in items:
        name, sep, value = it.partition("=")
        if not sep:
            raise ValueError(f"--param expects NAME=VALUE, got {it!r}")
        out[name.strip()] = value.strip()
    return out


def _bind(id_: str, items) -> catalog.BoundSystem:
    return bind(id_, _params(items), fill_defaults=True)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.3e}"
    return str(x)


# -- subcommands --------------------------------------------------------------

def cmd_list(args) -> int:
    space = None if args.space is None else verify._space_key(args.space)
    for s in catalog.systems(space):
        print(f"{s.id:4s} {s.space:9s} V = {s.potential}")
    return 0


def cmd_show(args) -> int:
    print(catalog.describe(catalog.get_system(args.id)).rstrip("\n"))
    return 0


def _print_report(rep: verify.VerificationReport) -> None:
    for c in rep.checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{rep.system:8s} {flag} {c.name}  residual={_fmt(c.residual)}  tol={c.tolerance:g}"
              f"  points={c.points}  seed={c.seed}")
    n_ok = sum(c.passed for c in rep.checks)
    print(f"{rep.system}: {n_ok}/{len(rep.checks)} checks passed")


def _table_report(space: str) -> verify.VerificationReport:
    got = verify.generate_table(space)
    bad = got.mismatches(verify.golden_table(space))
    rep = verify.VerificationReport(f"table:{space}")
    rep.checks.append(verify.CheckRecord("membership-mismatches", len(bad), 0, not bad, 0,
                                         len(got.rows) * len(got.columns)))
    return rep


def cmd_verify(args) -> int:
    if args.target.lower() == "all":
        reports = [verify.verify_system(s.id, args.samples, args.tol, args.seed)
                   for s in catalog.systems()]
        reports.append(verify.verify_families(args.samples, args.seed))
        reports += [_table_report("e2"), _table_report("s2")]
    else:
        reports = [verify.verify_system(_bind(args.target, args.param), args.samples,
                                        args.tol, args.seed)]
    if args.emit == "json":
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            _print_report(r)
    failures = [(r.system, c) for r in reports for c in r.failures()]
    for sys_id, c in failures:
        print(f"FAIL {sys_id} {c.name}: residual {_fmt(c.residual)} exceeds tolerance {c.tolerance:g}",
              file=sys.stderr)
    return 1 if failures else 0


def cmd_classify(args) -> int:
    space = verify._space_key(args.space)
    coeffs = parse_coefficients(args.coeffs, 6)
    q = QuadE2.from_cartesian(coeffs) if space == catalog.EUCLIDEAN_SPACE else QuadS2.from_entries(coeffs)
    print(classify(q).value)
    return 0


def cmd_table(args) -> int:
    got = verify.generate_table(args.space)
    print(got.dumps() if args.emit == "json" else got.markdown(), end="")
    if args.check:
        bad = got.mismatches(verify.golden_table(args.space))
        for sys_id, fam, mine, want in bad:
            print(f"MISMATCH {sys_id} {fam}: regenerated {mine}, published {want}", file=sys.stderr)
        return 1 if bad else 0
    return 0


def cmd_integrate(args) -> int:
    system = _bind(args.id, args.param)
    if args.start:
        vals = [complex(parse_gauss(v)) for v in args.start.split(",")]
        if len(vals) != 4:
            raise ValueError("--start expects q1,q2,p1,p2")
        traj = dynamics.integrate(system, PhasePoint(system.chart, *vals), args.t, args.dt)
    else:
        traj = dynamics.integrate_default(system, args.t, args.dt, args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            traj.to_csv(fh)
    names = ["H"] + [n for n in system.explicit_constants() if n != "A0"]
    drift = dynamics.drift_report(traj, system, names)
    s, e = traj.start.as_tuple(), traj.end.as_tuple()
    print(f"{system.id} t={args.t:g} dt={args.dt:g} steps={len(traj.times) - 1}")
    print("start " + " ".join(f"{complex(z):.6g}" for z in s))
    print("end   " + " ".join(f"{complex(z):.6g}" for z in e))
    for n, d in drift.items():
        print(f"drift {n} {d:.3e}")
    return 0


def cmd_export(args) -> int:
    text = catalog.export_catalog("json")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superint",
                                description="Superintegrable systems on E2,C and S2,C: catalog and checks.")
    sub = p.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    s = sub.add_parser("list", help="list catalog systems")
    s.add_argument("--space", choices=["e2", "s2"])
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("show", help="print one system")
    s.add_argument("id")
    s.set_defaults(func=cmd_show)

    s = sub.add_parser("verify", help="run every check for a system, or all")
    s.add_argument("target", help="system id or 'all'")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--emit", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("classify", help="orbit class of a quadratic element")
    s.add_argument("--space", choices=["e2", "s2"], required=True)
    s.add_argument("--coeffs", required=True,
                   help="e2: px^2,px*py,py^2,M*px,M*py,M^2; s2: C11,C22,C33,C12,C13,C23")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("table", help="regenerate a separating-coordinates table")
    s.add_argument("space", choices=["e2", "s2"])
    s.add_argument("--emit", choices=["markdown", "json"], default="markdown")
    s.add_argument("--check", action="store_true", help="exit nonzero on mismatch with the fixture")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("integrate", help="RK4 trajectory and conservation drift")
    s.add_argument("id")
    s.add_argument("--t", type=float, default=10.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--start", help="q1,q2,p1,p2 as a+bi literals")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--out", help="write the trajectory as CSV")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("export", help="write the catalog as JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_export)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CatalogError, BindingError, ValueError, verify.VerificationError,
            dynamics.IntegrationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
