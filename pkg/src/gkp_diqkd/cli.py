"""Command-line front end: sweeps over squeezing or distance, single
Bell-test evaluations, seeded protocol simulation, and the oracle
validation suite.  Tables go to CSV or JSON; JSON output additionally
embeds full provenance (parameters, version, tolerances, seed)."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .chsh import TSIRELSON, MeasLabel, chsh_value, outcome_probabilities
from .codes import CodeParams
from .combs import DEFAULT_TOL, TruncationError
from .loss import ChannelParams, rate_vs_distance
from .montecarlo import ProtocolConfig, run_protocol
from .security import keyrate_curve

OUTDIR_ENV = "GKP_DIQKD_OUTDIR"

KEYRATE_COLUMNS = (
    "sq_db", "kappa", "delta_eff", "S", "P_e", "QBER", "chi", "rate", "rate_floored",
)
DISTANCE_COLUMNS = ("distance_km", "eta", "S", "QBER", "rate_floored")


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` inclusive of both ends when step divides the
    range; a bare number is a single-point range."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"range must be 'start:stop:step' or a single number, got {text!r}"
        )
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise argparse.ArgumentTypeError("range step must be positive")
    if stop < start:
        raise argparse.ArgumentTypeError("range stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def format_float(x: float) -> str:
    return f"{x:.12g}"


def _resolve_output(path: str | None):
    if path is None or path == "-":
        return None
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    return path


def write_csv(path: str | None, columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_float(float(row[c])) for c in columns))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def write_json(path: str | None, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _provenance(args, **extra) -> dict:
    prov = {
        "version": __version__,
        "tolerance": args.tol,
        "command": args.command,
    }
    prov.update(extra)
    return prov


def _params_from_args(args, sq_db: float) -> CodeParams:
    delta_state = None if args.delta_rule == "kappa" else float(args.delta_rule)
    return CodeParams.from_squeezing_db(sq_db, delta_state=delta_state, delta_det=args.delta_det)


def _channel_from_args(args) -> ChannelParams | None:
    if getattr(args, "eta", 1.0) == 1.0:
        return None
    return ChannelParams(args.eta)


def cmd_keyrate(args) -> int:
    rows = keyrate_curve(
        args.sq_db,
        delta_rule=args.delta_rule,
        channel=_channel_from_args(args),
        delta_det=args.delta_det,
        tol=args.tol,
    )
    table = [
        {
            "sq_db": r.sq_db,
            "kappa": r.kappa,
            "delta_eff": r.delta_eff,
            "S": r.s_value,
            "P_e": r.p_e,
            "QBER": r.qber,
            "chi": r.chi,
            "rate": r.rate,
            "rate_floored": r.rate_floored,
        }
        for r in rows
    ]
    path = _resolve_output(args.output)
    if args.format == "csv":
        write_csv(path, KEYRATE_COLUMNS, table)
    else:
        write_json(
            path,
            {
                "provenance": _provenance(
                    args, sq_db=args.sq_db, delta_rule=args.delta_rule,
                    delta_det=args.delta_det, eta=getattr(args, "eta", 1.0),
                ),
                "columns": list(KEYRATE_COLUMNS),
                "rows": table,
            },
        )
    return 0


def cmd_chsh(args) -> int:
    params = _params_from_args(args, args.sq_db[0])
    report = chsh_value(params, params, _channel_from_args(args), args.tol)
    payload = {
        "provenance": _provenance(
            args, sq_db=args.sq_db[0], delta_rule=args.delta_rule,
            delta_det=args.delta_det, eta=getattr(args, "eta", 1.0),
        ),
        "correlators": {
            f"{la.value},{lb.value}": c for (la, lb), c in report.correlators.items()
        },
        "s_value": report.s_value,
        "tsirelson": TSIRELSON,
    }
    write_json(_resolve_output(args.output), payload)
    return 0


def cmd_distance(args) -> int:
    params = _params_from_args(args, args.sq_db[0])
    rows = rate_vs_distance(params, args.loss_db_per_km, args.km, args.tol)
    table = [
        {
            "distance_km": r["distance_km"],
            "eta": r["eta"],
            "S": r["s_value"],
            "QBER": r["qber"],
            "rate_floored": r["rate_floored"],
        }
        for r in rows
    ]
    path = _resolve_output(args.output)
    if args.format == "csv":
        write_csv(path, DISTANCE_COLUMNS, table)
    else:
        write_json(
            path,
            {
                "provenance": _provenance(
                    args, sq_db=args.sq_db[0], delta_rule=args.delta_rule,
                    delta_det=args.delta_det, loss_db_per_km=args.loss_db_per_km,
                    km=args.km,
                ),
                "columns": list(DISTANCE_COLUMNS),
                "rows": table,
            },
        )
    return 0


def cmd_simulate(args) -> int:
    params = _params_from_args(args, args.sq_db[0])
    rule = args.rule
    if rule not in ("sqrt_n", "uniform"):
        rule = float(rule)
    cfg = ProtocolConfig(
        n_pairs=args.pairs,
        params_a=params,
        channel=_channel_from_args(args),
        seed=args.seed,
        test_fraction_rule=rule,
        tol=args.tol,
    )
    result = run_protocol(cfg)
    payload = {
        "provenance": _provenance(
            args, sq_db=args.sq_db[0], delta_rule=args.delta_rule,
            delta_det=args.delta_det, eta=getattr(args, "eta", 1.0),
            pairs=args.pairs, seed=args.seed, rule=args.rule,
            iid_rounds=True,
        ),
        "result": result.as_dict(),
    }
    write_json(_resolve_output(args.output), payload)
    return 0


def cmd_validate(args) -> int:
    from . import fock
    from .homodyne import X_OBSERVABLE, Z_OBSERVABLE, binned_matrix_2x2
    from .loss import lossy_binned_matrix_2x2
    import numpy as np

    checks = []

    def record(name, diff, budget):
        ok = diff <= budget
        checks.append({"check": name, "difference": diff, "budget": budget, "passed": ok})

    for db in args.sq_db:
        params = _params_from_args(args, db)
        mz = binned_matrix_2x2(params, Z_OBSERVABLE, args.tol)
        mx = binned_matrix_2x2(params, X_OBSERVABLE, args.tol)
        mzo, err = fock.oracle_binned_matrix(params, "q", None, args.n_max)
        mxo, _ = fock.oracle_binned_matrix(params, "p", None, args.n_max)
        record(f"M_Z at {db} dB", float(np.abs(mz - mzo).max()), 1e-6 + err)
        record(f"M_X at {db} dB", float(np.abs(mx - mxo).max()), 1e-6 + err)
        s_engine = chsh_value(params, params, None, args.tol).s_value
        s_oracle, s_err = fock.oracle_chsh(params, None, args.n_max)
        record(f"S at {db} dB", abs(s_engine - s_oracle), 1e-6 + s_err)
        if args.eta < 1.0:
            ch = ChannelParams(args.eta)
            lz = lossy_binned_matrix_2x2(params, Z_OBSERVABLE, ch, args.tol)
            lzo, lerr = fock.oracle_binned_matrix(params, "q", ch, args.n_max)
            record(f"lossy M_Z at {db} dB, eta={args.eta}", float(np.abs(lz - lzo).max()), 1e-5 + lerr)

    all_ok = all(c["passed"] for c in checks)
    payload = {
        "provenance": _provenance(args, sq_db=args.sq_db, n_max=args.n_max, eta=args.eta),
        "checks": checks,
        "passed": all_ok,
    }
    write_json(_resolve_output(args.output), payload)
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkp-diqkd",
        description=(
            "Key rates and Bell violations for grid-encoded states under "
            "binned homodyne detection. Ranges are written start:stop:step, "
            "inclusive of both ends when the step divides the range."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--sq-db", type=parse_range, default=[10.0],
                       help="squeezing in dB (single value or range)")
        p.add_argument("--delta-rule", default="kappa",
                       help="'kappa' for the symmetric peak width, or a number")
        p.add_argument("--delta-det", type=float, default=0.0,
                       help="detector Gaussian acceptance width")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="truncation tolerance of the erf sums")
        p.add_argument("--output", "-o", default=None,
                       help=f"output path ('-' or omitted: stdout; relative paths "
                            f"resolve against ${OUTDIR_ENV} when set)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("keyrate", help="key-rate table over a squeezing range")
    common(p)
    p.add_argument("--eta", type=float, default=1.0, help="channel transmissivity on Bob")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("chsh", help="one Bell-test report at fixed parameters")
    common(p, fmt=False)
    p.add_argument("--eta", type=float, default=1.0)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("distance", help="key rate versus fiber length")
    common(p)
    p.add_argument("--loss-db-per-km", type=float, default=0.2)
    p.add_argument("--km", type=parse_range, required=True, help="distance range in km")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("simulate", help="seeded Monte Carlo protocol run")
    common(p, fmt=False)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--pairs", type=int, required=True, help="number of rounds N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", default="sqrt_n",
                   help="'sqrt_n', 'uniform', or a test-round fraction")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare the engine against the number-basis oracle")
    common(p, fmt=False)
    p.add_argument("--eta", type=float, default=0.9)
    p.add_argument("--n-max", type=int, default=150, help="oracle Fock cutoff")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TruncationError as exc:
        print(f"error: numerical non-convergence: {exc} "
              f"(tail bound {exc.tail_bound:.3e})", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
