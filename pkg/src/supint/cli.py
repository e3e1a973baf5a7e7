"""Command line front end.

    supint simulate|verify|closed-form|geometry --config PATH [--out DIR] [--seed N]

Exit codes: 0 success, 1 a ``verify`` check failed, 2 invalid configuration,
3 unsupported regime, 4 numerical failure.  ``simulate`` and ``closed-form``
record pass/fail in their JSON reports and exit 0.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .algebra import full_integral_functions
from .config import ConfigError, RunConfig, dump_config, load_config
from .dynamics import drift_report, integrate
from .errors import NumericalFailure, SingularStateError, UnsupportedRegimeError, ValidationError
from .poisson import corrupt
from .reports import (
    closed_form_comparison,
    geometry_table,
    trajectory_rows,
    verification_report,
    write_csv,
    write_json,
)

log = logging.getLogger("supint")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERIC = 0, 1, 2, 3, 4


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _integrals(cfg: RunConfig, params):
    fam = full_integral_functions(params)
    hook = cfg.verification.corrupt_integral
    if hook:
        fam = corrupt(fam, hook)
    return fam


def cmd_simulate(cfg: RunConfig) -> int:
    params, s0, it = cfg.params(), cfg.state(), cfg.integrator
    traj = integrate(params, s0, it.t_final, it.step, it.scheme)
    out = _outdir(cfg)
    integrals = _integrals(cfg, params)
    header, rows = trajectory_rows(traj, integrals)
    count = write_csv(out / cfg.outputs.trajectory_csv, header, rows)
    report = drift_report(traj, integrals, bound=cfg.verification.drift_tol)
    payload = {
        "scheme": it.scheme,
        "step": it.step,
        "t_final": it.t_final,
        "rows": count,
        **report.to_dict(),
    }
    write_json(out / cfg.outputs.drift_json, payload)
    log.info("wrote %d rows; max relative drift %.3g", count, report.max_drift)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    v = cfg.verification
    report = verification_report(
        cfg.params(),
        seed=v.seed,
        samples=v.samples,
        rank_states=v.rank_states,
        bracket_tol=v.bracket_tol,
        rank_tol=v.rank_tol,
        identity_tol=v.identity_tol,
        corrupt_integral=v.corrupt_integral,
    )
    write_json(_outdir(cfg) / cfg.outputs.verify_json, report)
    for check in report["checks"]:
        log.info("%-40s %s", check["name"], "pass" if check["passed"] else "FAIL")
    return EXIT_OK if report["all_passed"] else EXIT_CHECK_FAILED


def cmd_closed_form(cfg: RunConfig) -> int:
    params, s0, it = cfg.params(), cfg.state(), cfg.integrator
    exact, _, summary = closed_form_comparison(
        params, s0, it.t_final, it.step, it.scheme, cfg.verification.closed_form_tol
    )
    out = _outdir(cfg)
    header, rows = trajectory_rows(exact, full_integral_functions(params))
    write_csv(out / cfg.outputs.closed_form_csv, header, rows)
    write_json(out / cfg.outputs.comparison_json, summary)
    log.info("max |dq| = %.3g, max |dp| = %.3g", summary["max_abs_dq"], summary["max_abs_dp"])
    return EXIT_OK


def cmd_geometry(cfg: RunConfig) -> int:
    table = geometry_table(cfg.params(), cfg.geometry.radii, cfg.geometry.K)
    write_json(_outdir(cfg) / cfg.outputs.geometry_json, table)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "closed-form": cmd_closed_form,
    "geometry": cmd_geometry,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supint", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON run configuration (defaults if omitted)")
    parser.add_argument("--out", help="output directory (overrides outputs.directory)")
    parser.add_argument("--seed", type=int, help="verification seed (overrides verification.seed)")
    parser.add_argument(
        "--dump-config", action="store_true", help="print the effective configuration and exit"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.out is not None:
            cfg = replace(cfg, outputs=replace(cfg.outputs, directory=args.out))
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg = replace(cfg, verification=replace(cfg.verification, seed=args.seed))
    except ValidationError as exc:
        print(f"supint: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK

    try:
        return COMMANDS[args.command](cfg)
    except UnsupportedRegimeError as exc:
        print(f"supint: error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (NumericalFailure, SingularStateError) as exc:
        print(f"supint: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, KeyError) as exc:
        print(f"supint: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
