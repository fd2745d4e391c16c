"""Command-line front end.

Subcommands: ``curve`` (success probability vs shot count), ``sweep-diff``
(Bayesian minus Markovian over an eta grid at three shots) and ``validate``
(self-check suites). Exit codes: 0 success, 1 validation failure, 2 bad
configuration.

For the amplitude-damping family, eta values on the command line and in
config files are fractions of pi/2; output rows carry radians.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .experiments import (
    CURVE_FIELDS,
    SWEEP_FIELDS,
    VALID_SUITES,
    ConfigError,
    make_config,
    run_curve,
    run_sweep_diff,
    run_validate,
    write_records_csv,
    write_records_json,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcdisc",
        description="Multi-shot discrimination of qubit channels.",
    )
    parser.add_argument("--version", action="version", version=f"qcdisc {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_shared(p, needs_points: bool):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument(
            "--family",
            choices=["depolarizing", "bit-flip", "amplitude-damping"],
        )
        if needs_points:
            p.add_argument(
                "--eta0",
                action="append",
                type=float,
                help="noise parameter of channel 0; repeat for several points",
            )
            p.add_argument(
                "--eta1",
                action="append",
                type=float,
                help="noise parameter of channel 1, paired with --eta0 in order",
            )
            p.add_argument("--n-max", type=int, dest="n_max")
            p.add_argument(
                "--strategies",
                help="comma-separated subset of global,bayesian,markovian",
            )
        else:
            p.add_argument("--grid", help="MIN:MAX:STEPS eta grid for both axes")
        p.add_argument("--input-mode", choices=["flat", "adaptive"], dest="input_mode")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--value-tol", type=float, dest="value_tol")
        p.add_argument("--max-evals", type=int, dest="max_evals")
        p.add_argument("--max-starts", type=int, dest="max_starts")
        p.add_argument("--out", help="output path; stdout when omitted")
        p.add_argument("--format", choices=["csv", "json"], dest="fmt")

    curve = sub.add_parser("curve", help="success probability vs shot count")
    add_shared(curve, needs_points=True)

    sweep = sub.add_parser(
        "sweep-diff", help="Bayesian minus Markovian success over an eta grid"
    )
    add_shared(sweep, needs_points=False)

    validate = sub.add_parser("validate", help="run a self-check suite")
    validate.add_argument("suite", help=f"one of {', '.join(VALID_SUITES)}")
    validate.add_argument("--seed", type=int, default=0)

    return parser


def _load_file_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _pick(args, file_cfg: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return file_cfg.get(key, default)


def _parse_grid(text) -> tuple:
    if isinstance(text, (list, tuple)):
        if len(text) != 3:
            raise ConfigError(f"grid must be [min, max, steps], got {text!r}")
        return tuple(text)
    try:
        lo, hi, steps = text.split(":")
        return float(lo), float(hi), int(steps)
    except (ValueError, AttributeError):
        raise ConfigError(f"grid must look like MIN:MAX:STEPS, got {text!r}") from None


def _config_from_args(args, needs_points: bool):
    file_cfg = _load_file_config(args.config)
    family = _pick(args, file_cfg, "family", None)
    if family is None:
        raise ConfigError("a channel family is required (--family or config file)")

    points = None
    grid = None
    n_max = 1
    strategies = _pick(args, file_cfg, "strategies", "global,bayesian,markovian")
    if isinstance(strategies, str):
        strategies = tuple(s.strip() for s in strategies.split(",") if s.strip())
    else:
        strategies = tuple(strategies)

    if needs_points:
        eta0 = getattr(args, "eta0", None)
        eta1 = getattr(args, "eta1", None)
        if eta0 is not None or eta1 is not None:
            if eta0 is None or eta1 is None or len(eta0) != len(eta1):
                raise ConfigError("--eta0 and --eta1 must be given in matching pairs")
            points = list(zip(eta0, eta1))
        else:
            points = file_cfg.get("points")
        if not points:
            raise ConfigError("curve requires at least one (eta0, eta1) point")
        n_max = int(_pick(args, file_cfg, "n_max", 1))
    else:
        grid_raw = _pick(args, file_cfg, "grid", None)
        if grid_raw is None:
            raise ConfigError("sweep-diff requires --grid MIN:MAX:STEPS")
        grid = _parse_grid(grid_raw)

    return make_config(
        family=family,
        points=points,
        grid=grid,
        n_max=n_max,
        strategies=strategies,
        input_mode=_pick(args, file_cfg, "input_mode", "flat"),
        value_tol=float(_pick(args, file_cfg, "value_tol", 1e-9)),
        max_evals=int(_pick(args, file_cfg, "max_evals", 20000)),
        max_starts=int(_pick(args, file_cfg, "max_starts", 64)),
        seed=int(_pick(args, file_cfg, "seed", 0)),
        jobs=int(_pick(args, file_cfg, "jobs", 1)),
    ), file_cfg


def _emit(rows, fields, cfg, args, file_cfg) -> None:
    fmt = _pick(args, file_cfg, "fmt", None) or file_cfg.get("format") or "csv"
    out = _pick(args, file_cfg, "out", None)
    writer = write_records_csv if fmt == "csv" else write_records_json
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            writer(rows, fields, cfg.as_dict(), fh)
    else:
        writer(rows, fields, cfg.as_dict(), sys.stdout)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "curve":
            cfg, file_cfg = _config_from_args(args, needs_points=True)
            rows = run_curve(cfg)
            _emit(rows, CURVE_FIELDS, cfg, args, file_cfg)
            return 0
        if args.cmd == "sweep-diff":
            cfg, file_cfg = _config_from_args(args, needs_points=False)
            rows = run_sweep_diff(cfg)
            _emit(rows, SWEEP_FIELDS, cfg, args, file_cfg)
            return 0
        checks = run_validate(args.suite, args.seed)
        failed = 0
        for check in checks:
            status = "ok  " if check.passed else "FAIL"
            print(
                f"{status} {check.name}: deviation {check.deviation:.3e} "
                f"(bound {check.bound:.3e})"
            )
            failed += 0 if check.passed else 1
        print(f"{len(checks) - failed}/{len(checks)} checks passed")
        return 1 if failed else 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
