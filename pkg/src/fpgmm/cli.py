"""Command-line entry point: bind JSON configs to experiments.

Subcommands: run (one protocol execution), sweep (a parameter grid of
runs), tradeoff (cost-model optimisation over an NCC-bound grid), privacy
(exact distribution comparison). Exit codes are part of the interface:

    0  success / PASS
    1  config or validation error (message names the violated constraint)
    2  protocol run reported failure (e.g. too many stragglers)
    3  privacy check FAILED

Reports go to stdout or --out; when --out is set, the sweep and tradeoff
commands also render a PNG figure next to the delimited output (disable
with --no-figure). Outputs are byte-identical for identical (config, seed);
wall-clock timings are only included when --timings is passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .costmodel import (
    SearchLimits,
    TRADEOFF_CSV_HEADER,
    optimize_tradeoff,
    tradeoff_csv_rows,
)
from .field import FieldModulus
from .instance import DesiredSet, InvalidParameters, SchemeParams
from .privacy import EnumerationBudgetExceeded, privacy_check
from .simulator import (
    StragglerModel,
    reports_to_csv,
    run_from_config,
    sweep,
    write_jsonl,
)

_STRAGGLER_KEYS = {"mode": str, "count": int, "p": (int, float)}
_RUN_ONLY_KEYS = {"straggler": dict, "audit": bool}
_SWEEP_KEYS = {
    "q": int,
    "L_A": int,
    "L_B": int,
    "grid": dict,
    "trials": int,
    "n_extra": int,
    "seed": int,
    "straggler": dict,
    "audit": bool,
    "alpha": int,
}
_GRID_KEYS = {"m": list, "n": list, "r": (list, str), "T": list, "s_size": list, "alpha": list}
_TRADEOFF_KEYS = {
    "s_size": int,
    "T": int,
    "worker_caps": list,
    "ncc_bounds": list,
    "schemes": list,
    "search_limits": dict,
    "seed": int,
}
_LIMIT_KEYS = {"m_max": int, "n_max": int, "p_max": int}
_PRIVACY_KEYS = {
    "q": int,
    "L_A": int,
    "L_B": int,
    "m": int,
    "n": int,
    "r": int,
    "T": int,
    "N": int,
    "s1": list,
    "s2": list,
    "colluders": list,
    "budget": int,
    "zero_noise": bool,
    "seed": int,
}


class ConfigError(ValueError):
    pass


def _check_keys(cfg: dict, schema: dict, required, where: str) -> None:
    unknown = set(cfg) - set(schema)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(required) - set(cfg)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")
    for key, expected in schema.items():
        if key in cfg and not isinstance(cfg[key], expected):
            name = getattr(expected, "__name__", "/".join(t.__name__ for t in expected))
            raise ConfigError(f"{where}.{key} must be {name}")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _parse_straggler(cfg: dict) -> StragglerModel | None:
    if "straggler" not in cfg:
        return None
    sub = cfg["straggler"]
    _check_keys(sub, _STRAGGLER_KEYS, {"mode"}, "straggler")
    return StragglerModel(mode=sub["mode"], count=sub.get("count", 0), p=float(sub.get("p", 0.0)))


def _parse_fraction(value) -> Fraction:
    # Strings keep exact rationals ("1/10"); numbers are read decimally
    # ("0.1" -> 1/10) rather than as binary floats.
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    raise ConfigError(f"cannot parse {value!r} as an exact ratio")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    from .instance import INSTANCE_CONFIG_KEYS

    schema = {**INSTANCE_CONFIG_KEYS, **_RUN_ONLY_KEYS}
    required = set(INSTANCE_CONFIG_KEYS) - {"seed", "grouping_policy"}
    _check_keys(cfg, schema, required, "run config")
    straggler = _parse_straggler(cfg)
    instance_cfg = {k: v for k, v in cfg.items() if k in INSTANCE_CONFIG_KEYS}
    report = run_from_config(
        instance_cfg,
        straggler=straggler,
        audit=cfg.get("audit", True),
        threads=args.threads,
        seed=args.seed,
    )
    _emit(json.dumps(report.to_json_dict(include_timings=args.timings), sort_keys=True) + "\n", args.out)
    return 0 if report.success else 2


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, _SWEEP_KEYS, {"q", "L_A", "L_B", "grid"}, "sweep config")
    _check_keys(cfg["grid"], _GRID_KEYS, {"m", "n", "T", "s_size"}, "sweep grid")
    if "alpha" not in cfg["grid"] and "alpha" not in cfg:
        raise ConfigError("sweep config needs alpha (top level or in grid)")
    if "straggler" in cfg:
        _check_keys(cfg["straggler"], _STRAGGLER_KEYS, {"mode"}, "straggler")
    items = sweep(cfg, threads=args.threads, seed=args.seed)
    csv_text = reports_to_csv(items)
    _emit(csv_text, args.out)
    if args.out is not None:
        base = Path(args.out)
        write_jsonl(items, str(base.with_suffix(".jsonl")), include_timings=args.timings)
        if not args.no_figure:
            from .plotting import save_sweep_figure

            save_sweep_figure(items, str(base.with_suffix(".png")))
    n_errors = sum(1 for it in items if it["error"] is not None)
    if n_errors:
        print(f"note: {n_errors} invalid grid points recorded in the JSONL", file=sys.stderr)
    return 0


def _cmd_tradeoff(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, _TRADEOFF_KEYS, {"s_size", "T", "worker_caps", "ncc_bounds"}, "tradeoff config")
    limits_cfg = cfg.get("search_limits", {})
    _check_keys(limits_cfg, _LIMIT_KEYS, set(), "search_limits")
    limits = SearchLimits(**limits_cfg)
    schemes = cfg.get("schemes", ["fpgmm", "mrfpmm"])
    bounds = [_parse_fraction(b) for b in cfg["ncc_bounds"]]
    points = [
        optimize_tradeoff(scheme, bound, cap, cfg["T"], cfg["s_size"], limits)
        for scheme in schemes
        for cap in cfg["worker_caps"]
        for bound in bounds
    ]
    csv_text = TRADEOFF_CSV_HEADER + "\n" + "\n".join(tradeoff_csv_rows(points)) + "\n"
    _emit(csv_text, args.out)
    if args.out is not None and not args.no_figure:
        from .plotting import save_tradeoff_figure

        save_tradeoff_figure(points, str(Path(args.out).with_suffix(".png")))
    return 0


def _cmd_privacy(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, _PRIVACY_KEYS, {"q", "L_A", "L_B", "m", "n", "r", "T", "N", "s1", "s2", "colluders"}, "privacy config")
    try:
        modulus = FieldModulus(cfg["q"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    params = SchemeParams(
        alpha=cfg["m"] * cfg["n"],  # any multiple of both; queries ignore it
        l_a=cfg["L_A"],
        l_b=cfg["L_B"],
        m=cfg["m"],
        n=cfg["n"],
        r=cfg["r"],
        t=cfg["T"],
        n_workers=cfg["N"],
        modulus=modulus,
    )
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    kwargs = {}
    if "budget" in cfg:
        kwargs["budget"] = cfg["budget"]
    verdict = privacy_check(
        params,
        DesiredSet.of([tuple(p) for p in cfg["s1"]]),
        DesiredSet.of([tuple(p) for p in cfg["s2"]]),
        cfg["colluders"],
        seed=seed,
        zero_noise=cfg.get("zero_noise", False),
        **kwargs,
    )
    _emit(json.dumps(verdict.to_json_dict(), sort_keys=True) + "\n", args.out)
    return 0 if verdict.passed else 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the JSON experiment config")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker-evaluation parallelism")
    common.add_argument("--no-figure", action="store_true", help="skip PNG rendering next to --out")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in reports")

    parser = argparse.ArgumentParser(
        prog="fpgmm",
        description="Coded matrix-multiplication workbench: private grouped product retrieval.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="execute one protocol run").set_defaults(func=_cmd_run)
    sub.add_parser("sweep", parents=[common], help="run a parameter grid").set_defaults(func=_cmd_sweep)
    sub.add_parser("tradeoff", parents=[common], help="minimize NDC under NCC bounds").set_defaults(func=_cmd_tradeoff)
    sub.add_parser("privacy", parents=[common], help="compare query distributions of two requests").set_defaults(func=_cmd_privacy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameters, EnumerationBudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
