"""Command line: run / sweep / verify / trace.

Exit codes: 0 on success, 1 when an invariant or bound check fails, 2 on a
configuration error.  Flag names mirror config-file keys exactly; flags
override file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

import numpy as np

from .adversaries import make_adversary
from .engine import TreeCal, dump_trace
from .errors import ConfigError, TreecalError
from .harness import (
    RunConfig,
    build_domain,
    config_from_mapping,
    effective_horizon,
    parse_config_text,
    parse_sweep_axes,
    rows_to_csv,
    rows_to_json,
    run_experiment,
    run_sweep,
    write_rows,
)
from .verification import run_verification


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="path to a key = value config file")
    for f in fields(RunConfig):
        parser.add_argument(f"--{f.name}", default=None, help=f"override config key {f.name}")


def _resolve_config(args) -> tuple[RunConfig, dict[str, str]]:
    mapping: dict[str, str] = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fp:
            mapping = parse_config_text(fp.read())
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name) is not None
    }
    merged = dict(mapping)
    merged.update({k: str(v) for k, v in overrides.items()})
    return config_from_mapping(merged), merged


def _emit(rows, cfg) -> None:
    out = cfg.out
    if out:
        write_rows(rows, out, cfg.format)
        print(f"wrote {len(rows)} rows to {out}")
    else:
        text = rows_to_csv(rows) if cfg.format == "csv" else rows_to_json(rows)
        sys.stdout.write(text)


def _exit_code_for(rows) -> int:
    return 1 if any(r.gates_exit_code for r in rows) else 0


def cmd_run(args) -> int:
    cfg, _ = _resolve_config(args)
    rows = run_experiment(cfg)
    _emit(rows, cfg)
    failed = [r for r in rows if r.gates_exit_code]
    for r in failed:
        print(
            f"BOUND FAIL {r.metric} [{r.norm}]: value={r.value!r} bound={r.bound!r}",
            file=sys.stderr,
        )
    return _exit_code_for(rows)


def cmd_sweep(args) -> int:
    cfg, mapping = _resolve_config(args)
    for key in ("sweep_H", "sweep_L", "sweep_T", "sweep_d", "seeds"):
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value
    axes = parse_sweep_axes(mapping)
    rows = run_sweep(cfg, axes)
    _emit(rows, cfg)
    return _exit_code_for(rows)


def cmd_verify(args) -> int:
    summary = run_verification(args.suite, args.seed)
    for line in summary.lines():
        print(line)
    return 0 if summary.ok else 1


def cmd_trace(args) -> int:
    cfg, _ = _resolve_config(args)
    domain = build_domain(cfg)
    T = effective_horizon(cfg)
    root = np.random.SeedSequence(cfg.seed)
    adversary_seq, _ = root.spawn(2)
    params = {"alpha": cfg.alpha}
    if cfg.period > 0:
        params["period"] = cfg.period
    adversary = make_adversary(
        cfg.adversary, domain, T, np.random.default_rng(adversary_seq), **params
    )
    engine = TreeCal(domain, T, cfg.H, cfg.L, record_events=True)
    transcript = engine.run(adversary)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fp:
            dump_trace(fp, transcript, engine.events)
        print(f"wrote trace ({transcript.T} rounds, {len(engine.events)} events) to {cfg.out}")
    else:
        dump_trace(sys.stdout, transcript, engine.events)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecal",
        description="online calibration experiments: tree forecasters, swap-regret metrics, bound checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single configured experiment")
    _add_config_flags(p_run)
    p_run.set_defaults(handler=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a cartesian parameter sweep")
    _add_config_flags(p_sweep)
    for key in ("sweep_H", "sweep_L", "sweep_T", "sweep_d", "seeds"):
        p_sweep.add_argument(f"--{key}", default=None, help=f"comma list for axis {key}")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the invariant verification suites")
    p_verify.add_argument("--suite", choices=("fast", "full"), default="fast")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(handler=cmd_verify)

    p_trace = sub.add_parser("trace", help="dump a JSON-lines transcript with node events")
    _add_config_flags(p_trace)
    p_trace.set_defaults(handler=cmd_trace)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TreecalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
