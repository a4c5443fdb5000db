"""Command-line entry point: ``continuum-aif run | validate-model | inspect-traces``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .agents import AGENT_NAMES, build_agent, dump_spec, validate_spec
from .env import EnvError, IngestionError, read_traces, trace_coverage
from .harness import (
    SCENARIOS,
    ConfigError,
    ExperimentConfig,
    aggregate,
    artifact_stem,
    run_experiment,
    timing_study,
    write_artifacts,
)
from .inference import ModelError

log = logging.getLogger("continuum_aif")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_INGEST = 0, 1, 2, 3

# CLI flag -> ExperimentConfig field
_FLAG_FIELDS = {
    "scenario": "scenario",
    "pl": "policy_length",
    "steps": "steps",
    "reps": "repetitions",
    "seed": "seed",
    "backend": "backend",
    "noise": "noise",
    "trace": "trace_path",
    "profiles": "profile_path",
}


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """File values, then CLI flags, then ``--set`` overrides; seed falls back to the environment."""
    values: dict[str, object] = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: expected a flat JSON object")
        values.update(doc)
    if "seed" not in values and args.seed is None and os.environ.get("CONTINUUM_AIF_SEED"):
        values["seed"] = os.environ["CONTINUUM_AIF_SEED"]
    for flag, key in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    values.update(_parse_overrides(args.set or []))
    if values.get("trace_path") and "backend" not in values:
        values["backend"] = "trace"
    config = ExperimentConfig.from_mapping(values)
    for key in ("trace_path", "profile_path"):
        p = getattr(config, key)
        if p and not Path(p).is_file():
            raise IngestionError(f"{key} {p} does not exist")
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args)
    out = Path(args.out)
    if config.scenario == "cost_study":
        report = timing_study(config, short_pl=1, long_pl=max(config.policy_length, 2))
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{artifact_stem(config)}_timing.json"
        doc = {"config": asdict(config), "per_step_ms": report.per_step_ms, "ratios": report.ratios}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        for k, v in report.per_step_ms.items():
            print(f"{k}: {v:.3f} ms/step")
        for k, v in report.ratios.items():
            print(f"{k}: {v:.2f}x")
        return EXIT_OK

    results = run_experiment(config, jobs=args.jobs)
    metrics = aggregate(results)
    paths = write_artifacts(out, config, results, metrics)
    rates = metrics.final_rates()
    for agent in AGENT_NAMES:
        parts = [f"{sloid}={rate:.3f}" for (a, sloid), rate in rates.items() if a == agent]
        print(f"{agent}: " + " ".join(parts))
    log.info("artifacts: %s", ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


def cmd_validate_model(args: argparse.Namespace) -> int:
    if args.agent not in AGENT_NAMES:
        print(f"error: unknown agent {args.agent!r}; expected one of {list(AGENT_NAMES)}", file=sys.stderr)
        return EXIT_CONFIG
    spec = build_agent(args.agent)
    report = validate_spec(spec)
    for check, problems in report.items():
        print(f"{check}: {'pass' if not problems else 'FAIL'}")
        for p in problems:
            print(f"  {p}")
    if args.dump:
        Path(args.dump).write_text(dump_spec(spec), encoding="utf-8")
    return EXIT_OK if not any(report.values()) else EXIT_RUNTIME


def cmd_inspect_traces(args: argparse.Namespace) -> int:
    records = read_traces(args.path)
    coverage = trace_coverage(records)
    total_filled = 0
    for c in coverage:
        print(f"{c.device}: {c.records} records, {c.measured}/{c.grid_size} cells measured")
        for res, fps, gpu in c.filled:
            print(f"  fillable: {res} {fps}fps gpu={int(gpu)}")
        for res, fps, gpu in c.unfillable:
            print(f"  unfillable: {res} {fps}fps gpu={int(gpu)}")
        total_filled += len(c.filled)
    print(f"{total_filled} cells interpolated")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="continuum-aif", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write CSV/JSON artifacts")
    run.add_argument("--config", help="JSON file with flat ExperimentConfig keys")
    run.add_argument("--scenario", choices=SCENARIOS)
    run.add_argument("--pl", type=int, help="policy length")
    run.add_argument("--steps", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--backend", choices=("synthetic", "trace"))
    run.add_argument("--noise", type=float)
    run.add_argument("--trace", help="trace CSV (implies --backend trace)")
    run.add_argument("--profiles", help="device profile JSON overrides")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", default="results")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate-model", help="build an agent model and run its validators")
    val.add_argument("agent")
    val.add_argument("--dump", help="write the model as JSON to this path")
    val.set_defaults(func=cmd_validate_model)

    ins = sub.add_parser("inspect-traces", help="report grid coverage of a trace CSV")
    ins.add_argument("path")
    ins.set_defaults(func=cmd_inspect_traces)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestionError as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except (EnvError, ModelError, RuntimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
