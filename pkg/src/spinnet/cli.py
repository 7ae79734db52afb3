"""Command-line front end.

Every subcommand reads a JSON payload, runs one module operation per output row and
writes CSV (fixed columns) or JSON (rows plus config echo, seed, build tag and
per-row details).  Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, interface
from .analyzers import bench_bsa, bsa_error_prob, bsa_success_prob, qnd_error_probability
from .cluster import emit_1d_cluster, emit_ghz, stabilizer_report
from .qsim import CapacityError
from .repeater import (
    MaxAttemptsExceeded,
    qber_from_fidelity,
    qkd_key_fraction,
    simulate_one_way,
    simulate_two_way,
)
from .schema import (
    SWEEPABLE,
    BsaBenchPayload,
    ClusterGenPayload,
    ConfigError,
    InterfaceReportPayload,
    OneWayPayload,
    RunConfig,
    TwoWayPayload,
    dump_config,
    expand,
    validate_config,
)

COLUMNS = {
    "interface-report": ["geometry", "beta", "beta_coh", "cooperativity", "cooperativity_coh", "decay_fraction", "qnd_error"],
    "bsa-bench": ["kind", "success_prob", "error_prob", "success_freq", "error_freq", "trials"],
    "cluster-gen": ["kind", "n_photons", "generator", "expected", "measured", "herald_probability"],
    "repeater-2way": ["rate_hz", "fidelity", "mean_wait_s", "trials", "qber", "key_fraction"],
    "repeater-1way": ["rate_hz", "fidelity", "mean_wait_s", "trials", "qber", "key_fraction"],
}


def build_tag() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        out = None
    if out is not None and out.returncode == 0 and out.stdout.strip():
        return f"spinnet-{__version__}+{out.stdout.strip()}"
    return f"spinnet-{__version__}"


def _safe(fn, *args) -> float:
    try:
        return fn(*args)
    except (ValueError, ZeroDivisionError):
        return math.nan


# -- per-command row producers ------------------------------------------------

def _interface_rows(p: InterfaceReportPayload, cfg: RunConfig, rng) -> tuple[list[dict], list[dict]]:
    e = p.emitter.build()
    c = _safe(interface.effective_cooperativity, e)
    row = {
        "geometry": e.geometry.value,
        "beta": _safe(interface.efficiency, e),
        "beta_coh": _safe(interface.efficiency, e, True),
        "cooperativity": c,
        "cooperativity_coh": _safe(interface.effective_cooperativity, e, True),
        "decay_fraction": _safe(interface.cavity_decay_fraction, c),
        "qnd_error": _safe(qnd_error_probability, e),
    }
    return [row], [{}]


def _bsa_rows(p: BsaBenchPayload, cfg: RunConfig, rng) -> tuple[list[dict], list[dict]]:
    m = p.bsa.build(p.emitter.build() if p.emitter else None)
    bench = bench_bsa(m, cfg.trials, rng, p.bell_state)
    row = {
        "kind": m.kind.value,
        "success_prob": bsa_success_prob(m),
        "error_prob": bsa_error_prob(m),
        "success_freq": bench.success_frequency,
        "error_freq": bench.error_frequency,
        "trials": bench.trials,
    }
    return [row], [{"successes": bench.successes, "misidentified": bench.misidentified}]


def _cluster_rows(p: ClusterGenPayload, cfg: RunConfig, rng) -> tuple[list[dict], list[dict]]:
    ec = p.build()
    hs = emit_1d_cluster(ec) if ec.intermediate_rotation else emit_ghz(ec)
    rows = [
        {
            "kind": p.kind,
            "n_photons": p.n_photons,
            "generator": g,
            "expected": expected,
            "measured": measured,
            "herald_probability": hs.herald_probability,
        }
        for g, expected, measured in stabilizer_report(hs)
    ]
    return rows, [{} for _ in rows]


def _repeater_row(result) -> dict:
    qber = qber_from_fidelity(result.fidelity)
    return {
        "rate_hz": result.rate_hz,
        "fidelity": result.fidelity,
        "mean_wait_s": result.mean_wait_s,
        "trials": result.trials,
        "qber": qber,
        "key_fraction": qkd_key_fraction(qber),
    }


def _two_way_rows(p: TwoWayPayload, cfg: RunConfig, rng) -> tuple[list[dict], list[dict]]:
    result = simulate_two_way(p.build(), rng, trials=cfg.trials)
    return [_repeater_row(result)], [result.herald_statistics]


def _one_way_rows(p: OneWayPayload, cfg: RunConfig, rng) -> tuple[list[dict], list[dict]]:
    result = simulate_one_way(p.build(), p.code.build())
    return [_repeater_row(result)], [result.herald_statistics]


PRODUCERS = {
    "interface-report": _interface_rows,
    "bsa-bench": _bsa_rows,
    "cluster-gen": _cluster_rows,
    "repeater-2way": _two_way_rows,
    "repeater-1way": _one_way_rows,
}


# -- running and formatting ---------------------------------------------------

def execute(cfg: RunConfig) -> tuple[list[str], list[dict], list[dict]]:
    """Columns, rows and per-row details for a validated configuration.

    Every row gets its own generator seeded from ``(seed, row index)``.
    """
    target = cfg.target
    columns = list(COLUMNS[target])
    if cfg.sweep is not None:
        columns = ["sweep_axis", "sweep_value"] + columns
    rows, details = [], []
    for i, (value, payload) in enumerate(expand(cfg)):
        rng = np.random.default_rng([cfg.seed, i])
        r, d = PRODUCERS[target](payload, cfg, rng)
        if cfg.sweep is not None:
            r = [{"sweep_axis": cfg.sweep.axis, "sweep_value": value, **x} for x in r]
        rows += r
        details += d
    return columns, rows, details


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _csv_value(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: RunConfig, columns: list[str], rows: list[dict], details: list[dict]) -> str:
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_csv_value(r[c]) for c in columns])
        return buf.getvalue()
    doc = {
        "build": build_tag(),
        "seed": cfg.seed,
        "config": dump_config(cfg),
        "columns": columns,
        "rows": [_json_value({c: r[c] for c in columns}) for r in rows],
        "details": _json_value(details),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run(cfg: RunConfig) -> str:
    return render(cfg, *execute(cfg))


# -- argument parsing ---------------------------------------------------------

def _load_json(path: str) -> Any:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"<root>: invalid JSON in {path} ({err.msg} at line {err.lineno})"]) from None


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="root seed (default 0, or the config value)")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinnet", description="Spin-photon network building blocks and repeater evaluation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("run", help="run a full configuration file")
    p.add_argument("config", help="JSON run configuration ('-' for stdin)")
    _common(p)

    p = sub.add_parser("validate", help="check a configuration and print it normalized")
    p.add_argument("config", help="JSON run configuration ('-' for stdin)")

    for name in SWEEPABLE:
        p = sub.add_parser(name, help=f"{name} from a JSON payload file")
        p.add_argument("payload", help="JSON payload ('-' for stdin)")
        _common(p)

    p = sub.add_parser("sweep", help="one row per value of a payload parameter")
    p.add_argument("target", choices=SWEEPABLE)
    p.add_argument("payload", help="JSON payload ('-' for stdin)")
    p.add_argument("--axis", required=True, help="dotted parameter path, e.g. emitter.beta")
    p.add_argument("--values", required=True, nargs="+", type=_parse_value, help="values (JSON literals)")
    _common(p)
    return parser


def _raw_config(args: argparse.Namespace) -> dict:
    if args.subcommand in ("run", "validate"):
        raw = _load_json(args.config)
        if not isinstance(raw, dict):
            raise ConfigError(["<root>: configuration must be a JSON object"])
    elif args.subcommand == "sweep":
        raw = {
            "command": "sweep",
            "payload": _load_json(args.payload),
            "sweep": {"target": args.target, "axis": args.axis, "values": args.values},
        }
    else:
        raw = {"command": args.subcommand, "payload": _load_json(args.payload)}
    for key, attr in (("seed", "seed"), ("trials", "trials"), ("output_path", "output"), ("output_format", "format")):
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    return raw


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = validate_config(_raw_config(args))
    except ConfigError as err:
        for line in err.diagnostics:
            print(f"error: {line}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: cannot read configuration: {err}", file=sys.stderr)
        return 1

    if args.subcommand == "validate":
        print(json.dumps(dump_config(cfg), indent=2, sort_keys=True))
        return 0

    try:
        text = run(cfg)
    except (MaxAttemptsExceeded, CapacityError, ValueError, ZeroDivisionError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    try:
        if cfg.output_path:
            Path(cfg.output_path).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as err:
        print(f"error: cannot write output: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
