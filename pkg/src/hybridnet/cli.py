"""Command-line front end: planning reports, experiment CSVs and traces.

Commands: ``plan``, ``zones``, ``experiment``, ``trace``, ``indoor-sim``.
Common flags (``--config``, ``--seed``, ``--out``, ``--samples``) fall back
to ``HYBRIDNET_CONFIG``, ``HYBRIDNET_SEED``, ``HYBRIDNET_OUT`` and
``HYBRIDNET_SAMPLES``. Exit codes: 0 success, 2 validation failure,
3 runtime failure.

All CSV output uses '.' decimals, repr-exact floats and newline-terminated
rows, so a command rerun with the same configuration and seed is
byte-identical. Each experiment writes a JSON run manifest next to its
CSV recording the command, config digest, seed and tool version.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import CSV_SCHEMA_VERSION, __version__, config as cfgmod, engine, protocol, transport, zoning
from .protocol import FaultPlan, FixedLatency, HandoverKind

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3

EXPERIMENTS = ("fig16", "fig17", "fig18", "fig19", "fig20", "fig21")

TRACE_KINDS = {
    "lifi-to-femto": HandoverKind.LIFI_TO_FEMTO,
    "femto-to-lifi": HandoverKind.FEMTO_TO_LIFI,
    "lifi-to-lifi": HandoverKind.LIFI_TO_LIFI,
}


def _csv_text(header: tuple[str, ...], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else repr(v) for v in row])
    return buf.getvalue()


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    tool_version: str = __version__
    csv_schema_version: int = CSV_SCHEMA_VERSION
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        payload = {
            "command": self.command,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "csv_schema_version": self.csv_schema_version,
            "outputs": self.outputs,
            "duration_s": self.duration_s,
            **self.extra,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_room(text: str) -> tuple[float, float]:
    try:
        a, b = text.lower().split("x")
        return float(a), float(b)
    except Exception as exc:
        raise ValueError(f"room must look like 24x24, got {text!r}") from exc


def _env_default(name: str, fallback=None):
    return os.environ.get(f"HYBRIDNET_{name}", fallback)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridnet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hybridnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples_default=None):
        p.add_argument("--config", default=_env_default("CONFIG"), help="YAML scenario file")
        p.add_argument("--seed", type=int, default=int(_env_default("SEED", 0)))
        p.add_argument("--out", default=_env_default("OUT"), help="output directory or file")
        if samples_default is not None:
            p.add_argument("--samples", type=int, default=int(_env_default("SAMPLES", samples_default)))

    p_plan = sub.add_parser("plan", help="grid plan and zone-area report")
    p_plan.add_argument("--room", default="24x24")
    p_plan.add_argument("--radius", type=float, default=5.0)
    common(p_plan, samples_default=1 << 20)

    p_zones = sub.add_parser("zones", help="zone model as CSV")
    p_zones.add_argument("--room", default="24x24")
    p_zones.add_argument("--radius", type=float, default=5.0)
    common(p_zones, samples_default=1 << 20)

    p_exp = sub.add_parser("experiment", help="figure-reproduction run")
    p_exp.add_argument("name", choices=EXPERIMENTS)
    common(p_exp)

    p_trace = sub.add_parser("trace", help="execute one handover call flow")
    p_trace.add_argument("kind", choices=sorted(TRACE_KINDS))
    p_trace.add_argument("--per-hop-ms", type=float, default=5.0)
    p_trace.add_argument("--drop-step", type=int, default=None)
    common(p_trace)

    p_sim = sub.add_parser("indoor-sim", help="full indoor scenario run")
    common(p_sim)
    return parser


def cmd_plan(args) -> int:
    a, b = _parse_room(args.room)
    plan = zoning.plan_grid(a, b, args.radius)
    model = zoning.monte_carlo_zone_model(plan, args.samples, seed=args.seed)
    print(f"room: {a} m x {b} m, coverage radius {args.radius} m")
    print(f"ap_count: {plan.ap_count} (n_x={plan.n_x}, n_y={plan.n_y}), "
          f"minimum plan: {zoning.min_ap_count(a, b, args.radius)}")
    print(f"spacing: d_x={plan.d_x_m!r} d_y={plan.d_y_m!r}")
    print(f"overlap: l_x={plan.l_x_m!r} l_y={plan.l_y_m!r}")
    print("ap_centers: " + "; ".join(f"({x!r}, {y!r})" for x, y in plan.ap_centers))
    print(f"fap_center: ({plan.fap_center[0]!r}, {plan.fap_center[1]!r})")
    print(f"zone areas (m^2), analytic vs monte carlo ({args.samples} samples, seed {args.seed}):")
    for name, analytic, mc, prob in model.csv_rows():
        print(f"  {name}: analytic={analytic!r} mc={mc!r} prob={prob!r}")
    residual = sum(model.analytic_areas_m2) - (a * b + model.analytic_areas_m2[3])
    print(f"analytic residual (sum - ab - A_Z4): {residual!r}")
    return EXIT_OK


def cmd_zones(args) -> int:
    a, b = _parse_room(args.room)
    plan = zoning.plan_grid(a, b, args.radius)
    model = zoning.monte_carlo_zone_model(plan, args.samples, seed=args.seed)
    text = _csv_text(("zone", "analytic_area_m2", "mc_area_m2", "probability"), model.csv_rows())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _experiment_rows(name: str, config: dict, seed: int):
    if name == "fig16":
        cfg, counts = cfgmod.idle_experiment_config(config, seed)
        rows, _model = engine.idle_probability_experiment(cfg, counts)
        return ("active_users", "empirical_idle_prob", "eq_idle_prob"), rows
    if name == "fig17":
        results = engine.femto_sinr_experiment(cfgmod.femto_sinr_config(config, seed), cfgmod.rf_params(config))
        rows = [(r.scheme, r.frf, r.mean_db, r.p5_db, r.p50_db, r.p95_db) for r in results]
        return ("scheme", "frf", "mean_sinr_db", "p5_sinr_db", "p50_sinr_db", "p95_sinr_db"), rows
    if name == "fig18":
        cfg, spacings = cfgmod.handover_success_inputs(config, seed)
        return ("ap_distance_m", "lifi_only_success", "hybrid_success"), engine.handover_success_experiment(cfg, spacings)
    if name == "fig19":
        rows = transport.capacity_sweep(
            cfgmod.macro_distances_km(config, "fig19"), cfgmod.vehicle_link(config),
            cfgmod.optical_params(config), cfgmod.rf_params(config),
        )
        return ("mbs_distance_km", "direct_bps", "relayed_bps"), rows
    if name == "fig20":
        rows = transport.outage_sweep(
            cfgmod.macro_distances_km(config, "fig20"), cfgmod.vehicle_link(config), cfgmod.rf_params(config)
        )
        return ("mbs_distance_km", "p_out_direct", "p_out_relayed"), rows
    if name == "fig21":
        rows = transport.reliability_sweep(cfgmod.car_distances_m(config), cfgmod.car_scenario(config))
        return ("inter_vehicle_distance_m", "rf_only", "owc_only", "hybrid"), rows
    raise ValueError(f"unknown experiment {name!r}")


def cmd_experiment(args) -> int:
    started = time.monotonic()
    config = cfgmod.load_config(args.config)
    header, rows = _experiment_rows(args.name, config, args.seed)
    text = _csv_text(header, rows)
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{args.name}.csv"
    csv_path.write_text(text)
    manifest = RunManifest(
        command=f"experiment {args.name}",
        config_digest=cfgmod.config_digest(config),
        seed=args.seed,
        outputs=[csv_path.name],
        duration_s=time.monotonic() - started,
    )
    manifest.write(out_dir / f"{args.name}.manifest.json")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_trace(args) -> int:
    started = time.monotonic()
    kind = TRACE_KINDS[args.kind]
    if args.per_hop_ms < 0:
        raise ValueError("per-hop latency must be >= 0")
    fault_plan = FaultPlan(drop_counts={args.drop_step: 1}) if args.drop_step is not None else FaultPlan()
    trace = protocol.run_handover(kind, latency_model=FixedLatency(args.per_hop_ms / 1000.0), fault_plan=fault_plan)
    text = protocol.trace_to_csv(trace)
    outcome = {"outcome": trace.outcome, "failed_step": trace.failed_step, "latency_s": trace.latency_s}
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"trace_{kind.value}.csv"
        csv_path.write_text(text)
        manifest = RunManifest(
            command=f"trace {args.kind}",
            config_digest=cfgmod.config_digest(cfgmod.load_config(args.config)),
            seed=args.seed,
            outputs=[csv_path.name],
            duration_s=time.monotonic() - started,
            extra=outcome,
        )
        manifest.write(out_dir / f"trace_{kind.value}.manifest.json")
        print(f"wrote {csv_path} ({trace.outcome})")
    else:
        sys.stdout.write(text)
        print(f"# outcome: {json.dumps(outcome, sort_keys=True)}")
    return EXIT_OK


def cmd_indoor_sim(args) -> int:
    started = time.monotonic()
    config = cfgmod.load_config(args.config)
    scenario = cfgmod.scenario_config(config, args.seed)
    metrics = engine.simulate_indoor(scenario)
    text = _csv_text(("metric", "value"), metrics.csv_rows())
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / "indoor_sim.csv"
        csv_path.write_text(text)
        manifest = RunManifest(
            command="indoor-sim",
            config_digest=cfgmod.config_digest(config),
            seed=args.seed,
            outputs=[csv_path.name],
            duration_s=time.monotonic() - started,
        )
        manifest.write(out_dir / "indoor_sim.manifest.json")
        print(f"wrote {csv_path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "zones": cmd_zones,
    "experiment": cmd_experiment,
    "trace": cmd_trace,
    "indoor-sim": cmd_indoor_sim,
}


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit:
        raise
    except (ValueError, TypeError) as exc:  # e.g. a malformed env override
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
