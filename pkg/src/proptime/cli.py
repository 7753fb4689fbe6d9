"""Command-line front end: ``proptime {validate,run,sweep,compare} CONFIG``.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .clock import ClockSpec, pair_evolve
from .config import ScenarioConfig, SegmentSpec, parse, validate
from .errors import ConfigError, ProptimeError
from .estimator import HALF_PI, compare_schemes, entangled_record
from .qstate import SINGLET, SeededRng
from .vonneumann import MeasurementConfig, entangled_measurement
from .worldline import (
    Inertial,
    PrescribedRate,
    ProperAcceleration,
    StaticPotential,
    Worldline,
    acceleration_effect,
    acceleration_to,
    build_gravity_lift_scenario,
    build_gw_disk_scenario,
    build_twin_scenario,
    proper_time,
    proper_time_difference,
)

log = logging.getLogger("proptime")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

COLUMNS = (
    "scheme", "scenario", "E", "delta_t_true", "delta_dt_pulse", "n_samples", "seed",
    "count_singlet", "count_triplet", "count_0bar", "count_1bar",
    "phase_estimate", "phase_std", "delta_t_estimate", "visibility", "flags",
    "sweep_axis", "sweep_value", "repetitions", "rmse", "acceleration_residual",
)


# -- scenario assembly ------------------------------------------------------

def _segment(spec: SegmentSpec):
    if spec.kind == "inertial":
        return Inertial(spec.value, spec.duration)
    if spec.kind == "proper_acceleration":
        return ProperAcceleration(spec.value, spec.duration)
    if spec.kind == "static_potential":
        return StaticPotential(spec.value, spec.duration)
    amp, om, ph = spec.value, spec.omega, spec.phase
    return PrescribedRate(lambda t: amp * math.sin(om * t + ph), spec.duration)


def build_worldlines(cfg: ScenarioConfig) -> tuple[Worldline, Worldline]:
    p = cfg.params
    if cfg.scenario == "twin":
        profile = None
        if p.acceleration is not None and p.velocity != 0:
            profile = acceleration_to(p.velocity, p.acceleration)
        return build_twin_scenario(p.velocity, p.leg_duration, profile, matched=p.matched)
    if cfg.scenario == "gravity_lift":
        dev, dur = p.transport_deviation, p.transport_duration
        transport = PrescribedRate(lambda t: dev * math.sin(math.pi * t / dur) ** 2, dur)
        return build_gravity_lift_scenario(p.g, p.height, p.wait, transport)
    if cfg.scenario == "gw_disk":
        return build_gw_disk_scenario(p.amplitude, p.omega, p.duration, p.phase_offset)
    return (Worldline(tuple(_segment(s) for s in p.A), "A"),
            Worldline(tuple(_segment(s) for s in p.B), "B"))


def _perturbed_kind(cfg: ScenarioConfig) -> type:
    return PrescribedRate if cfg.scenario == "gravity_lift" else ProperAcceleration


def build_clocks(cfg: ScenarioConfig, worldlines) -> tuple[ClockSpec, ClockSpec]:
    """Clocks as they run along the worldlines, gap shifted inside perturbed segments."""
    gap, eps = cfg.clock.gap, cfg.clock.epsilon
    clocks = []
    for w, label in zip(worldlines, ("A", "B")):
        c = ClockSpec.constant(gap, label)
        if eps != 0.0 and label in cfg.clock.perturb:
            c = c.perturbed(w.windows(_perturbed_kind(cfg)), eps)
        clocks.append(c)
    return clocks[0], clocks[1]


def preview(cfg: ScenarioConfig) -> dict:
    wa, wb = build_worldlines(cfg)
    dt = proper_time_difference(wa, wb)
    return {
        "tau_A": proper_time(wa),
        "tau_B": proper_time(wb),
        "delta_t_true": dt,
        "e_delta_t": cfg.clock.gap * dt,
        "period": math.pi / cfg.clock.gap,
    }


def preflight(cfg: ScenarioConfig) -> dict:
    """Worldline-level guards and the proper-time preview, before any simulation."""
    try:
        info = preview(cfg)
    except ProptimeError as exc:
        raise ConfigError(f"scenario {cfg.scenario}: {exc}") from exc
    # the readout depends on sin^2(E dt) only, so the sign of dt is not observable
    if not abs(info["e_delta_t"]) <= HALF_PI:
        raise ConfigError(
            f"clock.gap: |E*delta_t| = {abs(info['e_delta_t']):.6g} lies outside the principal "
            f"branch [0, pi/2]; choose a gap with E*delta_t inside it"
        )
    return info


# -- pipeline ---------------------------------------------------------------

def _empty_row(cfg: ScenarioConfig) -> dict:
    return {c: "" for c in COLUMNS} | {"scenario": cfg.scenario, "E": cfg.clock.gap,
                                       "seed": cfg.seed}


def run_point(cfg: ScenarioConfig, rng: SeededRng) -> dict:
    """Worldlines, pair evolution, entangled readout, trials and estimate for one config."""
    worldlines = build_worldlines(cfg)
    wa, wb = worldlines
    tau_a, tau_b = proper_time(wa), proper_time(wb)
    clock_a, clock_b = build_clocks(cfg, worldlines)
    pair = pair_evolve(SINGLET, clock_a, tau_a, clock_b, tau_b)

    rest = ClockSpec.constant(cfg.clock.gap)
    m = cfg.measurement
    mcfg = MeasurementConfig.entangled(
        m.pulse_halfwidth_periods * rest.period, pulse_area=m.pulse_area,
        truncation=m.truncation, tol=m.tol,
    )
    outcome = entangled_measurement(pair, rest, rest, mcfg)
    rec = entangled_record(outcome, int(cfg.trials.n_samples), rng, rest)
    log.debug("point %s: tau_A=%r tau_B=%r counts=%s", cfg.scenario, tau_a, tau_b, rec.counts)

    delta_t = proper_time_difference(wa, wb)
    flags = list(rec.flags)
    if delta_t < 0:
        flags.append("negative_delta_t")
        worldlines = (wb, wa)
    row = _empty_row(cfg)
    row.update(
        scheme="entangled",
        delta_t_true=delta_t,
        delta_dt_pulse=mcfg.pulse_halfwidth,
        n_samples=rec.n_samples,
        count_singlet=rec.counts[0],
        count_triplet=rec.counts[1],
        phase_estimate=rec.phase_estimate,
        phase_std=rec.phase_std,
        delta_t_estimate=rec.delta_t_estimate,
        flags=";".join(flags),
        acceleration_residual=acceleration_effect(rec.phase_estimate, worldlines, rest),
    )
    return row


def _with_axis(cfg: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis == "pulse_halfwidth_periods":
        return dataclasses.replace(
            cfg, measurement=dataclasses.replace(cfg.measurement, pulse_halfwidth_periods=value))
    if axis == "n_samples":
        return dataclasses.replace(cfg, trials=dataclasses.replace(cfg.trials, n_samples=int(value)))
    return dataclasses.replace(cfg, params=dataclasses.replace(cfg.params, velocity=value))


def cmd_run(cfg: ScenarioConfig, threads: int) -> list[dict]:
    preflight(cfg)
    return [run_point(cfg, SeededRng(cfg.seed, 0))]


def cmd_sweep(cfg: ScenarioConfig, threads: int) -> list[dict]:
    axis = cfg.sweep.axis
    if axis is None:
        raise ConfigError("sweep: the config has no sweep.axis")
    points = [_with_axis(cfg, axis, v) for v in cfg.sweep.values]
    for p in points:
        preflight(p)
    base = SeededRng(cfg.seed, 0)

    def one(i):
        row = run_point(points[i], base.split(i))
        row.update(sweep_axis=axis, sweep_value=cfg.sweep.values[i])
        return row

    workers = threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(len(points))))


DEFAULT_COMPARE_GRID = [0.01, 0.1, 1.0, 10.0, 100.0]


def cmd_compare(cfg: ScenarioConfig, threads: int) -> list[dict]:
    info = preflight(cfg)
    grid_periods = (cfg.sweep.values if cfg.sweep.axis == "pulse_halfwidth_periods"
                    else DEFAULT_COMPARE_GRID)
    clock = ClockSpec.constant(cfg.clock.gap)
    n = int(cfg.trials.n_samples)
    grid = [g * clock.period for g in grid_periods]
    rows = []
    for cmp in compare_schemes(abs(info["e_delta_t"]), clock, grid, n, SeededRng(cfg.seed, 0),
                               repetitions=int(cfg.trials.repetitions)):
        recs = cmp.records
        row = _empty_row(cfg)
        labels = ("count_singlet", "count_triplet") if cmp.scheme == "entangled" \
            else ("count_0bar", "count_1bar")
        ests = [r.phase_estimate for r in recs if not math.isnan(r.phase_estimate)]
        mean = math.fsum(ests) / len(ests) if ests else math.nan
        std = (math.sqrt(math.fsum((x - mean) ** 2 for x in ests) / (len(ests) - 1))
               if len(ests) > 1 else math.nan)
        row.update(
            scheme=cmp.scheme,
            delta_t_true=info["delta_t_true"],
            delta_dt_pulse=cmp.pulse_halfwidth,
            n_samples=n,
            **{labels[0]: sum(r.counts[0] for r in recs), labels[1]: sum(r.counts[1] for r in recs)},
            phase_estimate=mean,
            phase_std=std,
            delta_t_estimate=mean / cfg.clock.gap,
            visibility=cmp.visibility,
            flags="no_information" if cmp.no_information else "",
            sweep_axis="pulse_halfwidth_periods",
            sweep_value=cmp.pulse_halfwidth / clock.period,
            repetitions=cmp.repetitions,
            rmse=cmp.rmse,
        )
        rows.append(row)
    return rows


# -- output -----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def header(cfg: ScenarioConfig, command: str, config_bytes: bytes, seed_source: str) -> dict:
    return {
        "tool": "proptime",
        "version": __version__,
        "command": command,
        "config_sha256": hashlib.sha256(config_bytes).hexdigest(),
        "seed": cfg.seed,
        "seed_source": seed_source,
    }


def render(rows: list[dict], head: dict, fmt: str) -> str:
    if fmt == "json":
        clean = [{k: (None if isinstance(v, float) and math.isnan(v) else v)
                  for k, v in r.items() if v != ""} for r in rows]
        return json.dumps({"header": head, "rows": clean}, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for k, v in head.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


# -- entry point ------------------------------------------------------------

def _configure_logging():
    level = os.environ.get("PROPTIME_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proptime", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"proptime {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("validate", "check a config and preview proper times"),
                        ("run", "single entangled-scheme estimation"),
                        ("sweep", "run over sweep.axis / sweep.values"),
                        ("compare", "separate vs entangled phase RMSE over a pulse-width grid")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config")
        p.add_argument("--seed", type=int, default=None, help="override trials.seed")
        p.add_argument("--out", default=None, help="output path ('-' for stdout)")
        p.add_argument("--threads", type=int, default=0, help="worker threads, 0 = auto")
        p.add_argument("--format", choices=("csv", "json"), default=None)
    return ap


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        raw = path.read_bytes()
        cfg = parse(raw.decode())
        seed_source = "default" if cfg.seed_defaulted else "config"
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, trials=dataclasses.replace(cfg.trials, seed=args.seed))
            problems = validate(cfg)
            if problems:
                raise ConfigError("invalid seed", problems)
            seed_source = "command line"
        if args.command == "validate":
            info = preflight(cfg)
            print(f"config ok: scenario={cfg.scenario} seed={cfg.seed} ({seed_source})")
            for k, v in info.items():
                print(f"  {k} = {v!r}")
            return EXIT_OK
        rows = COMMANDS[args.command](cfg, max(0, args.threads))
    except ConfigError as exc:
        print("config error:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    except (ProptimeError, ArithmeticError) as exc:
        print(f"numerical error in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    fmt = args.format or cfg.output.format
    text = render(rows, header(cfg, args.command, raw, seed_source), fmt)
    out = args.out or cfg.output.path
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        log.info("wrote %d rows to %s", len(rows), out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
