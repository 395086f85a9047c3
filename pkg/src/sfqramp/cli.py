"""Command-line surface: model inspection, optimization, sweeps, budgets, encoding.

One JSON configuration document drives every command; its defaults are the
reference fluxonium parameters, so `sfqramp optimize` with no config at all
reproduces the headline gate fidelities. All outputs are plain CSV/JSON with
stable column order: identical config and seed give byte-identical files.

Exit codes: 0 success, 1 usage or malformed input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import (
    error_budget,
    process_fidelity,
    project_computational,
    propagate,
    target_unitary,
    with_open_fidelity,
)
from .encoding import EncodingParams, bit_cost, encode
from .engine import HAVE_COMPILED
from .model import CircuitParams, CoherenceRates, QubitModel, diagonalize_model, fock_convergence_shift
from .open_system import open_fidelity, propagate_open
from .optimizer import (
    GateSpec,
    SnappedResult,
    optimize_gate,
    sweep_kick_angle,
    sweep_target_angle,
)
from .schedule import ClockGrid, Ramp, Schedule, ramp_tick_indices

TRAIN_CAP = {"inductive": 31, "capacitive": 127}

DEFAULT_TRIAL_BUDGET = 100


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


@dataclass
class RunConfig:
    circuit: CircuitParams = field(default_factory=CircuitParams)
    t1_us: float = 1200.0
    t2_us: float = 800.0
    coupling: str = "inductive"
    theta_kick: Optional[float] = None
    theta_targ: float = math.pi
    clock_multiples: tuple[int, ...] = (32, 64, 128)
    n_range: tuple[int, int] = (1, 6)
    r_range: tuple[int, int] = (1, 5)
    sweep: tuple[float, ...] = ()
    out_dir: str = "out"
    out_format: str = "csv"
    seed: int = 0
    trial_budget: int = DEFAULT_TRIAL_BUDGET

    def gate_spec(self) -> GateSpec:
        kwargs = dict(
            coupling=self.coupling,
            theta_targ=self.theta_targ,
            clock_multiples=tuple(self.clock_multiples),
            n_range=tuple(self.n_range),
            r_range=tuple(self.r_range),
        )
        if self.theta_kick is not None:
            kwargs["theta_kick"] = self.theta_kick
        return GateSpec(**kwargs)

    def rates(self) -> CoherenceRates:
        return CoherenceRates.from_times_us(self.t1_us, self.t2_us)


_CIRCUIT_KEYS = {"e_j", "e_c", "e_l", "phi_ext", "n_fock", "n_levels"}
_TOP_KEYS = {"circuit", "coherence", "gate", "sweep", "output", "seed", "trial_budget"}
_GATE_KEYS = {"coupling", "theta_kick", "theta_targ", "clock_multiples", "n_range", "r_range"}


def load_config(path: Optional[str]) -> RunConfig:
    config = RunConfig()
    if path is None:
        return config
    try:
        document = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as err:
        raise UsageError(f"config is not valid JSON at line {err.lineno}, column {err.colno}")
    if not isinstance(document, dict):
        raise UsageError("config document must be a JSON object")
    for key in document:
        if key not in _TOP_KEYS:
            raise UsageError(f"unknown config field: {key}")
    try:
        if "circuit" in document:
            extra = set(document["circuit"]) - _CIRCUIT_KEYS
            if extra:
                raise UsageError(f"unknown circuit field: {sorted(extra)[0]}")
            config.circuit = CircuitParams(**document["circuit"])
        if "coherence" in document:
            extra = set(document["coherence"]) - {"t1_us", "t2_us"}
            if extra:
                raise UsageError(f"unknown coherence field: {sorted(extra)[0]}")
            config.t1_us = float(document["coherence"].get("t1_us", config.t1_us))
            config.t2_us = float(document["coherence"].get("t2_us", config.t2_us))
        if "gate" in document:
            gate = document["gate"]
            extra = set(gate) - _GATE_KEYS
            if extra:
                raise UsageError(f"unknown gate field: {sorted(extra)[0]}")
            config.coupling = gate.get("coupling", config.coupling)
            config.theta_kick = gate.get("theta_kick", config.theta_kick)
            config.theta_targ = float(gate.get("theta_targ", config.theta_targ))
            if "clock_multiples" in gate:
                config.clock_multiples = tuple(int(m) for m in gate["clock_multiples"])
            if "n_range" in gate:
                config.n_range = tuple(gate["n_range"])
            if "r_range" in gate:
                config.r_range = tuple(gate["r_range"])
        if "sweep" in document:
            config.sweep = tuple(float(v) for v in document["sweep"])
        if "output" in document:
            extra = set(document["output"]) - {"dir", "format"}
            if extra:
                raise UsageError(f"unknown output field: {sorted(extra)[0]}")
            config.out_dir = document["output"].get("dir", config.out_dir)
            config.out_format = document["output"].get("format", config.out_format)
        config.seed = int(document.get("seed", config.seed))
        config.trial_budget = int(document.get("trial_budget", config.trial_budget))
    except (TypeError, ValueError) as err:
        raise UsageError(f"bad config value: {err}")
    if config.out_format not in ("csv", "json"):
        raise UsageError("output format must be 'csv' or 'json'")
    return config


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if getattr(args, "coupling", None):
        config.coupling = args.coupling
    if getattr(args, "theta_kick", None) is not None:
        config.theta_kick = args.theta_kick
    if getattr(args, "theta_targ", None) is not None:
        config.theta_targ = args.theta_targ
    if getattr(args, "clock", None):
        config.clock_multiples = tuple(args.clock)
    if getattr(args, "out", None):
        config.out_dir = args.out
    if getattr(args, "format", None):
        config.out_format = args.format
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "trials", None) is not None:
        config.trial_budget = args.trials
    return config


# ---------------------------------------------------------------- documents

SCHEDULE_FORMAT = "sfqramp-schedule-v1"


def schedule_document(
    config: RunConfig,
    spec: GateSpec,
    r_periods: int,
    times_ns: tuple[float, ...],
    n_train: int,
    infidelity: float,
    clock_multiple: Optional[int] = None,
    ramp_ticks: Optional[list[int]] = None,
) -> dict:
    return {
        "format": SCHEDULE_FORMAT,
        "circuit": asdict(config.circuit),
        "coupling": spec.coupling,
        "theta_kick": spec.theta_kick,
        "theta_targ": spec.theta_targ,
        "r_periods": r_periods,
        "n_train": n_train,
        "times_ns": list(times_ns),
        "ramp_ticks": ramp_ticks,
        "clock_multiple": clock_multiple,
        "infidelity": infidelity,
    }


def load_schedule_document(path: str) -> dict:
    try:
        document = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"schedule file not found: {path}")
    except json.JSONDecodeError as err:
        raise UsageError(
            f"schedule file is not valid JSON at line {err.lineno}, column {err.colno}"
        )
    if not isinstance(document, dict) or document.get("format") != SCHEDULE_FORMAT:
        raise UsageError(f"not a {SCHEDULE_FORMAT} document: {path}")
    for key in ("coupling", "theta_kick", "theta_targ", "r_periods", "n_train", "times_ns"):
        if key not in document:
            raise UsageError(f"schedule file missing field: {key}")
    return document


def _schedule_from_document(document: dict, model: QubitModel) -> Schedule:
    if document.get("ramp_ticks") is not None and document.get("clock_multiple"):
        grid = ClockGrid.from_period(int(document["clock_multiple"]), model.period)
        times = tuple(k * grid.tick for k in document["ramp_ticks"])
    else:
        times = tuple(float(t) for t in document["times_ns"])
    ramp = Ramp(r_periods=int(document["r_periods"]), times=times)
    return Schedule(
        ramp=ramp,
        n_train=int(document["n_train"]),
        coupling=document["coupling"],
        theta_kick=float(document["theta_kick"]),
    )


# ------------------------------------------------------------------ writers

def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_table(path_base: Path, header: list[str], rows: list[dict], fmt: str) -> Path:
    if fmt == "csv":
        path = path_base.with_suffix(".csv")
        _write_csv(path, header, [[row.get(column) for column in header] for row in rows])
    else:
        path = path_base.with_suffix(".json")
        _write_json(path, rows)
    return path


# ----------------------------------------------------------------- commands

def cmd_model_info(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    model = diagonalize_model(config.circuit, check_convergence=False)
    print(f"omega_01/2pi = {model.frequency_ghz(0, 1):.6f} GHz")
    if model.n_levels > 2:
        print(f"omega_12/2pi = {model.frequency_ghz(1, 2):.6f} GHz")
    print(f"qubit period T = {model.period:.6f} ns")
    phi01 = abs(model.phi_op[0, 1])
    n01 = abs(model.n_op[0, 1])
    print(f"|phi_01| = {phi01:.6f}")
    print(f"|n_01| = {n01:.6f}")
    if model.n_levels > 3 and n01 > 0:
        print(f"|n_03|/|n_01| = {abs(model.n_op[0, 3]) / n01:.6f}")
    shift = fock_convergence_shift(config.circuit)
    print(f"fock convergence: omega_01 shift {shift:.3e} rad/ns for n_fock +10 "
          f"({'ok' if shift < 1e-6 else 'NOT CONVERGED'})")
    if config.circuit.e_j == 0:
        spacing = math.sqrt(8.0 * config.circuit.e_c * config.circuit.e_l)
        gaps = np.diff(model.omegas) / (2.0 * math.pi)
        deviation = float(np.max(np.abs(gaps - spacing)))
        print(f"harmonic check: analytic spacing {spacing:.6f} GHz, "
              f"max deviation {deviation:.3e} GHz")
    return 0


def _budget_row(name: str, budget_dict: dict) -> dict:
    row = {"gate": name}
    row.update(budget_dict)
    return row


def _evaluate_budget(
    model: QubitModel,
    schedule: Schedule,
    theta_targ: float,
    rates: Optional[CoherenceRates],
):
    u_q = project_computational(propagate(model, schedule))
    budget = error_budget(u_q, schedule.coupling, theta_targ)
    if rates is not None:
        s_e = propagate_open(model, schedule, rates)
        f_open = open_fidelity(s_e, target_unitary(schedule.coupling, theta_targ))
        budget = with_open_fidelity(budget, f_open)
    return budget


def cmd_optimize(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = diagonalize_model(config.circuit, check_convergence=False)
    spec = config.gate_spec()
    rates = config.rates()
    outcome = optimize_gate(spec, model, trial_budget=config.trial_budget)

    header = ["n", "r", "infidelity_continuous", "n_train"]
    for multiple in spec.clock_multiples:
        header += [f"snapped_{multiple}x_infidelity", f"snapped_{multiple}x_n_train"]
    cell_rows = []
    for (n, r) in sorted(outcome.cells):
        res = outcome.cells[(n, r)]
        row = {
            "n": n,
            "r": r,
            "infidelity_continuous": res.infidelity_continuous,
            "n_train": res.n_train,
        }
        for multiple in spec.clock_multiples:
            snap = res.snapped.get(multiple)
            if isinstance(snap, SnappedResult):
                row[f"snapped_{multiple}x_infidelity"] = snap.infidelity
                row[f"snapped_{multiple}x_n_train"] = snap.n_train
            else:
                row[f"snapped_{multiple}x_infidelity"] = "discarded"
                row[f"snapped_{multiple}x_n_train"] = None
        cell_rows.append(row)
    _write_table(out / "cells", header, cell_rows, config.out_format)

    best = outcome.best_continuous
    best_doc = schedule_document(
        config, spec, best.r_periods, best.times_continuous, best.n_train,
        best.infidelity_continuous,
    )
    _write_json(out / "best_continuous.json", best_doc)

    budget_rows = []
    try:
        budget = _evaluate_budget(
            model,
            Schedule(
                ramp=Ramp(best.r_periods, best.times_continuous),
                n_train=best.n_train, coupling=spec.coupling, theta_kick=spec.theta_kick,
            ),
            spec.theta_targ,
            rates,
        )
        budget_rows.append(_budget_row("continuous_best", budget.as_dict()))
    except ValueError:
        pass  # degenerate continuous optimum (coincident kicks); snapped rows still follow

    summary = {
        "coupling": spec.coupling,
        "theta_kick": spec.theta_kick,
        "theta_targ": spec.theta_targ,
        "trial_budget": config.trial_budget,
        "seed": config.seed,
        "engine_compiled": HAVE_COMPILED,
        "best_continuous": {
            "cell": [best.n_pulses, best.r_periods],
            "infidelity": best.infidelity_continuous,
        },
        "best_snapped": {},
    }
    for multiple in spec.clock_multiples:
        entry = outcome.best_snapped.get(multiple)
        if entry is None:
            continue
        (n, r), snap = entry
        grid = ClockGrid.from_period(multiple, model.period)
        ticks = ramp_tick_indices(snap.ramp, grid)
        doc = schedule_document(
            config, spec, snap.ramp.r_periods, snap.ramp.times, snap.n_train,
            snap.infidelity, clock_multiple=multiple, ramp_ticks=ticks,
        )
        _write_json(out / f"best_snapped_{multiple}x.json", doc)
        params = EncodingParams(
            n_max=6, r_max=max(5, spec.r_range[1]),
            clock_multiple=multiple, n_train_max=TRAIN_CAP[spec.coupling],
        )
        encoded = encode(ticks, snap.ramp.r_periods, snap.n_train, params)
        budget = _evaluate_budget(
            model,
            Schedule(ramp=snap.ramp, n_train=snap.n_train,
                     coupling=spec.coupling, theta_kick=spec.theta_kick),
            spec.theta_targ,
            rates,
        )
        budget_rows.append(_budget_row(f"snapped_{multiple}x", budget.as_dict()))
        summary["best_snapped"][str(multiple)] = {
            "cell": [n, r],
            "infidelity": snap.infidelity,
            "n_train": snap.n_train,
            "ramp_ticks": ticks,
            "encoded_hex": encoded.to_hex(),
            "encoded_bits": encoded.total_bits,
        }
    budget_header = ["gate"] + list(budget_rows[0].keys())[1:] if budget_rows else ["gate"]
    _write_table(out / "budgets", budget_header, budget_rows, config.out_format)
    _write_json(out / "summary.json", summary)
    print(f"best continuous infidelity: {best.infidelity_continuous:.6e} "
          f"(N={best.n_pulses}, R={best.r_periods})")
    for multiple in spec.clock_multiples:
        entry = outcome.best_snapped.get(multiple)
        if entry:
            print(f"best snapped {multiple}x infidelity: {entry[1].infidelity:.6e}")
    print(f"results written to {out}/")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    if args.values:
        try:
            values = tuple(float(v) for v in args.values.split(","))
        except ValueError:
            raise UsageError("--values must be a comma-separated list of numbers")
    else:
        values = config.sweep
    if not values:
        raise UsageError("no sweep values given (use --values or config 'sweep')")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = diagonalize_model(config.circuit, check_convergence=False)
    spec = config.gate_spec()
    if args.which == "kick":
        rows = sweep_kick_angle(
            spec, values, model, trial_budget=config.trial_budget,
        )
        base = out / "sweep_kick"
    else:
        rows = sweep_target_angle(
            spec, values, model, trial_budget=config.trial_budget, rates=config.rates(),
        )
        base = out / "sweep_target"
        rows = [_flatten_budgets(row) for row in rows]
    header = list(rows[0].keys())
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    rows = [{k: _cell_text(v) for k, v in row.items()} for row in rows]
    path = _write_table(base, header, rows, config.out_format)
    print(f"{len(rows)} sweep rows written to {path}")
    return 0


def _flatten_budgets(row: dict) -> dict:
    flat = {}
    for key, value in row.items():
        if key.startswith("budget_") and isinstance(value, dict):
            for name, number in value.items():
                flat[f"{key}_{name}"] = number
        else:
            flat[key] = value
    return flat


def _cell_text(value):
    if isinstance(value, tuple):
        return f"{value[0]}x{value[1]}"
    return value


def cmd_budget(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    document = load_schedule_document(args.schedule)
    model = diagonalize_model(config.circuit, check_convergence=False)
    schedule = _schedule_from_document(document, model)
    theta_targ = float(document["theta_targ"])
    budget = _evaluate_budget(model, schedule, theta_targ, config.rates())
    u_q = project_computational(propagate(model, schedule))
    fidelity = process_fidelity(u_q, target_unitary(schedule.coupling, theta_targ))
    print(f"process fidelity F_pro = {fidelity:.12f}")
    for name, value in budget.as_dict().items():
        if value is not None:
            print(f"{name} = {value:.6e}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    document = load_schedule_document(args.schedule)
    if document.get("ramp_ticks") is None or not document.get("clock_multiple"):
        raise UsageError(
            "schedule is not snapped (no ramp_ticks/clock_multiple); snap it first"
        )
    coupling = document["coupling"]
    if coupling not in TRAIN_CAP:
        raise UsageError(f"unknown coupling in schedule file: {coupling}")
    params = EncodingParams(
        n_max=6, r_max=5,
        clock_multiple=int(document["clock_multiple"]),
        n_train_max=TRAIN_CAP[coupling],
    )
    try:
        encoded = encode(
            [int(t) for t in document["ramp_ticks"]],
            int(document["r_periods"]),
            int(document["n_train"]),
            params,
        )
    except ValueError as err:
        raise UsageError(str(err))
    ramp_bits, train_bits, ramplen_bits, total = bit_cost(
        params.n_max, params.r_max, params.clock_multiple, params.n_train_max
    )
    print(f"encoded_hex = {encoded.to_hex()}")
    print(f"layout: ramp_bits={ramp_bits} train_bits={train_bits} "
          f"ramplen_bits={ramplen_bits} total={total}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sfqramp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_gate=True, with_output=True):
        p.add_argument("--config", help="path to a JSON configuration document")
        if with_gate:
            p.add_argument("--coupling", choices=("inductive", "capacitive"))
            p.add_argument("--theta-kick", type=float, dest="theta_kick")
            p.add_argument("--theta-targ", type=float, dest="theta_targ")
            p.add_argument("--clock", type=int, action="append",
                           help="clock multiple (repeatable)")
        if with_output:
            p.add_argument("--out", help="output directory")
            p.add_argument("--format", choices=("csv", "json"))
            p.add_argument("--seed", type=int)
            p.add_argument("--trials", type=int, help="BFGS trial budget per (N, R) cell")

    info = sub.add_parser("model-info", help="print the qubit model summary")
    add_common(info, with_gate=False, with_output=False)
    info.set_defaults(func=cmd_model_info)

    opt = sub.add_parser("optimize", help="optimize one gate over all (N, R) cells")
    add_common(opt)
    opt.set_defaults(func=cmd_optimize)

    swp = sub.add_parser("sweep", help="optimize across kick or target angles")
    swp.add_argument("which", choices=("kick", "target"))
    swp.add_argument("--values", help="comma-separated sweep values")
    add_common(swp)
    swp.set_defaults(func=cmd_sweep)

    bud = sub.add_parser("budget", help="error budget of a saved schedule")
    bud.add_argument("schedule", help="schedule JSON written by optimize")
    add_common(bud, with_gate=False, with_output=False)
    bud.set_defaults(func=cmd_budget)

    enc = sub.add_parser("encode", help="bit-encode a saved snapped schedule")
    enc.add_argument("schedule", help="snapped schedule JSON written by optimize")
    enc.set_defaults(func=cmd_encode)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
