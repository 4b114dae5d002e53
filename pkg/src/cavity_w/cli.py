"""
Command-line front end.

    cavity-w <command> [options]

Commands: epr, expand, simulate, validate, schedule, feasibility,
noise-sweep, reduce. Run ``cavity-w <command> -h`` for the flags.

Settings are resolved as defaults < config file < command-line flags. The
config file is flat ``key = value`` text with ``#`` comments; its path comes
from ``--config`` or else the ``CAVITY_W_CONFIG`` environment variable.

Output is a list of flat records, written as CSV (header row, floats with
17 significant digits) or as a JSON array of objects. Every record carries
the full configuration echo, seed included.

Exit codes: 0 success, 2 configuration error, 3 numerical guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .noise_model import NoiseConfig, estimate_fidelity, feasibility, survival_probability
from .pair_interaction import InteractionParams, compare_effective_exact
from .protocol import build_schedule, reduce_to_size, reduction_success_probability, run_ideal
from .state_core import NumericalGuardError, canonical_w, fix_global_phase, relative_phases, w_class_fidelity
from .subspace_engine import run_cascade

CONFIG_ENV = "CAVITY_W_CONFIG"
COMMANDS = ("epr", "expand", "simulate", "validate", "schedule", "feasibility", "noise-sweep", "reduce")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    command: str = "expand"
    target_n: int = 4
    g_hz: float = 24_000.0
    delta_over_g: float = 10.0
    T_r_s: float = 0.03
    theta_sigma: float = 0.0
    decay: bool = True
    trials: int = 1000
    seed: int = 0
    n_max: int = 5
    reduce_from: int = 4
    reduce_to: int = 3
    ratios: str = "10,20,50,100"
    sigma_grid: str = "0,0.01,0.02,0.05,0.1"
    tr_grid: str = "0.03"
    max_listed: int = 64
    output_path: Optional[str] = None
    output_format: str = "csv"

    def params(self) -> InteractionParams:
        return InteractionParams.from_hz(self.g_hz, self.delta_over_g)

    def echo(self) -> dict:
        d = asdict(self)
        del d["output_path"], d["output_format"]
        return {f"cfg_{k}": v for k, v in d.items()}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_POSITIVE = ("target_n", "g_hz", "delta_over_g", "T_r_s", "trials", "n_max",
             "reduce_from", "reduce_to", "max_listed")


def _coerce(key: str, raw):
    kind = _FIELD_TYPES[key]
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError(key, f"malformed {kind} value {raw!r}") from None
    return text


def _grid(key: str, text: str) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(key, "empty grid")
    return values


def validate_config(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError("command", f"unknown command {cfg.command!r}")
    for key in _POSITIVE:
        v = getattr(cfg, key)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(key, f"must be positive, got {v!r}")
    if cfg.command in ("expand", "simulate", "schedule", "noise-sweep") and cfg.target_n < 2:
        raise ConfigError("target_n", f"must be >= 2, got {cfg.target_n}")
    if not (math.isfinite(cfg.theta_sigma) and cfg.theta_sigma >= 0):
        raise ConfigError("theta_sigma", f"must be >= 0, got {cfg.theta_sigma!r}")
    if cfg.seed < 0:
        raise ConfigError("seed", f"must be >= 0, got {cfg.seed}")
    if cfg.reduce_to > cfg.reduce_from:
        raise ConfigError("reduce_to", f"{cfg.reduce_to} exceeds reduce_from={cfg.reduce_from}")
    if cfg.output_format not in ("csv", "json"):
        raise ConfigError("output_format", f"expected csv or json, got {cfg.output_format!r}")
    for key in ("ratios", "sigma_grid", "tr_grid"):
        vals = _grid(key, getattr(cfg, key))
        if any(v < 0 or not math.isfinite(v) for v in vals) or (key != "sigma_grid" and min(vals) <= 0):
            raise ConfigError(key, f"out-of-range entry in {getattr(cfg, key)!r}")
    return cfg


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file. Keys may use ``-`` or ``_``."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES or key == "command":
            raise ConfigError(key, f"unknown key in {path}:{lineno}")
        values[key] = _coerce(key, value)
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-w",
        description="Deterministic cavity-QED W-state expansion: ideal runs, validation, noise, feasibility.",
    )
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument("--config", default=sup, help=f"config file (default: ${CONFIG_ENV})")
    common.add_argument("--target-n", dest="target_n", default=sup, help="number of atoms in the target W state")
    common.add_argument("--g-hz", dest="g_hz", default=sup, help="coupling g as ordinary frequency in Hz (g = 2*pi*g_hz rad/s)")
    common.add_argument("--delta-over-g", dest="delta_over_g", default=sup, help="detuning in units of g")
    common.add_argument("--T-r", "--t-r-s", dest="T_r_s", default=sup, help="radiative lifetime in seconds")
    common.add_argument("--theta-sigma", dest="theta_sigma", default=sup, help="pulse-angle jitter std. dev. (rad)")
    common.add_argument("--decay", dest="decay", default=sup, help="enable radiative decay (true/false)")
    common.add_argument("--trials", default=sup, help="Monte-Carlo trials")
    common.add_argument("--seed", default=sup, help="random seed")
    common.add_argument("--n-max", dest="n_max", default=sup, help="photon ladder truncation")
    common.add_argument("--from", dest="reduce_from", default=sup, help="reduce: starting W size")
    common.add_argument("--to", dest="reduce_to", default=sup, help="reduce: final W size")
    common.add_argument("--ratios", default=sup, help="validate: comma-separated delta/g grid")
    common.add_argument("--sigma-grid", dest="sigma_grid", default=sup, help="noise-sweep: theta_sigma grid")
    common.add_argument("--tr-grid", dest="tr_grid", default=sup, help="noise-sweep: T_r grid (s)")
    common.add_argument("--max-listed", dest="max_listed", default=sup, help="expand: list amplitudes up to this size")
    common.add_argument("-o", "--output", dest="output_path", default=sup, help="output file (default stdout)")
    common.add_argument("--format", dest="output_format", default=sup, choices=("csv", "json"))
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_config(argv=None, config_path: Optional[str] = None) -> RunConfig:
    """Resolve a RunConfig from defaults, an optional config file and ``argv``.

    Raises ConfigError on bad values; argparse itself exits with status 2 on
    unknown commands or flags.
    """
    ns = vars(_build_parser().parse_args(argv))
    path = ns.pop("config", None) or config_path or os.environ.get(CONFIG_ENV)
    merged = {}
    if path:
        merged.update(read_config_file(path))
    for key, value in ns.items():
        merged[key] = _coerce(key, value) if key != "command" else value
    return validate_config(RunConfig(**merged))


def _amplitude_records(amps, extra: dict) -> list:
    amps = fix_global_phase(amps)
    phases = relative_phases(amps)
    records = []
    for k, a in enumerate(amps):
        rec = {"atom": k, "re": float(a.real), "im": float(a.imag),
               "magnitude": float(abs(a)), "phase_rel": float(phases[k])}
        rec.update(extra)
        records.append(rec)
    return records


def _cmd_epr(cfg: RunConfig) -> list:
    sched = build_schedule(2, cfg.params())
    res = run_ideal(sched)
    return _amplitude_records(res.state.amps, {"total_time": res.total_time})


def _cmd_expand(cfg: RunConfig) -> list:
    sched = build_schedule(cfg.target_n, cfg.params())
    res = run_ideal(sched, randomness=cfg.seed)
    state = res.state
    summary = {"n": state.n, "rounds": res.rounds_executed, "total_time": res.total_time,
               "succeeded": res.succeeded}
    if state.n <= cfg.max_listed:
        return _amplitude_records(state.amps, summary)
    mags = np.abs(state.amps)
    summary.update({"norm": float(np.linalg.norm(state.amps)), "w_class_fidelity": w_class_fidelity(state),
                    "min_magnitude": float(mags.min()), "max_magnitude": float(mags.max())})
    return [summary]


def _cmd_simulate(cfg: RunConfig) -> list:
    sched = build_schedule(cfg.target_n, cfg.params())
    noise = NoiseConfig(cfg.theta_sigma, cfg.T_r_s, cfg.decay, cfg.seed)
    mean, err = estimate_fidelity(sched, noise, cfg.trials)
    return [{"target_n": cfg.target_n, "trials": cfg.trials, "mean_fidelity": mean, "stderr": err,
             "survival_closed_form": survival_probability(sched, noise)}]


def _cmd_validate(cfg: RunConfig) -> list:
    g = 2 * math.pi * cfg.g_hz
    records = []
    for ratio in _grid("ratios", cfg.ratios):
        rep = compare_effective_exact(InteractionParams(g, ratio * g), cfg.n_max)
        records.append({"delta_over_g": ratio, "infidelity": rep.infidelity,
                        "conditional_infidelity": rep.conditional_infidelity,
                        "photon_leakage": rep.photon_leakage})
    return records


def _cmd_schedule(cfg: RunConfig) -> list:
    sched = build_schedule(cfg.target_n, cfg.params())
    records = []
    for r, plan in enumerate(sched.rounds):
        for p in plan:
            records.append({"round": r, "i": p.i, "j": p.j, "theta": p.theta,
                            "start_time": r * sched.pass_duration,
                            "end_time": (r + 1) * sched.pass_duration,
                            "reduction_count": sched.reduction_count})
    return records


def _cmd_feasibility(cfg: RunConfig) -> list:
    params = cfg.params()
    rep = feasibility(params, cfg.target_n, cfg.T_r_s)
    rec = {k: v for k, v in asdict(rep).items() if k != "params_echo"}
    rec.update({"g_rad_s": params.g, "delta_rad_s": params.delta, "lambda_rad_s": params.lam})
    return [rec]


def _cmd_noise_sweep(cfg: RunConfig) -> list:
    sched = build_schedule(cfg.target_n, cfg.params())
    records = []
    for tr in _grid("tr_grid", cfg.tr_grid):
        for sigma in _grid("sigma_grid", cfg.sigma_grid):
            noise = NoiseConfig(sigma, tr, cfg.decay, cfg.seed)
            mean, err = estimate_fidelity(sched, noise, cfg.trials)
            records.append({"theta_sigma": sigma, "T_r": tr, "mean_fidelity": mean, "stderr": err})
    return records


def _cmd_reduce(cfg: RunConfig) -> list:
    m, n = cfg.reduce_from, cfg.reduce_to
    if m & (m - 1) == 0:
        start = run_cascade(m.bit_length() - 1)
    else:
        start = canonical_w(m)
    rng = np.random.default_rng(cfg.seed)
    successes = sum(reduce_to_size(start, n, rng).succeeded for _ in range(cfg.trials))
    p = reduction_success_probability(m, n)
    freq = successes / cfg.trials
    return [{"from": m, "to": n, "trials": cfg.trials, "successes": successes,
             "success_frequency": freq, "expected_probability": p,
             "sigma": math.sqrt(p * (1 - p) / cfg.trials)}]


_HANDLERS = {
    "epr": _cmd_epr, "expand": _cmd_expand, "simulate": _cmd_simulate,
    "validate": _cmd_validate, "schedule": _cmd_schedule, "feasibility": _cmd_feasibility,
    "noise-sweep": _cmd_noise_sweep, "reduce": _cmd_reduce,
}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def to_csv(records: list) -> str:
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0])
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(rec[k]) for k in header])
    return buf.getvalue()


def to_json(records: list) -> str:
    return json.dumps(records, indent=2) + "\n"


def run_command(cfg: RunConfig):
    """Execute ``cfg`` and return ``(exit_code, records)``."""
    try:
        records = _HANDLERS[cfg.command](cfg)
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERIC, []
    except MemoryError as exc:
        print(f"error: target_n: {exc}", file=sys.stderr)
        return EXIT_CONFIG, []
    echo = cfg.echo()
    records = [{**rec, **echo} for rec in records]
    return EXIT_OK, records


def emit(records: list, cfg: RunConfig) -> None:
    text = to_json(records) if cfg.output_format == "json" else to_csv(records)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, records = run_command(cfg)
    if code == EXIT_OK:
        emit(records, cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
