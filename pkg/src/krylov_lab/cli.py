"""Config-driven experiment runner.

Experiments are described by flat ``key = value`` text files with ``#``
comments. Three experiments exist: ``fig1_small`` (small system, absolute
generator steps), ``fig2_gue`` (N=50 sweep over scrambling-scaled steps),
and ``theorem1`` (the non-optimality sweep). Runs emit CSV data plus JSON
metadata into the configured output directory; every float is serialized
with 17 significant digits so identical runs produce bit-identical files.

Exit codes: 0 success, 2 configuration error, 3 numeric error. Errors are
reported as one-line JSON records on stderr. ``KRYLOV_LAB_THREADS`` caps
how many (order, dt) cells run in parallel.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .analysis import Theorem1Report, project_hamiltonian, verify_theorem1
from .dynamics import TimeGrid, amplitudes
from .ensemble import EnsembleSpec, sample_gue, uniform_eigenstate_superposition
from .errors import ConfigError, KrylovLabError, NumericError
from .krylov import build_basis
from .timescales import compute_timescales
from .validation import check_generator_order, order_token

RUNNER_ROW_SUM_TOL = 1e-9

_COMMON_KEYS = ("experiment", "dim", "seed", "output_dir")
_TRACE_KEYS = _COMMON_KEYS + (
    "orders", "dt_mode", "dt_values", "grid_start", "grid_stop",
    "grid_stop_units", "grid_points", "normalize", "conjugate_generator",
)
_THEOREM_KEYS = _COMMON_KEYS + ("trials", "tau_points")

_ALLOWED_KEYS = {
    "fig1_small": _TRACE_KEYS,
    "fig2_gue": _TRACE_KEYS,
    "theorem1": _THEOREM_KEYS,
}

_DEFAULTS = {
    "fig1_small": dict(
        dim=3, seed=0, orders=(1, 2, 3, math.inf), dt_mode="absolute",
        dt_values=(2.0,), grid_start=0.0, grid_stop=6.0,
        grid_stop_units="absolute", grid_points=601, normalize=True,
        conjugate_generator=False, output_dir="out", trials=0, tau_points=0,
    ),
    "fig2_gue": dict(
        dim=50, seed=0, orders=(1, 2, 3, math.inf), dt_mode="scrambling_multiple",
        dt_values=(0.2, 1.0, 1.5), grid_start=0.0, grid_stop=3.0,
        grid_stop_units="tau_h", grid_points=900, normalize=False,
        conjugate_generator=False, output_dir="out", trials=0, tau_points=0,
    ),
    "theorem1": dict(
        dim=3, seed=0, orders=(1,), dt_mode="absolute", dt_values=(),
        grid_start=0.0, grid_stop=0.0, grid_stop_units="absolute",
        grid_points=2, normalize=False, conjugate_generator=False,
        output_dir="out", trials=100, tau_points=20,
    ),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description."""

    experiment: str
    dim: int
    seed: int
    orders: tuple
    dt_mode: str
    dt_values: tuple
    grid_start: float
    grid_stop: float
    grid_stop_units: str
    grid_points: int
    normalize: bool
    conjugate_generator: bool
    output_dir: str
    trials: int
    tau_points: int

    def __post_init__(self):
        if self.experiment not in _ALLOWED_KEYS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.dim < 2:
            raise ConfigError(f"dim must be >= 2, got {self.dim}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.experiment == "theorem1":
            if self.dim < 3:
                raise ConfigError("theorem1 requires dim >= 3")
            if self.trials < 1 or self.tau_points < 1:
                raise ConfigError("theorem1 requires trials >= 1 and tau_points >= 1")
            return
        if not self.orders or 1 not in self.orders:
            raise ConfigError("baseline order 1 required")
        if self.dt_mode not in ("absolute", "scrambling_multiple"):
            raise ConfigError(f"unknown dt_mode {self.dt_mode!r}")
        if not self.dt_values or any(not (v > 0) for v in self.dt_values):
            raise ConfigError("dt_values must be a non-empty list of positive numbers")
        if self.grid_stop_units not in ("absolute", "tau_h"):
            raise ConfigError(f"unknown grid_stop_units {self.grid_stop_units!r}")
        if self.grid_start < 0 or self.grid_stop <= self.grid_start:
            raise ConfigError(
                f"grid [{self.grid_start}, {self.grid_stop}] is not a forward range"
            )
        if self.grid_points < 2:
            raise ConfigError(f"grid_points must be >= 2, got {self.grid_points}")


def _parse_bool(raw: str, key: str, line: int) -> bool:
    v = raw.strip().lower()
    if v in ("true", "false"):
        return v == "true"
    raise ConfigError(f"line {line}: {key} must be true or false, got {raw!r}")


def _parse_int(raw: str, key: str, line: int) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(f"line {line}: {key} must be an integer, got {raw!r}") from None


def _parse_float(raw: str, key: str, line: int) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise ConfigError(f"line {line}: {key} must be a number, got {raw!r}") from None


def _parse_orders(raw: str, line: int) -> tuple:
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            raise ConfigError(f"line {line}: empty entry in orders")
        if tok.lower() in ("inf", "infinite", "infinity"):
            out.append(math.inf)
            continue
        try:
            out.append(check_generator_order(int(tok)))
        except ValueError as exc:
            raise ConfigError(f"line {line}: bad order {tok!r}: {exc}") from None
    return tuple(out)


def _parse_floats(raw: str, key: str, line: int) -> tuple:
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            raise ConfigError(f"line {line}: empty entry in {key}")
        out.append(_parse_float(tok, key, line))
    return tuple(out)


def parse_config(path: str) -> ExperimentConfig:
    """Parse and resolve a config file.

    Unknown keys, keys that do not apply to the configured experiment,
    duplicate keys, and malformed values are all errors carrying the line
    number.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc

    raw: dict[str, tuple[str, int]] = {}
    for i, full in enumerate(lines, start=1):
        stripped = full.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {i}: expected key = value, got {full.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {i}: duplicate key {key!r}")
        raw[key] = (value, i)

    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    experiment = raw["experiment"][0]
    if experiment not in _ALLOWED_KEYS:
        raise ConfigError(
            f"line {raw['experiment'][1]}: unknown experiment {experiment!r}"
        )
    allowed = _ALLOWED_KEYS[experiment]
    for key, (_, line) in raw.items():
        if key not in allowed:
            raise ConfigError(
                f"line {line}: unknown key {key!r} for experiment {experiment!r}"
            )

    merged = dict(_DEFAULTS[experiment], experiment=experiment)
    for key, (value, line) in raw.items():
        if key == "experiment":
            continue
        if key in ("dim", "seed", "grid_points", "trials", "tau_points"):
            merged[key] = _parse_int(value, key, line)
        elif key in ("grid_start", "grid_stop"):
            merged[key] = _parse_float(value, key, line)
        elif key in ("normalize", "conjugate_generator"):
            merged[key] = _parse_bool(value, key, line)
        elif key == "orders":
            merged[key] = _parse_orders(value, line)
        elif key == "dt_values":
            merged[key] = _parse_floats(value, key, line)
        else:
            merged[key] = value
    return ExperimentConfig(**merged)


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_fmt_value(v) for v in value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return format(value, "g")
    return str(value)


def config_echo(cfg: ExperimentConfig) -> list[str]:
    """Canonical ``key = value`` lines for the resolved config."""
    keys = _ALLOWED_KEYS[cfg.experiment]
    ordered = [f.name for f in fields(cfg) if f.name in keys]
    return [f"{name} = {_fmt_value(getattr(cfg, name))}" for name in ordered]


def _json_fragment(value, indent: int) -> str:
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_json_fragment(v, indent + 2)}'
            for k, v in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{pad}  {_json_fragment(v, indent + 2)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            raise NumericError(f"non-finite value {x!r} in JSON output")
        return _fmt_float(x)
    if value is None:
        return "null"
    return json.dumps(str(value))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_json_fragment(payload, 0))
        fh.write("\n")


def _config_payload(cfg: ExperimentConfig) -> dict:
    keys = _ALLOWED_KEYS[cfg.experiment]
    out = {}
    for f in fields(cfg):
        if f.name not in keys:
            continue
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ["inf" if isinstance(x, float) and math.isinf(x) else x for x in v]
        out[f.name] = v
    return out


def _dt_token(value: float) -> str:
    return format(float(value), "g")


def _write_trace_csv(path: str, trace, tau_H: float, dc: np.ndarray) -> None:
    times = trace.grid.times()
    header = ["t", "t_over_tauH", "C", "dC_vs_p1"]
    header += [f"k{n}_sq" for n in range(trace.grade)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(trace.grid.points):
            row = [
                _fmt_float(times[i]),
                _fmt_float(times[i] / tau_H),
                _fmt_float(trace.complexity[i]),
                _fmt_float(dc[i]),
            ]
            row += [_fmt_float(v) for v in trace.amplitudes_sq[i]]
            writer.writerow(row)


def _write_hessian_csv(path: str, projected) -> None:
    mags = projected.magnitudes()
    m = mags.shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"j{n}" for n in range(m)])
        for i in range(m):
            writer.writerow([_fmt_float(v) for v in mags[i]])


def _thread_budget(n_cells: int) -> int:
    raw = os.environ.get("KRYLOV_LAB_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(
                f"KRYLOV_LAB_THREADS must be an integer, got {raw!r}"
            ) from None
        if cap < 1:
            raise ConfigError(f"KRYLOV_LAB_THREADS must be >= 1, got {cap}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(n_cells, cap))


def _run_traces(cfg: ExperimentConfig) -> None:
    spec = EnsembleSpec(dim=cfg.dim, seed=cfg.seed,
                        normalize_spectral_norm=cfg.normalize)
    H = sample_gue(spec)
    psi0 = uniform_eigenstate_superposition(H)
    basis1 = build_basis(H, 1, None, psi0)
    report = compute_timescales(H, basis1.grade)

    if cfg.dt_mode == "absolute":
        dt_abs = {v: float(v) for v in cfg.dt_values}
    else:
        dt_abs = {v: float(v) * report.dt_scr for v in cfg.dt_values}
    scale = report.tau_H if cfg.grid_stop_units == "tau_h" else 1.0
    grid = TimeGrid(start=cfg.grid_start * scale, stop=cfg.grid_stop * scale,
                    points=cfg.grid_points)

    base_trace = amplitudes(basis1, H, psi0, grid)
    _assert_row_sums(base_trace)

    cells = [(order, v) for v in cfg.dt_values for order in cfg.orders]

    def run_cell(cell):
        order, native = cell
        basis = build_basis(H, order, dt_abs[native], psi0,
                            conjugate=cfg.conjugate_generator)
        trace = amplitudes(basis, H, psi0, grid)
        _assert_row_sums(trace)
        dc = trace.complexity - base_trace.complexity
        stem = f"{order_token(order)}_dt{_dt_token(native)}"
        _write_trace_csv(os.path.join(cfg.output_dir, f"trace_{stem}.csv"),
                         trace, report.tau_H, dc)
        _write_hessian_csv(os.path.join(cfg.output_dir, f"hessian_{stem}.csv"),
                           project_hamiltonian(basis, H))

    workers = _thread_budget(len(cells))
    if workers == 1:
        for cell in cells:
            run_cell(cell)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_cell, cells))

    payload = {
        "h_norm": report.h_norm,
        "grade": report.grade,
        "tau_scr": report.tau_scr,
        "dt_scr": report.dt_scr,
        "mean_spacing": report.mean_spacing,
        "tau_H": report.tau_H,
        "seed": cfg.seed,
        "initial_state": "uniform superposition of all eigenstates, "
                         "largest-entry phase convention",
        "dt_values_absolute": [dt_abs[v] for v in cfg.dt_values],
        "config": _config_payload(cfg),
    }
    _write_json(os.path.join(cfg.output_dir, "timescales.json"), payload)


def _assert_row_sums(trace) -> None:
    err = trace.row_sum_error()
    if err > RUNNER_ROW_SUM_TOL:
        raise NumericError(
            f"trace row sums deviate from 1 by {err:.3e} > {RUNNER_ROW_SUM_TOL:g}"
        )


def _run_theorem(cfg: ExperimentConfig) -> None:
    report = verify_theorem1(trials=cfg.trials, dim=cfg.dim, seed=cfg.seed,
                             tau_points=cfg.tau_points)
    _write_json(os.path.join(cfg.output_dir, "theorem1.json"),
                _theorem_payload(report, cfg))


def _theorem_payload(report: Theorem1Report, cfg: ExperimentConfig) -> dict:
    return {
        "trials": report.trials,
        "dim": report.dim,
        "seed": report.seed,
        "violations": report.violations,
        "min_margin": report.min_margin,
        "max_kappa0_mismatch": report.max_kappa0_mismatch,
        "max_kappa2_infinite": report.max_kappa2_infinite,
        "max_transfer_residual": report.max_transfer_residual,
        "resamples": report.resamples,
        "records": [
            {
                "trial": r.trial,
                "attempt": r.attempt,
                "tau": r.tau,
                "c_order1": r.c_order1,
                "c_infinite": r.c_infinite,
                "margin": r.margin,
            }
            for r in report.records
        ],
        "config": _config_payload(cfg),
    }


def run(cfg: ExperimentConfig) -> None:
    """Execute a resolved config, writing all artifacts to its output_dir."""
    try:
        os.makedirs(cfg.output_dir, exist_ok=True)
        probe = os.path.join(cfg.output_dir, ".write_probe")
        with open(probe, "w", encoding="utf-8") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError(f"output dir {cfg.output_dir!r} is not writable: {exc}") from exc
    if cfg.experiment == "theorem1":
        _run_theorem(cfg)
    else:
        _run_traces(cfg)


def _emit_error(kind: str, exc: Exception) -> None:
    record = {"error": kind, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krylov-lab",
        description="Spread-complexity experiments with higher-order Krylov generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.add_argument("--conjugate-generator", action="store_true",
                       help="use the +i generator convention")

    p_val = sub.add_parser("validate", help="resolve and echo a config without running")
    p_val.add_argument("config", help="path to a key = value config file")

    p_thm = sub.add_parser("theorem1", help="run the non-optimality sweep directly")
    p_thm.add_argument("--dim", type=int, default=3)
    p_thm.add_argument("--trials", type=int, default=100)
    p_thm.add_argument("--seed", type=int, default=0)
    p_thm.add_argument("--tau-points", type=int, default=20)
    p_thm.add_argument("--output-dir", default="out")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = parse_config(args.config)
            for line in config_echo(cfg):
                print(line)
            return 0
        if args.command == "run":
            cfg = parse_config(args.config)
            if args.conjugate_generator and not cfg.conjugate_generator:
                cfg = ExperimentConfig(
                    **{**{f.name: getattr(cfg, f.name) for f in fields(cfg)},
                       "conjugate_generator": True}
                )
            run(cfg)
            return 0
        if args.command == "theorem1":
            merged = dict(_DEFAULTS["theorem1"], experiment="theorem1",
                          dim=args.dim, seed=args.seed, trials=args.trials,
                          tau_points=args.tau_points, output_dir=args.output_dir)
            run(ExperimentConfig(**merged))
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        _emit_error("config", exc)
        return 2
    except OSError as exc:
        _emit_error("config", exc)
        return 2
    except (NumericError, np.linalg.LinAlgError, ArithmeticError) as exc:
        _emit_error("numeric", exc)
        return 3
    except (ValueError, KrylovLabError) as exc:
        _emit_error("numeric", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
