"""Command-line front end.

Subcommands map onto the library modules: ``tradeoff`` and ``fig2``
evaluate the protocol comparison, ``fidelity`` the weak-pulse error
budget, ``statevec-check`` the exact statevector pipeline, ``window``
and ``fig3`` the coherence-window rates.  Results are emitted as CSV
(default) or JSON with a run manifest next to every output file, and
identical configuration plus seed always reproduces byte-identical
output.

Configuration can come from flags, from a JSON document passed via
``--config``, or both; explicit flags win over the document, which wins
over built-in defaults.  The document layout is::

    {
      "command": "fig3",            # optional, must match the subcommand
      "format": "csv",              # or "json"
      "output_path": "rates.csv",   # optional, else stdout
      "seed": 7,                    # optional
      "parameters": {"n": 8, "distances_km": [0, 50, 100]}
    }

Exit status: 0 on success, 2 for an invalid configuration (a JSON error
record with field-level diagnostics goes to stderr), 3 for a window too
short to ever succeed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .efficiency import EfficiencyModel
from .imperfections import (
    WcpSource,
    fidelity_estimate,
    fidelity_lower_bound,
    herald_probability,
    single_photon_fraction,
    wcp_amplitudes,
)
from .statevector import TargetState, apply_corrections, run_ideal_protocol, state_fidelity
from .tradeoff import success_probability_comparison, sweep_figure2
from .windowing import (
    DEFAULT_MC_SUCCESS_BUDGET,
    InfeasibleWindowError,
    analytic_single_batch_rate,
    asymptotic_rate,
    attempt_success_probability,
    choose_method,
    fig3_experiment,
    figure3_sweep,
    simulate_window_rate,
)

COMMANDS = ("tradeoff", "fidelity", "statevec-check", "window", "fig2", "fig3")
FORMATS = ("csv", "json")

# commands whose results depend on the random seed
_SEEDED = frozenset({"statevec-check", "window", "fig3"})

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_INFEASIBLE = 3


class ConfigError(Exception):
    """Invalid configuration; carries field-level diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(d["message"] for d in diagnostics))
        self.diagnostics = list(diagnostics)

    @classmethod
    def single(cls, fieldname: str, message: str) -> "ConfigError":
        return cls([{"field": fieldname, "message": message}])


@dataclass
class ExperimentConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    format: str = "csv"
    output_path: str | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError.single(
                "command", f"unknown command {self.command!r}; expected one of {COMMANDS}"
            )
        if self.format not in FORMATS:
            raise ConfigError.single(
                "format", f"unknown format {self.format!r}; expected one of {FORMATS}"
            )


def _as_float(value) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number, got a boolean")
    return float(value)


def _as_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer, got a boolean")
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"expected an integer, got {value!r}")
    if isinstance(value, str):
        return int(value, 10)
    return int(value)


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise ValueError(f"expected true or false, got {value!r}")


def _as_float_list(value) -> list[float]:
    if isinstance(value, str):
        parts = [part for part in value.split(",") if part.strip()]
        result = [float(part) for part in parts]
    elif isinstance(value, (list, tuple)):
        result = [_as_float(item) for item in value]
    else:
        raise ValueError(f"expected a comma-separated list or array, got {value!r}")
    if not result:
        raise ValueError("list must not be empty")
    return result


def _as_str(value) -> str:
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {value!r}")
    return value


# parameter name -> (converter, default); None defaults are resolved by
# the command runner (they depend on other parameters)
_PARAMETERS: dict[str, dict] = {
    "tradeoff": {
        "eta_t": (_as_float, 1.0),
        "eta_0": (_as_float, 0.9),
        "eta_1": (_as_float, 0.81),
        "eta_d": (_as_float, 0.9),
        "eta_s": (_as_float, 0.9),
        "intensity": (_as_float, 0.1),
        "regime": (_as_str, "b"),
        "sweep_parameter": (_as_float, 38.0),
    },
    "fidelity": {
        "n": (_as_int, 1),
        "eta_t": (_as_float, 1.0),
        "eta_0": (_as_float, 0.9),
        "eta_1": (_as_float, 0.81),
        "eta_d": (_as_float, 0.9),
        "wcp_intensity": (_as_float, 0.01),
        "epsilon": (_as_float, 0.0),
    },
    "statevec-check": {
        "n": (_as_int, 4),
        "trials": (_as_int, 20),
    },
    "window": {
        "n": (_as_int, 2),
        "k": (_as_int, 1),
        "q": (_as_int, 2),
        "w0": (_as_int, 2000),
        "time_bin_s": (_as_float, 30e-9),
        "distance_km": (_as_float, 0.0),
        "cooperativity": (_as_float, 38.0),
        "eta_0": (_as_float, 0.9),
        "eta_d": (_as_float, 0.9),
        "eta_t_intrinsic": (_as_float, 0.9),
        "trajectories": (_as_int, 1000),
        "mc_success_budget": (_as_int, DEFAULT_MC_SUCCESS_BUDGET),
    },
    "fig2": {
        "regime": (_as_str, "a"),
        "values": (_as_float_list, None),
        "reference_success": (_as_float, 0.01),
    },
    "fig3": {
        "n": (_as_int, 8),
        "w0": (_as_int, 2000),
        "distances_km": (_as_float_list, None),
        "cooperativity": (_as_float, 38.0),
        "eta_0": (_as_float, 0.9),
        "eta_d": (_as_float, 0.9),
        "eta_t_intrinsic": (_as_float, 0.9),
        "time_bin_s": (_as_float, 30e-9),
        "trajectories": (_as_int, 1000),
        "include_dc": (_as_bool, True),
        "mc_success_budget": (_as_int, DEFAULT_MC_SUCCESS_BUDGET),
    },
}

_BOOL_PARAMS = frozenset({"include_dc"})


def parse_config(text: str) -> ExperimentConfig:
    """Parse a configuration document (see the module docstring)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError.single("", f"configuration is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError.single("", "configuration must be a JSON object")
    allowed = {"command", "parameters", "format", "output_path", "seed"}
    diagnostics = [
        {"field": key, "message": f"unknown configuration key {key!r}"}
        for key in raw
        if key not in allowed
    ]
    if diagnostics:
        raise ConfigError(diagnostics)
    parameters = raw.get("parameters", {})
    if not isinstance(parameters, dict):
        raise ConfigError.single("parameters", "parameters must be a JSON object")
    seed = raw.get("seed")
    if seed is not None:
        seed = _as_int(seed)
    return ExperimentConfig(
        command=raw.get("command", ""),
        parameters=dict(parameters),
        format=raw.get("format", "csv"),
        output_path=raw.get("output_path"),
        seed=seed,
    )


def _resolve_parameters(command: str, config_params: dict, cli_params: dict) -> dict:
    """Merge config-document and flag values over the defaults.

    Every value passes through its converter so diagnostics carry the
    offending field name regardless of where the value came from.
    """
    spec = _PARAMETERS[command]
    diagnostics = []
    for key in config_params:
        if key not in spec:
            diagnostics.append(
                {"field": key, "message": f"unknown parameter {key!r} for {command}"}
            )
    resolved = {}
    for name, (convert, default) in spec.items():
        source = None
        if cli_params.get(name) is not None:
            source = cli_params[name]
        elif name in config_params:
            source = config_params[name]
        if source is None:
            resolved[name] = default
            continue
        try:
            resolved[name] = convert(source)
        except (ValueError, TypeError) as exc:
            diagnostics.append({"field": name, "message": str(exc)})
    if diagnostics:
        raise ConfigError(diagnostics)
    return resolved


def _run_tradeoff(params: dict, seed: int):
    model = EfficiencyModel(
        params["eta_t"], params["eta_0"], params["eta_1"], params["eta_d"], n=1
    )
    points = success_probability_comparison(
        model,
        params["eta_s"],
        params["regime"],
        params["sweep_parameter"],
        intensity=params["intensity"],
    )
    rows = [
        {
            "protocol": pt.protocol,
            "success_probability": pt.P,
            "regime": pt.regime,
            "sweep_parameter": pt.sweep_parameter,
        }
        for pt in points
    ]
    return rows, ["protocol", "success_probability", "regime", "sweep_parameter"]


def _run_fidelity(params: dict, seed: int):
    model = EfficiencyModel(
        params["eta_t"],
        params["eta_0"],
        params["eta_1"],
        params["eta_d"],
        n=params["n"],
    )
    source = WcpSource(math.sqrt(params["wcp_intensity"]))
    pulse = wcp_amplitudes(source, params["epsilon"])
    row = {
        "n": params["n"],
        "eta_t": params["eta_t"],
        "eta_0": params["eta_0"],
        "eta_1": params["eta_1"],
        "eta_d": params["eta_d"],
        "wcp_intensity": params["wcp_intensity"],
        "epsilon": params["epsilon"],
        "single_photon_weight": pulse.p1,
        "two_photon_weight": pulse.p2,
        "herald_probability": herald_probability(pulse, model),
        "single_photon_fraction": single_photon_fraction(pulse, model),
        "fidelity_lower_bound": fidelity_lower_bound(pulse, model),
        "fidelity_estimate": fidelity_estimate(pulse, model),
    }
    return [row], list(row.keys())


def _run_statevec_check(params: dict, seed: int):
    n, trials = params["n"], params["trials"]
    rng = np.random.default_rng(seed)
    model = EfficiencyModel.lossless(n)
    worst = 0.0
    for _ in range(trials):
        target = TargetState(n, rng.uniform(0.0, 2.0 * math.pi, size=n))
        reference = target.statevector()
        for outcome in run_ideal_protocol(model, target):
            corrected = apply_corrections(outcome)
            worst = max(worst, 1.0 - state_fidelity(corrected, reference))
    row = {"n": n, "trials": trials, "seed": seed, "max_infidelity": worst}
    return [row], list(row.keys())


def _rate_row(exp, budget: int) -> dict:
    p = attempt_success_probability(exp)
    method = choose_method(p, exp.q, exp.window, exp.trajectories, budget)
    if method == "analytic-q1":
        result = analytic_single_batch_rate(exp)
    elif method == "monte-carlo":
        result = simulate_window_rate(exp)
    else:
        result = asymptotic_rate(exp)
    return {
        "distance_km": exp.distance.length_km,
        "k": exp.k,
        "q": exp.q,
        "method": result.method,
        "rate_hz": result.rate_hz,
        "stderr": result.stderr,
        "mean_trials": result.mean_trials,
        "seed": exp.seed,
        "protocol": "R",
    }


_RATE_COLUMNS = [
    "distance_km",
    "k",
    "q",
    "method",
    "rate_hz",
    "stderr",
    "mean_trials",
    "seed",
    "protocol",
]


def _run_window(params: dict, seed: int):
    exp = fig3_experiment(
        params["n"],
        params["k"],
        params["q"],
        params["distance_km"],
        w0=params["w0"],
        time_bin_s=params["time_bin_s"],
        cooperativity=params["cooperativity"],
        eta_0=params["eta_0"],
        eta_d=params["eta_d"],
        eta_t_intrinsic=params["eta_t_intrinsic"],
        trajectories=params["trajectories"],
        seed=seed,
    )
    return [_rate_row(exp, params["mc_success_budget"])], _RATE_COLUMNS


def _run_fig2(params: dict, seed: int):
    values = params["values"]
    if values is None:
        if params["regime"] in ("a", "routing-limited"):
            values = [round(0.05 * i, 2) for i in range(1, 20)]
        else:
            values = [float(c) for c in np.logspace(-1, 4, 11)]
        params["values"] = values
    points = sweep_figure2(params["regime"], values, params["reference_success"])
    rows = [
        {
            "regime": pt.regime,
            "sweep_parameter": pt.sweep_parameter,
            "protocol": pt.protocol,
            "P": pt.P,
            "F": pt.F,
            "merit": pt.merit(),
        }
        for pt in points
    ]
    return rows, ["regime", "sweep_parameter", "protocol", "P", "F", "merit"]


def _run_fig3(params: dict, seed: int):
    distances = params["distances_km"]
    if distances is None:
        distances = [float(25 * i) for i in range(0, 13)]
        params["distances_km"] = distances
    rows = figure3_sweep(
        params["n"],
        params["w0"],
        distances,
        time_bin_s=params["time_bin_s"],
        cooperativity=params["cooperativity"],
        eta_0=params["eta_0"],
        eta_d=params["eta_d"],
        eta_t_intrinsic=params["eta_t_intrinsic"],
        trajectories=params["trajectories"],
        seed=seed,
        include_dc=params["include_dc"],
        mc_success_budget=params["mc_success_budget"],
    )
    return rows, _RATE_COLUMNS


_RUNNERS = {
    "tradeoff": _run_tradeoff,
    "fidelity": _run_fidelity,
    "statevec-check": _run_statevec_check,
    "window": _run_window,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def render_csv(rows, columns) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[col]) for col in columns))
    return "\n".join(lines) + "\n"


def _json_safe(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render_json(rows, columns) -> str:
    payload = {
        "columns": list(columns),
        "rows": [{col: _json_safe(row[col]) for col in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    handle, tmp_path = tempfile.mkstemp(dir=directory, prefix=".rrsp-", suffix=".part")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as tmp:
            tmp.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        os.unlink(tmp_path)
        raise


def _emit(config: ExperimentConfig, rows, columns, seed, duration_s: float) -> None:
    render = render_csv if config.format == "csv" else render_json
    text = render(rows, columns)
    if config.output_path is None:
        sys.stdout.write(text)
        return
    _write_atomic(config.output_path, text)
    manifest = {
        "config": {
            "command": config.command,
            "parameters": config.parameters,
            "format": config.format,
            "output_path": config.output_path,
            "seed": seed,
        },
        "version": __version__,
        "seed": seed,
        "duration_s": duration_s,
        "row_count": len(rows),
    }
    _write_atomic(
        config.output_path + ".manifest.json", json.dumps(manifest, indent=2) + "\n"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rrsp",
        description="Reflection-based remote state preparation toolkit.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", help="path to a JSON configuration document")
        sub.add_argument("--seed", type=int, help="random seed (64-bit)")
        sub.add_argument("--out", help="output file path (default: stdout)")
        sub.add_argument("--format", choices=FORMATS, help="output format")
        for name in _PARAMETERS[command]:
            flag = "--" + name.replace("_", "-")
            if name in _BOOL_PARAMS:
                sub.add_argument(flag, dest=name, action=argparse.BooleanOptionalAction)
            else:
                sub.add_argument(flag, dest=name)
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError.single("config", f"cannot read config file: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError.single("", f"configuration is not valid JSON: {exc}") from exc
        if isinstance(raw, dict) and "command" not in raw:
            # document without an explicit command: adopt the subcommand
            raw = {**raw, "command": args.command}
        config = parse_config(json.dumps(raw))
        if config.command != args.command:
            raise ConfigError.single(
                "command",
                f"config document is for {config.command!r}, "
                f"but the {args.command!r} subcommand was invoked",
            )
    else:
        config = ExperimentConfig(command=args.command)
    cli_params = {name: getattr(args, name) for name in _PARAMETERS[args.command]}
    config.parameters = _resolve_parameters(
        args.command, config.parameters, cli_params
    )
    if args.format is not None:
        config.format = args.format
    if args.out is not None:
        config.output_path = args.out
    if args.seed is not None:
        config.seed = args.seed
    if config.seed is not None and not 0 <= config.seed < 2**64:
        raise ConfigError.single("seed", f"seed must fit in 64 bits, got {config.seed}")
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        record = {"error": "invalid-config", "diagnostics": exc.diagnostics}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_INVALID_CONFIG
    seed = config.seed if config.command in _SEEDED else None
    if config.command in _SEEDED and seed is None:
        seed = 0
        config.seed = 0
    started = time.monotonic()
    try:
        rows, columns = _RUNNERS[config.command](config.parameters, seed)
    except InfeasibleWindowError as exc:
        record = {"error": "infeasible-window", "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, TypeError) as exc:
        record = {
            "error": "invalid-config",
            "diagnostics": [{"field": "", "message": str(exc)}],
        }
        print(json.dumps(record), file=sys.stderr)
        return EXIT_INVALID_CONFIG
    duration_s = time.monotonic() - started
    _emit(config, rows, columns, seed, duration_s)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
