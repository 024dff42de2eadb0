"""Experiment configuration: one JSON document, strictly validated.

Unknown fields are rejected with a dotted field path; JSON syntax errors are
reported with their line and column.  Tolerance defaults live here so every
threshold the tool applies is inspectable and overridable.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

import numpy as np

from . import dynamics, states
from .errors import ConfigError

GENERATOR_KINDS = ("nonentangling", "entangling")
TASKS = ("verify", "fisher", "solve", "simulate", "scaling")
STATE_KINDS = ("optimal_single_tensor", "cat", "two_qubit_entangling", "bloch", "file")
READOUT_KINDS = ("product_pm",)
OUTPUT_FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Tolerances:
    """Every threshold applied by the tool, with its default."""

    kernel_tol: float = 1e-10
    sld_residual: float = 1e-8
    saturation: float = 1e-8
    solution_residual: float = 1e-7
    psd_min_eigenvalue: float = -1e-9
    probability_floor: float = 1e-12

    @staticmethod
    def from_mapping(raw: Mapping[str, Any] | None) -> "Tolerances":
        if raw is None:
            return Tolerances()
        known = {f.name for f in fields(Tolerances)}
        for key in raw:
            if key not in known:
                raise ConfigError(f"config.tolerances: unknown field {key!r}")
            if not isinstance(raw[key], (int, float)) or isinstance(raw[key], bool):
                raise ConfigError(f"config.tolerances.{key}: expected a number")
        return Tolerances(**{k: float(v) for k, v in raw.items()})


@dataclass(frozen=True)
class SolverOptions:
    n_starts: int = 64
    max_evals: int = 5000
    simplex_tol: float = 1e-9
    penalty_weight: float = 1e4
    tie_tol: float = 1e-6
    mixed_states: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    n_qubits: int = 1
    max_qubits: int = 10
    generator: str = "nonentangling"
    state: dict | None = None
    readout: str = "product_pm"
    shots: int = 10**4
    trials: int = 500
    seed: int = 0
    x_true: float = 0.3
    n_list: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    solver: SolverOptions = SolverOptions()
    tolerances: Tolerances = Tolerances()
    output_format: str | None = None
    output_path: str | None = None
    filter: str | None = None
    raw: dict | None = None


_TOP_LEVEL_KEYS = {
    "task", "n_qubits", "max_qubits", "generator", "state", "readout", "shots",
    "trials", "seed", "x_true", "n_list", "solver", "tolerances", "output",
    "filter",
}

_STATE_KEYS = {
    "optimal_single_tensor": {"kind", "sign"},
    "cat": {"kind", "sign"},
    "two_qubit_entangling": {"kind", "c11", "c23", "c32"},
    "bloch": {"kind", "a", "b", "c"},
    "file": {"kind", "path"},
}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _check_int(value, path: str, minimum: int = 0) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{path}: expected an integer")
    _require(value >= minimum, f"{path}: must be >= {minimum}")
    return int(value)


def _check_number(value, path: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{path}: expected a number",
    )
    return float(value)


def parse_config_text(text: str, task: str | None = None) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    return parse_config(raw, task)


def parse_config(raw: Mapping[str, Any], task: str | None = None) -> ExperimentConfig:
    """Validate a parsed JSON document into an :class:`ExperimentConfig`.

    ``task`` (from the CLI subcommand) wins over a ``task`` field in the
    document; a conflicting explicit field is an error.
    """
    _require(isinstance(raw, dict), "config: expected a JSON object at the top level")
    for key in raw:
        _require(key in _TOP_LEVEL_KEYS, f"config: unknown field {key!r}")

    doc_task = raw.get("task")
    if doc_task is not None:
        _require(doc_task in TASKS, f"config.task: must be one of {TASKS}")
        _require(
            task is None or task == doc_task,
            f"config.task: {doc_task!r} conflicts with the {task!r} subcommand",
        )
    resolved_task = task or doc_task
    _require(resolved_task is not None, "config.task: missing (no subcommand context)")

    n_qubits = _check_int(raw.get("n_qubits", 1), "config.n_qubits", minimum=1)
    max_qubits = _check_int(raw.get("max_qubits", 10), "config.max_qubits", minimum=1)
    _require(
        n_qubits <= max_qubits,
        f"config.n_qubits: {n_qubits} exceeds the dimension cap of {max_qubits}",
    )

    generator = raw.get("generator", "nonentangling")
    _require(generator in GENERATOR_KINDS, f"config.generator: must be one of {GENERATOR_KINDS}")

    state = _normalize_state(raw.get("state"))

    readout = raw.get("readout", "product_pm")
    _require(readout in READOUT_KINDS, f"config.readout: must be one of {READOUT_KINDS}")

    shots = _check_int(raw.get("shots", 10**4), "config.shots", minimum=1)
    trials = _check_int(raw.get("trials", 500), "config.trials", minimum=1)
    seed = _check_int(raw.get("seed", 0), "config.seed", minimum=0)
    x_true = _check_number(raw.get("x_true", 0.3), "config.x_true")

    n_list_raw = raw.get("n_list", [1, 2, 3, 4, 5, 6])
    _require(isinstance(n_list_raw, list) and n_list_raw, "config.n_list: expected a nonempty list")
    n_list = tuple(_check_int(v, "config.n_list[*]", minimum=1) for v in n_list_raw)

    solver_opts = _normalize_solver(raw.get("solver"))
    tolerances = Tolerances.from_mapping(raw.get("tolerances"))

    output_format, output_path = _normalize_output(raw.get("output"))

    filt = raw.get("filter")
    _require(filt is None or isinstance(filt, str), "config.filter: expected a string")

    return ExperimentConfig(
        task=resolved_task,
        n_qubits=n_qubits,
        max_qubits=max_qubits,
        generator=generator,
        state=state,
        readout=readout,
        shots=shots,
        trials=trials,
        seed=seed,
        x_true=x_true,
        n_list=n_list,
        solver=solver_opts,
        tolerances=tolerances,
        output_format=output_format,
        output_path=output_path,
        filter=filt,
        raw=dict(raw),
    )


def _normalize_state(raw) -> dict | None:
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = {"kind": raw}
    _require(isinstance(raw, dict), "config.state: expected a string or an object")
    kind = raw.get("kind")
    _require(kind in _STATE_KEYS, f"config.state.kind: must be one of {STATE_KINDS}")
    for key in raw:
        _require(key in _STATE_KEYS[kind], f"config.state: unknown field {key!r} for kind {kind!r}")
    if "sign" in raw:
        _require(raw["sign"] in (1, -1), "config.state.sign: must be 1 or -1")
    if kind == "two_qubit_entangling":
        for key in ("c11", "c23", "c32"):
            _check_number(raw.get(key, 0.0), f"config.state.{key}")
    if kind == "bloch":
        _require("a" in raw, "config.state.a: required for bloch states")
    if kind == "file":
        _require(isinstance(raw.get("path"), str), "config.state.path: expected a string")
    return dict(raw)


def _normalize_solver(raw) -> SolverOptions:
    if raw is None:
        return SolverOptions()
    _require(isinstance(raw, dict), "config.solver: expected an object")
    known = {f.name for f in fields(SolverOptions)}
    for key in raw:
        _require(key in known, f"config.solver: unknown field {key!r}")
    opts = SolverOptions()
    updates: dict[str, Any] = {}
    for key, value in raw.items():
        if key in ("n_starts", "max_evals"):
            updates[key] = _check_int(value, f"config.solver.{key}", minimum=1)
        elif key == "mixed_states":
            _require(isinstance(value, bool), "config.solver.mixed_states: expected a boolean")
            updates[key] = value
        else:
            updates[key] = _check_number(value, f"config.solver.{key}")
    return replace(opts, **updates)


def _normalize_output(raw) -> tuple[str | None, str | None]:
    if raw is None:
        return None, None
    _require(isinstance(raw, dict), "config.output: expected an object")
    for key in raw:
        _require(key in ("format", "path"), f"config.output: unknown field {key!r}")
    fmt = raw.get("format")
    _require(fmt is None or fmt in OUTPUT_FORMATS, f"config.output.format: must be one of {OUTPUT_FORMATS}")
    path = raw.get("path")
    _require(path is None or isinstance(path, str), "config.output.path: expected a string")
    return fmt, path


# ---------------------------------------------------------------------------
# Builders from validated configs
# ---------------------------------------------------------------------------


def generator_from_config(cfg: ExperimentConfig, n: int | None = None) -> dynamics.Generator:
    n = cfg.n_qubits if n is None else n
    if cfg.generator == "entangling":
        return dynamics.entangling_generator(n, cap=cfg.max_qubits)
    return dynamics.nonentangling_generator(n, cap=cfg.max_qubits)


def basis_from_config(cfg: ExperimentConfig, n: int | None = None) -> dynamics.ReadoutBasis:
    return dynamics.product_pm_readout(cfg.n_qubits if n is None else n, cap=cfg.max_qubits)


def state_from_config(cfg: ExperimentConfig) -> states.DensityMatrix:
    spec = cfg.state or {"kind": "optimal_single_tensor"}
    kind = spec["kind"]
    n = cfg.n_qubits
    if kind == "optimal_single_tensor":
        single = states.optimal_single_qubit(int(spec.get("sign", 1)))
        return states.tensor_power(single, n, cap=cfg.max_qubits)
    if kind == "cat":
        return states.cat_state(n, int(spec.get("sign", 1)), cap=cfg.max_qubits)
    if kind == "two_qubit_entangling":
        _require(n == 2, "config.state: two_qubit_entangling requires n_qubits = 2")
        return states.two_qubit_entangling_candidate(
            float(spec.get("c11", 0.0)), float(spec.get("c23", 0.0)), float(spec.get("c32", 0.0))
        )
    if kind == "bloch":
        return states.from_bloch(spec["a"], spec.get("b"), spec.get("c"))
    if kind == "file":
        return _state_from_file(spec["path"], n)
    raise ConfigError(f"config.state.kind: unsupported kind {kind!r}")


def _state_from_file(path: str, n_qubits: int) -> states.DensityMatrix:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"config.state.path: cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config.state.path: {path!r} is not valid JSON "
            f"({exc.msg} at line {exc.lineno} column {exc.colno})"
        ) from exc
    for key in payload:
        _require(
            key in ("n_qubits", "matrix_real", "matrix_imag"),
            f"state file: unknown field {key!r}",
        )
    _require("matrix_real" in payload, "state file: matrix_real is required")
    real = np.asarray(payload["matrix_real"], dtype=float)
    imag = np.asarray(payload.get("matrix_imag", np.zeros_like(real)), dtype=float)
    _require(real.shape == imag.shape, "state file: real and imaginary shapes differ")
    matrix = real + 1j * imag
    rho = states.density_matrix(matrix)
    _require(
        rho.n_qubits == n_qubits,
        f"state file: {rho.n_qubits}-qubit state but config.n_qubits = {n_qubits}",
    )
    return rho


def tolerances_dict(tol: Tolerances) -> dict[str, float]:
    return asdict(tol)
