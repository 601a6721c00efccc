#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Scenario files: a Hamiltonian, an initial operator, a time grid and outputs.

A scenario is JSON of the form::

    {
      "name": "two-spin-zz",
      "n_spins": 2,
      "J": "1/2",
      "parameters": {"nu": 1.0},
      "hamiltonian": "pi*nu*2*I1z*I2z",
      "initial_state": "I1x",
      "times": {"start": 0, "stop": "1/(2*nu)", "step": "1/(40*nu)"},
      "equation": "full",
      "propagator": "generator",
      "outputs": [{"kind": "coefficients"}, {"kind": "signal", "params": {"probe": "I1x"}}]
    }

Operator specs are expressions, ``{term: coefficient}`` mappings or
``{"matrix_file": "op.json"}``. Numbers may be expressions over the
parameters.
"""

from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..angular import half, twice
from ..config import RunConfig
from ..evolve import OracleReport, Trajectory, build_generator, propagate, propagate_rk4, signal
from ..exceptions import ExpressionError, MoyalSpinError, ScenarioError
from ..spin_ops import SpinOperator, entanglement_entropy, evolve_exact
from ..star import eom_rhs_natural
from ..wigner import inverse_wigner, wigner_transform
from .export import CsvTableExporter, JsonExporter, export
from .expressions import operator_from_spec, parse_scalar
from .props import props_decompose, sample_surface

logger = logging.getLogger(__name__)

__all__ = [
    "OUTPUT_KINDS",
    "BUILTIN_SCENARIOS",
    "OutputSpec",
    "Scenario",
    "ScenarioRun",
    "load_scenario",
    "scenario_from_dict",
    "run_scenario",
    "evolve_scenario",
]

OUTPUT_KINDS = ("coefficients", "oracle_dev", "surface", "entropy", "signal")
EQUATIONS = ("full", "natural")
PROPAGATORS = ("generator", "rk4")
SURFACE_MODES = ("props", "marginal", "fixed")

BUILTIN_SCENARIOS: Dict[str, dict] = {
    "single-precession": {
        "name": "single-precession",
        "description": "One spin precessing about z: H = omega I_z, rho(0) = I_x.",
        "n_spins": 1,
        "parameters": {"omega": 1.0},
        "hamiltonian": "omega*I1z",
        "initial_state": "I1x",
        "times": {"start": 0, "stop": "2*pi/omega", "step": "pi/(8*omega)"},
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "surface", "params": {"format": "csv"}},
        ],
    },
    "two-spin-zz": {
        "name": "two-spin-zz",
        "description": "Two spins under scalar ZZ coupling: H = pi nu 2 I1z I2z, rho(0) = I1x.",
        "n_spins": 2,
        "parameters": {"nu": 1.0},
        "hamiltonian": "pi*nu*2*I1z*I2z",
        "initial_state": "I1x",
        "times": {"start": 0, "stop": "1/(2*nu)", "step": "1/(40*nu)"},
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "signal", "params": {"probe": "I1x"}},
            {"kind": "surface", "params": {"mode": "props"}},
        ],
    },
    "cnot": {
        "name": "cnot",
        "description": "CNOT gate Hamiltonian acting on |beta alpha><beta alpha|.",
        "n_spins": 2,
        "parameters": {"omega": 1.0},
        "hamiltonian": "omega*(I1b*I2x + I1z/2)",
        "initial_state": "I1b*I2a",
        "times": {"start": 0, "stop": "pi/omega", "step": "pi/(16*omega)"},
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "surface", "params": {"mode": "props"}},
        ],
    },
    "cnot-bell": {
        "name": "cnot-bell",
        "description": "CNOT on (1/2 + I1x) I2a, producing a Bell state at t = pi/omega.",
        "n_spins": 2,
        "parameters": {"omega": 1.0},
        "hamiltonian": "omega*(I1b*I2x + I1z/2)",
        "initial_state": "(E/2 + I1x)*I2a",
        "times": {"start": 0, "stop": "pi/omega", "step": "pi/(16*omega)"},
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "entropy", "params": {"subsystem": [1]}},
            {"kind": "surface", "params": {"mode": "props"}},
        ],
    },
    "three-spin": {
        "name": "three-spin",
        "description": "Linear chain of three spins; I2x evolves into -4 I1z I2x I3z.",
        "n_spins": 3,
        "parameters": {"nu": 1.0},
        "hamiltonian": "pi*nu*(2*I1z*I2z + 2*I2z*I3z)",
        "initial_state": "I2x",
        "times": {"start": 0, "stop": "1/(2*nu)", "step": "1/(40*nu)"},
        "equation": "natural",
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "signal", "params": {"probe": "I2x"}},
        ],
    },
    "coherence": {
        "name": "coherence",
        "description": "Non-hermitian coherence I- under omega I_z picks up the phase exp(i omega t).",
        "n_spins": 1,
        "parameters": {"omega": 1.0},
        "hamiltonian": "omega*I1z",
        "initial_state": "I1m",
        "times": {"start": 0, "stop": "2*pi/omega", "step": "pi/(10*omega)"},
        "outputs": [
            {"kind": "coefficients"},
            {"kind": "oracle_dev"},
            {"kind": "signal", "params": {"probe": "I1m"}},
            {"kind": "surface", "params": {"format": "obj"}},
        ],
    },
}


@dataclass
class OutputSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Scenario:
    """Parsed scenario; operator specs are kept as written and resolved on demand."""

    name: str
    n_spins: int
    hamiltonian: Any
    initial_state: Any
    times: Dict[str, Any]
    outputs: List[OutputSpec] = field(default_factory=list)
    spin_twice: int = 1
    parameters: Dict[str, float] = field(default_factory=dict)
    equation: str = "full"
    propagator: str = "generator"
    description: str = ""
    base_dir: Optional[Path] = None
    source: Optional[str] = None

    @property
    def spin_J(self) -> Fraction:
        return half(self.spin_twice)

    def _line_of(self, key: str) -> Optional[int]:
        if self.source is None:
            return None
        return _line_of(self.source, key)

    def _operator(self, spec, field_name: str) -> SpinOperator:
        try:
            if isinstance(spec, dict) and "matrix_file" in spec:
                path = Path(spec["matrix_file"])
                if not path.is_absolute() and self.base_dir is not None:
                    path = self.base_dir / path
                op = SpinOperator.load(path)
                if op.n_spins != self.n_spins or op.spin_twice != self.spin_twice:
                    raise ScenarioError(
                        f"matrix file describes {op.n_spins} spins J={op.spin_J}",
                        field_name,
                        self._line_of(field_name),
                    )
                return op
            return operator_from_spec(spec, self.n_spins, self.spin_J, self.parameters)
        except ScenarioError:
            raise
        except (ExpressionError, MoyalSpinError, OSError, KeyError, ValueError) as e:
            raise ScenarioError(str(e), field_name, self._line_of(field_name)) from e

    def hamiltonian_op(self) -> SpinOperator:
        return self._operator(self.hamiltonian, "hamiltonian")

    def initial_op(self) -> SpinOperator:
        return self._operator(self.initial_state, "initial_state")

    def scalar(self, value, field_name: str) -> float:
        try:
            return parse_scalar(value, self.parameters)
        except (ExpressionError, ValueError) as e:
            raise ScenarioError(str(e), field_name, self._line_of(field_name.split(".")[-1])) from e

    def time_grid(self) -> List[float]:
        """``start, start + step, ...`` up to and including ``stop``."""
        start = self.scalar(self.times.get("start", 0), "times.start")
        stop = self.scalar(self.times.get("stop", start), "times.stop")
        step = self.scalar(self.times.get("step", 1.0), "times.step")
        if not step > 0:
            raise ScenarioError(f"step must be positive, got {step}", "times.step", self._line_of("step"))
        if stop < start:
            raise ScenarioError(f"stop {stop} lies before start {start}", "times.stop", self._line_of("stop"))
        n_steps = int(math.floor((stop - start) / step + 1e-9))
        times = [start + k * step for k in range(n_steps + 1)]
        if stop - times[-1] > 1e-9 * step:
            times.append(stop)
        else:
            times[-1] = stop
        return times


@dataclass
class ScenarioRun:
    """What :func:`run_scenario` produced."""

    scenario: Scenario
    trajectory: Trajectory
    files: List[Path] = field(default_factory=list)
    oracle_report: Optional[OracleReport] = None
    oracle_tolerance: float = 0.0

    @property
    def passed(self) -> bool:
        return self.oracle_report is None or self.oracle_report.passed(self.oracle_tolerance)


def _line_of(text: str, key: str) -> Optional[int]:
    position = text.find(f'"{key}"')
    if position < 0:
        return None
    return text.count("\n", 0, position) + 1


def _require(payload: dict, key: str, source: Optional[str]):
    if key not in payload:
        raise ScenarioError("missing required field", key, _line_of(source, key) if source else None)
    return payload[key]


def scenario_from_dict(payload: dict, source: Optional[str] = None, base_dir: Optional[Path] = None) -> Scenario:
    """Validate a scenario mapping.

    Raises:
        ScenarioError: Naming the field (and line, when ``source`` is given) at fault.
    """

    def line(key: str) -> Optional[int]:
        return _line_of(source, key) if source else None

    if not isinstance(payload, dict):
        raise ScenarioError("scenario must be a JSON object", None, 1 if source else None)
    name = str(payload.get("name", "scenario"))
    n_spins = _require(payload, "n_spins", source)
    if not isinstance(n_spins, int) or isinstance(n_spins, bool) or n_spins < 1:
        raise ScenarioError(f"must be a positive integer, got {n_spins!r}", "n_spins", line("n_spins"))
    try:
        spin_twice = twice(payload.get("J", Fraction(1, 2)))
    except (ValueError, TypeError) as e:
        raise ScenarioError(f"must be an integer or half-integer, got {payload.get('J')!r}", "J", line("J")) from e
    parameters = payload.get("parameters", {})
    if not isinstance(parameters, dict) or not all(isinstance(v, (int, float)) for v in parameters.values()):
        raise ScenarioError("must map names to numbers", "parameters", line("parameters"))
    times = _require(payload, "times", source)
    if not isinstance(times, dict):
        raise ScenarioError("must be an object with start, stop and step", "times", line("times"))
    equation = payload.get("equation", "full")
    if equation not in EQUATIONS:
        raise ScenarioError(f"must be one of {EQUATIONS}, got {equation!r}", "equation", line("equation"))
    propagator = payload.get("propagator", "generator")
    if propagator not in PROPAGATORS:
        raise ScenarioError(f"must be one of {PROPAGATORS}, got {propagator!r}", "propagator", line("propagator"))
    if spin_twice != 1 and (n_spins != 1 or equation != "full"):
        raise ScenarioError("spins other than 1/2 are limited to one spin and the full equation", "J", line("J"))

    outputs = []
    raw_outputs = payload.get("outputs", [])
    if not isinstance(raw_outputs, list):
        raise ScenarioError("must be a list", "outputs", line("outputs"))
    for position, raw in enumerate(raw_outputs):
        field_name = f"outputs[{position}]"
        if not isinstance(raw, dict) or "kind" not in raw:
            raise ScenarioError("each output needs a 'kind'", field_name, line("outputs"))
        if raw["kind"] not in OUTPUT_KINDS:
            raise ScenarioError(
                f"unknown kind {raw['kind']!r}; expected one of {OUTPUT_KINDS}", f"{field_name}.kind", line(raw["kind"])
            )
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ScenarioError("must be an object", f"{field_name}.params", line("params"))
        outputs.append(OutputSpec(raw["kind"], dict(params)))

    scenario = Scenario(
        name=name,
        n_spins=n_spins,
        hamiltonian=_require(payload, "hamiltonian", source),
        initial_state=_require(payload, "initial_state", source),
        times=dict(times),
        outputs=outputs,
        spin_twice=spin_twice,
        parameters={key: float(value) for key, value in parameters.items()},
        equation=equation,
        propagator=propagator,
        description=str(payload.get("description", "")),
        base_dir=base_dir,
        source=source,
    )
    # resolve eagerly so that errors surface at load time
    scenario.time_grid()
    scenario.hamiltonian_op()
    scenario.initial_op()
    return scenario


def load_scenario(source: Union[str, Path]) -> Scenario:
    """Load a built-in scenario by name or a scenario JSON file."""
    if str(source) in BUILTIN_SCENARIOS:
        return scenario_from_dict(copy.deepcopy(BUILTIN_SCENARIOS[str(source)]))
    path = Path(source)
    if not path.exists():
        raise ScenarioError(f"no built-in scenario or file named {str(source)!r}")
    print(f"Loading scenario from {path}")
    text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg}", None, e.lineno) from e
    return scenario_from_dict(payload, text, path.parent)


def evolve_scenario(scenario: Scenario, W_H, W_0, times: List[float]) -> Trajectory:
    rhs = eom_rhs_natural if scenario.equation == "natural" else None
    if scenario.propagator == "generator":
        return propagate(build_generator(W_H, rhs), W_0, times)
    dt = float(times[1] - times[0]) / 10 if len(times) > 1 else 1.0
    states = [W_0]
    state = W_0
    for earlier, later in zip(times, times[1:]):
        state = propagate_rk4(W_H, state, later - earlier, dt, rhs).final()
        states.append(state)
    return Trajectory(list(times), states)


def _time_index(scenario: Scenario, trajectory: Trajectory, params: dict) -> int:
    if "t" not in params:
        return len(trajectory) - 1
    t = scenario.scalar(params["t"], "outputs.params.t")
    return int(np.argmin(np.abs(np.asarray(trajectory.times) - t)))


def _write_surfaces(scenario: Scenario, trajectory: Trajectory, params: dict, out_dir: Path, config: RunConfig) -> List[Path]:
    mode = params.get("mode", "props" if scenario.n_spins > 1 else "marginal")
    if mode not in SURFACE_MODES:
        raise ScenarioError(f"surface mode must be one of {SURFACE_MODES}, got {mode!r}", "outputs.params.mode")
    fmt = params.get("format", "csv")
    resolution = int(params.get("resolution", config.resolution))
    index = _time_index(scenario, trajectory, params)
    state = trajectory.states[index]
    slots = params.get("slots", list(range(1, scenario.n_spins + 1)))
    files = []
    if mode == "props" and scenario.spin_twice == 1:
        for term_id, term in enumerate(props_decompose(state)):
            for slot in slots:
                surface = sample_surface(term, slot, resolution, decomposition_id=term_id, num_workers=config.threads)
                path = out_dir / f"{scenario.name}_surface_t{index}_term{term_id}_spin{slot}.{fmt}"
                files.append(export(surface, path, fmt, config.float_digits))
        return files
    fixed = None
    if mode == "fixed":
        fixed = params.get("fixed_angles")
        if fixed is None:
            rng = np.random.default_rng(config.seed)
            fixed = [(float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * math.pi))) for _ in range(scenario.n_spins - 1)]
    for slot in slots:
        surface = sample_surface(state, slot, resolution, fixed_angles=fixed, num_workers=config.threads)
        label = "fixed" if fixed is not None else "marginal"
        path = out_dir / f"{scenario.name}_surface_t{index}_{label}_spin{slot}.{fmt}"
        files.append(export(surface, path, fmt, config.float_digits))
    return files


def run_scenario(scenario: Scenario, out_dir: Union[str, Path, None] = None, config: Optional[RunConfig] = None) -> ScenarioRun:
    """Evolve a scenario and write every requested output under ``out_dir``.

    Args:
        scenario: Parsed scenario.
        out_dir: Output directory; defaults to ``config.out_dir``.
        config: Run settings (resolution, seed, tolerances, threads).

    Returns:
        ScenarioRun with the trajectory, written files and, when requested,
        the oracle comparison.
    """
    config = config or RunConfig()
    out_dir = Path(out_dir or config.out_dir)
    times = scenario.time_grid()
    H = scenario.hamiltonian_op()
    rho0 = scenario.initial_op()
    W_H = wigner_transform(H)
    W_0 = wigner_transform(rho0)
    logger.info("Running scenario %s: %d spin(s), %d time points", scenario.name, scenario.n_spins, len(times))
    trajectory = evolve_scenario(scenario, W_H, W_0, times)
    run = ScenarioRun(scenario, trajectory, oracle_tolerance=config.oracle_tolerance)

    prefix = out_dir / scenario.name
    for output in scenario.outputs:
        params = output.params
        if output.kind == "coefficients":
            run.files.append(JsonExporter(f"{prefix}_coefficients.json", config.float_digits).export(trajectory))
        elif output.kind == "oracle_dev":
            oracle_states = [evolve_exact(H, rho0, t) for t in trajectory.times]
            deviations = [
                state.max_abs_diff(wigner_transform(oracle)) for state, oracle in zip(trajectory.states, oracle_states)
            ]
            run.oracle_report = OracleReport(list(trajectory.times), deviations, trajectory, oracle_states)
            payload = run.oracle_report.to_json()
            payload.update({"tolerance": config.oracle_tolerance, "passed": run.passed})
            run.files.append(JsonExporter(f"{prefix}_oracle_dev.json", config.float_digits).export(payload))
        elif output.kind == "entropy":
            subsystem = params.get("subsystem", [1])
            rows = [
                (float(t), entanglement_entropy(inverse_wigner(state), subsystem))
                for t, state in zip(trajectory.times, trajectory.states)
            ]
            run.files.append(CsvTableExporter(f"{prefix}_entropy.csv", ["t", "entropy_bits"], config.float_digits).export(rows))
        elif output.kind == "signal":
            probe_op = scenario._operator(params.get("probe", scenario.initial_state), "outputs.params.probe")
            probe = wigner_transform(probe_op)
            rows = [(float(t), float(v.real), float(v.imag)) for t, v in zip(trajectory.times, signal(trajectory, probe))]
            run.files.append(CsvTableExporter(f"{prefix}_signal.csv", ["t", "re", "im"], config.float_digits).export(rows))
        elif output.kind == "surface":
            run.files.extend(_write_surfaces(scenario, trajectory, params, out_dir, config))
    if not scenario.outputs:
        logger.info("Scenario %s requested no outputs", scenario.name)
    for path in run.files:
        print(f"  wrote {path}")
    return run
