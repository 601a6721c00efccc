#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Time propagation of Wigner functions.

At fixed W_H the equation of motion is linear in W_rho, so it is a matrix
(the generator) acting on the flattened coefficient tensor. Unitary
dynamics makes that matrix anti-hermitian in the orthonormal product basis,
so propagation diagonalizes ``i G`` once and applies phases per time point.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import eigh, eigvals, expm
from tqdm import tqdm

from .angular import rank_pairs
from .config import COEFF_TOL
from .exceptions import ShapeMismatchError, TimeGridError, UnrepresentableRankError
from .spin_ops import BasisIndex, SpinOperator, evolve_exact
from .star import eom_rhs, eom_rhs_linear_J
from .wigner import WignerCoeffs, inner, wigner_transform

logger = logging.getLogger(__name__)

__all__ = [
    "Generator",
    "Trajectory",
    "OracleReport",
    "build_generator",
    "propagate",
    "propagate_rk4",
    "compare_with_oracle",
    "signal",
]

RhsFunction = Callable[[WignerCoeffs, WignerCoeffs], WignerCoeffs]


def _default_rhs(spin_twice: int) -> RhsFunction:
    return eom_rhs if spin_twice == 1 else eom_rhs_linear_J


@dataclass(frozen=True, eq=False)
class Generator:
    """Matrix form of ``W_rho -> dW_rho/dt`` on C-order flattened coefficients."""

    n_spins: int
    spin_twice: int
    matrix: np.ndarray
    basis_order: List[BasisIndex]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_rank(self) -> int:
        return self.spin_twice

    def apply(self, w: WignerCoeffs) -> WignerCoeffs:
        vector = self.flatten(w)
        return self.unflatten(self.matrix @ vector)

    def flatten(self, w: WignerCoeffs) -> np.ndarray:
        if w.n_spins != self.n_spins or w.spin_twice != self.spin_twice:
            raise ShapeMismatchError(
                f"state has {w.n_spins} spheres J={w.spin_J}, generator expects {self.n_spins} spheres"
            )
        rank = w.effective_rank()
        if rank > self.max_rank:
            raise UnrepresentableRankError(rank, w.spin_J)
        return w.with_rank(self.max_rank).data.reshape(-1)

    def unflatten(self, vector: np.ndarray) -> WignerCoeffs:
        side = (self.max_rank + 1) ** 2
        return WignerCoeffs(self.n_spins, self.spin_twice, np.asarray(vector).reshape((side,) * self.n_spins))

    def eigenvalues(self) -> np.ndarray:
        return eigvals(self.matrix)


@dataclass
class Trajectory:
    """States W_rho(t) at strictly increasing times."""

    times: List[float]
    states: List[WignerCoeffs]
    oracle_states: Optional[List[SpinOperator]] = None

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ShapeMismatchError(f"{len(self.times)} times but {len(self.states)} states")
        if self.oracle_states is not None and len(self.oracle_states) != len(self.times):
            raise ShapeMismatchError(f"{len(self.times)} times but {len(self.oracle_states)} oracle states")
        _check_increasing(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def final(self) -> WignerCoeffs:
        return self.states[-1]

    def to_json(self, deviations: Optional[Sequence[float]] = None) -> list:
        records = []
        for position, (t, state) in enumerate(zip(self.times, self.states)):
            record = {"t": float(t), "coeffs": state.to_json()}
            if deviations is not None:
                record["max_oracle_dev"] = float(deviations[position])
            records.append(record)
        return records


@dataclass
class OracleReport:
    """Per-time max-norm deviation between Wigner and matrix evolution."""

    times: List[float]
    deviations: List[float]
    trajectory: Trajectory
    oracle_states: List[SpinOperator] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    def passed(self, tolerance: float) -> bool:
        return self.max_deviation <= tolerance

    def to_json(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "deviations": [float(d) for d in self.deviations],
            "max_deviation": self.max_deviation,
        }


def _check_increasing(times: Sequence[float]) -> None:
    for earlier, later in zip(times, times[1:]):
        if not later > earlier:
            raise TimeGridError(f"times must be strictly increasing, got {earlier} then {later}")


def build_generator(W_H: WignerCoeffs, rhs: Optional[RhsFunction] = None, progress: bool = False) -> Generator:
    """Assemble the generator column by column from unit coefficient functions.

    Args:
        W_H: Wigner function of the Hamiltonian.
        rhs: Equation-of-motion function; defaults to :func:`eom_rhs` for J=1/2
            and to the linear-Hamiltonian rule otherwise.
        progress: Show a progress bar over the columns.

    Returns:
        Generator of dimension ``(2J+1)**(2N)``.
    """
    rhs = rhs or _default_rhs(W_H.spin_twice)
    rank = W_H.spin_twice
    basis_order = list(itertools.product(rank_pairs(rank), repeat=W_H.n_spins))
    dimension = len(basis_order)
    matrix = np.zeros((dimension, dimension), dtype=complex)
    for column, index in enumerate(
        tqdm(basis_order, desc="Generator columns", unit="col", leave=False, disable=not progress)
    ):
        unit = WignerCoeffs.unit(index, W_H.spin_twice, max_rank=rank)
        matrix[:, column] = rhs(W_H, unit).with_rank(rank).data.reshape(-1)
    logger.debug("Built %dx%d generator for %d spheres", dimension, dimension, W_H.n_spins)
    matrix.setflags(write=False)
    return Generator(W_H.n_spins, W_H.spin_twice, matrix, basis_order)


def propagate(gen: Generator, w0: WignerCoeffs, times: Sequence[float]) -> Trajectory:
    """W_rho(t) = exp(G t) W_rho(0) at each requested time.

    Raises:
        TimeGridError: If ``times`` is not strictly increasing.
    """
    times = [float(t) for t in times]
    _check_increasing(times)
    x0 = gen.flatten(w0)
    hermitian = 1j * gen.matrix
    scale = max(float(np.linalg.norm(hermitian)), 1.0)
    states = []
    if np.max(np.abs(hermitian - hermitian.conj().T), initial=0.0) <= COEFF_TOL * scale:
        values, vectors = eigh(hermitian)
        amplitudes = vectors.conj().T @ x0
        for t in times:
            states.append(gen.unflatten(vectors @ (np.exp(-1j * values * t) * amplitudes)))
    else:
        logger.info("Generator is not anti-hermitian; propagating with expm")
        for t in times:
            states.append(gen.unflatten(expm(gen.matrix * t) @ x0))
    return Trajectory(times, states)


def propagate_rk4(
    W_H: Union[WignerCoeffs, Callable[[float], WignerCoeffs]],
    w0: WignerCoeffs,
    t_end: float,
    dt: float,
    rhs: Optional[RhsFunction] = None,
) -> Trajectory:
    """Classical fourth-order Runge-Kutta on the equation of motion, no generator.

    The step is shrunk to ``t_end / ceil(t_end / dt)`` so that the last
    state lands on ``t_end``; every step is recorded.

    Args:
        W_H: Hamiltonian Wigner function, or a callable ``t -> W_H(t)``.
        w0: Initial state.
        t_end: Final time (>= 0).
        dt: Requested step (> 0).
        rhs: Equation-of-motion function, as for :func:`build_generator`.

    Raises:
        TimeGridError: On a nonpositive step or negative end time.
    """
    if not dt > 0:
        raise TimeGridError(f"step must be positive, got dt={dt}")
    if t_end < 0:
        raise TimeGridError(f"end time must not be negative, got t_end={t_end}")
    hamiltonian = W_H if callable(W_H) else (lambda t: W_H)
    rhs = rhs or _default_rhs(w0.spin_twice)
    if t_end == 0:
        return Trajectory([0.0], [w0])

    n_steps = max(1, math.ceil(t_end / dt - 1e-12))
    h = t_end / n_steps
    times = [0.0]
    states = [w0]
    state = w0
    for step in range(n_steps):
        t = step * h
        k1 = rhs(hamiltonian(t), state)
        k2 = rhs(hamiltonian(t + h / 2), state + (h / 2) * k1)
        k3 = rhs(hamiltonian(t + h / 2), state + (h / 2) * k2)
        k4 = rhs(hamiltonian(t + h), state + h * k3)
        state = state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        times.append((step + 1) * h)
        states.append(state)
    return Trajectory(times, states)


def compare_with_oracle(H: SpinOperator, rho0: SpinOperator, times: Sequence[float]) -> OracleReport:
    """Propagate W(rho0) under W(H) and compare with exact matrix evolution at each time."""
    if H.n_spins != rho0.n_spins or H.spin_twice != rho0.spin_twice:
        raise ShapeMismatchError(
            f"Hamiltonian acts on {H.n_spins} spins J={H.spin_J}, state on {rho0.n_spins} spins J={rho0.spin_J}"
        )
    gen = build_generator(wigner_transform(H))
    trajectory = propagate(gen, wigner_transform(rho0), times)
    oracle_states = [evolve_exact(H, rho0, t) for t in trajectory.times]
    trajectory.oracle_states = oracle_states
    deviations = [
        state.max_abs_diff(wigner_transform(oracle)) for state, oracle in zip(trajectory.states, oracle_states)
    ]
    report = OracleReport(list(trajectory.times), deviations, trajectory, oracle_states)
    logger.info("Oracle comparison over %d times: max deviation %.3e", len(deviations), report.max_deviation)
    return report


def signal(trajectory: Trajectory, probe: WignerCoeffs) -> List[complex]:
    """Normalized overlaps ``<probe|W(t)> / <probe|probe>`` along a trajectory."""
    norm = inner(probe, probe)
    if norm == 0:
        raise ValueError("probe function is zero")
    return [inner(probe, state) / norm for state in trajectory.states]
