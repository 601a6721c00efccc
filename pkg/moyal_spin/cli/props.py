#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Product-operator (PROPS) decomposition and surface sampling for plotting.

An N-sphere Wigner function is written as a sum of products of
single-sphere functions, each drawn as its own surface. The decomposition
groups along the last sphere in the real Cartesian basis
``{Y00, (Y1-1 - Y11)/sqrt2, i(Y1-1 + Y11)/sqrt2, Y10}``: columns that are
proportional share one term.
"""

from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import DEFAULT_RESOLUTION
from ..exceptions import GridResolutionError, ShapeMismatchError, SpinSlotError
from ..wigner import WignerCoeffs, evaluate, harmonics

logger = logging.getLogger(__name__)

__all__ = ["CARTESIAN_BASIS", "PropsTerm", "props_decompose", "SampledSurface", "sample_surface", "marginal"]

_S = 1.0 / math.sqrt(2.0)

# Rows: Y00, X_x, X_y, X_z in the flat (j, m) order Y00, Y1-1, Y10, Y11.
CARTESIAN_BASIS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _S, 0.0, -_S],
        [0.0, 1j * _S, 0.0, 1j * _S],
        [0.0, 0.0, 1.0, 0.0],
    ],
    dtype=complex,
)

GROUP_TOL = 1e-12


@dataclass(frozen=True)
class PropsTerm:
    """``scale * f_1(Omega_1) * ... * f_N(Omega_N)`` with unit-norm single-sphere factors."""

    scale: complex
    factors: Tuple[WignerCoeffs, ...]

    @property
    def n_spins(self) -> int:
        return len(self.factors)

    def distributed_factors(self) -> Tuple[WignerCoeffs, ...]:
        """Factors carrying ``|scale|**(1/N)`` each, the phase of ``scale`` on the first."""
        magnitude = abs(self.scale) ** (1.0 / self.n_spins)
        phase = cmath.exp(1j * cmath.phase(self.scale))
        return tuple(
            factor * (magnitude * phase if k == 0 else magnitude) for k, factor in enumerate(self.factors)
        )

    def to_wigner(self) -> WignerCoeffs:
        data = self.factors[0].data
        for factor in self.factors[1:]:
            data = np.multiply.outer(data, factor.data)
        return WignerCoeffs(self.n_spins, self.factors[0].spin_twice, self.scale * data)

    def evaluate(self, angles: Sequence[Tuple[float, float]]) -> complex:
        value = self.scale
        for factor, pair in zip(self.factors, angles):
            value *= evaluate(factor, [pair])
        return complex(value)


def _single(vector: np.ndarray) -> WignerCoeffs:
    return WignerCoeffs(1, 1, vector)


def _decompose(tensor: np.ndarray) -> List[Tuple[complex, List[np.ndarray]]]:
    """Terms ``(scale, [unit vectors per sphere])`` for a (4,)*N tensor."""
    n = tensor.ndim
    if n == 1:
        norm = float(np.linalg.norm(tensor))
        if norm == 0.0:
            return []
        return [(complex(norm), [tensor / norm])]
    columns = tensor.reshape(-1, 4) @ CARTESIAN_BASIS.conj().T
    groups: List[Tuple[np.ndarray, np.ndarray]] = []
    for a in range(4):
        column = columns[:, a]
        if np.linalg.norm(column) < GROUP_TOL:
            continue
        for prefix, weights in groups:
            ratio = np.vdot(prefix, column) / np.vdot(prefix, prefix)
            if np.linalg.norm(column - ratio * prefix) <= GROUP_TOL * max(1.0, np.linalg.norm(column)):
                weights[a] = ratio
                break
        else:
            weights = np.zeros(4, dtype=complex)
            weights[a] = 1.0
            groups.append((column, weights))
    terms = []
    for prefix, weights in groups:
        last = weights @ CARTESIAN_BASIS
        last_norm = float(np.linalg.norm(last))
        for scale, vectors in _decompose(prefix.reshape((4,) * (n - 1))):
            terms.append((scale * last_norm, vectors + [last / last_norm]))
    return terms


def props_decompose(w: WignerCoeffs) -> List[PropsTerm]:
    """Exact sum-of-products form of a spin-1/2 Wigner function.

    Returns at most ``4**(N-1)`` terms, at most 4 for two spheres, and a
    single term for product inputs.
    """
    if w.spin_twice != 1:
        raise ShapeMismatchError(f"PROPS decomposition needs J=1/2, got J={w.spin_J}")
    rank = w.effective_rank()
    if rank > 1:
        raise ShapeMismatchError(f"PROPS decomposition needs ranks <= 1, found {rank}")
    terms = [
        PropsTerm(scale, tuple(_single(vector) for vector in vectors))
        for scale, vectors in _decompose(w.with_rank(1).data)
    ]
    logger.debug("PROPS decomposition of %d spheres: %d term(s)", w.n_spins, len(terms))
    return terms


@dataclass
class SampledSurface:
    """Values of one sphere's function on an equiangular (theta, phi) lattice.

    ``fixed_angles`` holds the angles used for the other spheres, or the
    string ``"marginal"`` when they were integrated out.
    """

    spin_slot: int
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    fixed_angles: Union[None, str, Tuple[Tuple[float, float], ...]] = None
    decomposition_id: Optional[int] = None

    @property
    def resolution(self) -> int:
        return len(self.theta)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def phase(self) -> np.ndarray:
        return np.angle(self.values)


def marginal(w: WignerCoeffs, spin_slot: int) -> WignerCoeffs:
    """Single-sphere function left after integrating all other spheres."""
    index = [0] * w.n_spins
    index[spin_slot - 1] = slice(None)
    vector = w.data[tuple(index)] * math.sqrt(4.0 * math.pi) ** (w.n_spins - 1)
    return WignerCoeffs(1, w.spin_twice, vector)


def _restrict(w: WignerCoeffs, spin_slot: int, fixed_angles: Sequence[Tuple[float, float]]) -> WignerCoeffs:
    if len(fixed_angles) != w.n_spins - 1:
        raise ShapeMismatchError(f"{len(fixed_angles)} fixed angle pairs given for {w.n_spins - 1} other spheres")
    data = np.moveaxis(w.data, spin_slot - 1, -1)
    for theta, phi in fixed_angles:
        data = np.tensordot(harmonics(w.max_rank, theta, phi), data, axes=([0], [0]))
    return WignerCoeffs(1, w.spin_twice, data)


def sample_surface(
    source: Union[PropsTerm, WignerCoeffs],
    spin_slot: int,
    resolution: int = DEFAULT_RESOLUTION,
    fixed_angles: Optional[Sequence[Tuple[float, float]]] = None,
    decomposition_id: Optional[int] = None,
    num_workers: Optional[int] = None,
) -> SampledSurface:
    """Sample one sphere on ``theta in [0, pi]`` (poles included) times ``phi in [0, 2 pi)``.

    Args:
        source: A PROPS term (its distributed factor on ``spin_slot`` is
            sampled) or a Wigner function.
        spin_slot: 1-based sphere to sample.
        resolution: Nodes per angle, at least 2.
        fixed_angles: Angles of the other spheres in ascending slot order.
            Omitted for a multi-sphere Wigner function, the other spheres are
            integrated out.
        decomposition_id: Index of the PROPS term, recorded on the surface.
        num_workers: Threads used over theta rows (default 1).

    Raises:
        SpinSlotError: If ``spin_slot`` is out of range.
        GridResolutionError: If ``resolution < 2``.
    """
    if resolution < 2:
        raise GridResolutionError(f"resolution must be at least 2, got {resolution}")
    n_spins = source.n_spins
    if not 1 <= spin_slot <= n_spins:
        raise SpinSlotError(f"spin slot {spin_slot} out of range 1..{n_spins}")

    recorded: Union[None, str, Tuple[Tuple[float, float], ...]] = None
    if isinstance(source, PropsTerm):
        single = source.distributed_factors()[spin_slot - 1]
    elif n_spins == 1:
        single = source
    elif fixed_angles is None:
        single = marginal(source, spin_slot)
        recorded = "marginal"
    else:
        recorded = tuple((float(t), float(p)) for t, p in fixed_angles)
        single = _restrict(source, spin_slot, recorded)

    theta = np.linspace(0.0, math.pi, resolution)
    phi = 2.0 * math.pi * np.arange(resolution) / resolution

    def row(t: float) -> np.ndarray:
        return single.data @ harmonics(single.max_rank, np.full(resolution, t), phi)

    with ThreadPoolExecutor(max_workers=num_workers or 1) as pool:
        values = np.array(list(pool.map(row, theta)))
    return SampledSurface(spin_slot, theta, phi, values, recorded, decomposition_id)
