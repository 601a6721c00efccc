#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Sphere quadrature and integral-based checks of the Wigner map.

Everything here works from sampled function values rather than coefficient
identities, so it validates the coefficient algebra independently.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.spatial.transform import Rotation
from tqdm import tqdm

from .angular import HalfInt, half, trikernel, twice
from .config import COEFF_TOL, DEFAULT_N_THETA, DEFAULT_SEED, QUAD_TOL, REALITY_TOL
from .exceptions import GridResolutionError, ShapeMismatchError
from .spin_ops import SpinOperator, spin_rotation, tensor_stack
from .wigner import WignerCoeffs, evaluate_grid, harmonics, wigner_transform

logger = logging.getLogger(__name__)

__all__ = [
    "SphereGrid",
    "PostulateCheck",
    "StratonovichReport",
    "sample_grid",
    "integrate",
    "inverse_wigner_by_quadrature",
    "integral_star",
    "rotate_angles",
    "norm_bound",
    "random_operator",
    "validate_stratonovich",
]

Samples = Union[np.ndarray, WignerCoeffs]


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre nodes in cos(theta) times uniform nodes in phi.

    Node arrays are flattened theta-outer, so node ``p`` is
    ``(theta[p // n_phi], phi[p % n_phi])``.
    """

    n_theta: int = DEFAULT_N_THETA
    n_phi: Optional[int] = None

    def __post_init__(self):
        if self.n_theta < 1:
            raise GridResolutionError(f"n_theta must be positive, got {self.n_theta}")
        if self.n_phi is None:
            object.__setattr__(self, "n_phi", 2 * self.n_theta)
        if self.n_phi < 1:
            raise GridResolutionError(f"n_phi must be positive, got {self.n_phi}")
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        theta = np.arccos(x)
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        object.__setattr__(self, "theta", np.repeat(theta, self.n_phi))
        object.__setattr__(self, "phi", np.tile(phi, self.n_theta))
        object.__setattr__(self, "weights", np.repeat(w, self.n_phi) * (2.0 * np.pi / self.n_phi))

    @classmethod
    def for_rank(cls, rank: int) -> "SphereGrid":
        """Smallest default-shaped grid integrating spherical polynomials of ``rank`` exactly."""
        return cls(n_theta=max(1, rank // 2 + 1), n_phi=rank + 1)

    @property
    def exact_rank(self) -> int:
        """Highest total rank of a spherical polynomial integrated exactly."""
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def nodes(self):
        return self.theta, self.phi


def _grids(grid: Union[SphereGrid, Sequence[SphereGrid]], n_spins: int) -> List[SphereGrid]:
    if isinstance(grid, SphereGrid):
        return [grid] * n_spins
    grids = list(grid)
    if len(grids) != n_spins:
        raise ShapeMismatchError(f"{len(grids)} grids given for {n_spins} spheres")
    return grids


def sample_grid(w: WignerCoeffs, grid: Union[SphereGrid, Sequence[SphereGrid]]) -> np.ndarray:
    """Values of ``w`` on the tensor-product grid, one axis per sphere."""
    return evaluate_grid(w, [g.nodes for g in _grids(grid, w.n_spins)])


def integrate(f: Samples, grid: Union[SphereGrid, Sequence[SphereGrid]]) -> complex:
    """Tensor-product quadrature of ``f`` over all its spheres.

    Args:
        f: Samples on the grid (one axis per sphere) or a Wigner function.
        grid: One grid shared by all spheres, or one per sphere.
    """
    if isinstance(f, WignerCoeffs):
        grids = _grids(grid, f.n_spins)
        rank = f.effective_rank()
        for g in grids:
            if rank >= g.n_theta:
                logger.warning("Function rank %d is not below n_theta=%d; quadrature may be inexact", rank, g.n_theta)
        f = sample_grid(f, grids)
    samples = np.asarray(f)
    grids = _grids(grid, samples.ndim)
    total = samples
    for g in grids:
        if total.shape[0] != g.size:
            raise ShapeMismatchError(f"sample axis of length {total.shape[0]} does not match grid size {g.size}")
        total = np.tensordot(g.weights, total, axes=([0], [0]))
    return complex(total)


def _single_sphere_samples(samples: Samples, grid: SphereGrid) -> np.ndarray:
    if isinstance(samples, WignerCoeffs):
        if samples.n_spins != 1:
            raise ShapeMismatchError("quadrature inverse and integral star act on a single sphere")
        return sample_grid(samples, grid)
    values = np.asarray(samples, dtype=complex).reshape(-1)
    if values.shape[0] != grid.size:
        raise ShapeMismatchError(f"{values.shape[0]} samples for a grid of {grid.size} nodes")
    return values


def _project(values: np.ndarray, max_rank: int, grid: SphereGrid) -> np.ndarray:
    """Coefficients ``int W conj(Y_q) dOmega`` for every q up to ``max_rank``."""
    basis = harmonics(max_rank, grid.theta, grid.phi)
    return basis.conj() @ (grid.weights * values)


def inverse_wigner_by_quadrature(samples: Samples, J: HalfInt, grid: SphereGrid) -> SpinOperator:
    """Operator ``A = int W_A(Omega) Delta_J(Omega) dOmega`` summed over the grid nodes.

    Raises:
        GridResolutionError: If the grid cannot integrate rank-4J products exactly.
    """
    spin_twice = twice(J)
    if grid.exact_rank < 2 * spin_twice:
        raise GridResolutionError(
            f"grid integrates rank {grid.exact_rank} exactly; J={half(spin_twice)} needs {2 * spin_twice}"
        )
    values = _single_sphere_samples(samples, grid)
    basis = harmonics(spin_twice, grid.theta, grid.phi)
    stack = tensor_stack(spin_twice)
    # Delta_J at node p is sum_q Y_q(p) T_q^dagger
    kernels = np.einsum("qp,qba->pab", basis, stack.conj())
    matrix = np.einsum("p,pab->ab", grid.weights * values, kernels)
    return SpinOperator(1, spin_twice, matrix)


def integral_star(samples_a: Samples, samples_b: Samples, J: HalfInt, grid: SphereGrid) -> WignerCoeffs:
    """Integral-form star product of two single-spin functions.

    ``W_AB(Omega) = int int W_A(Omega_1) W_B(Omega_2) tr[Delta(Omega) Delta(Omega_1) Delta(Omega_2)]``,
    with the trikernel applied through its coupling-coefficient expansion.
    Valid for any spin J.

    Raises:
        GridResolutionError: If ``n_theta < 4J + 1`` or ``n_phi <= 4J``.
    """
    spin_twice = twice(J)
    needed = 2 * spin_twice + 1
    if grid.n_theta < needed or grid.n_phi < needed:
        raise GridResolutionError(f"integral star for J={half(spin_twice)} needs n_theta and n_phi >= {needed}")
    coeffs_a = _project(_single_sphere_samples(samples_a, grid), spin_twice, grid)
    coeffs_b = _project(_single_sphere_samples(samples_b, grid), spin_twice, grid)
    kernel = trikernel(spin_twice)
    return WignerCoeffs(1, spin_twice, np.einsum("cab,a,b->c", kernel, coeffs_a, coeffs_b))


def rotate_angles(theta, phi, rotation: Rotation):
    """Angles of ``R^{-1} r`` for the unit vectors ``r(theta, phi)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    vectors = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    rotated = rotation.inv().apply(vectors.reshape(-1, 3)).reshape(vectors.shape)
    new_theta = np.arccos(np.clip(rotated[..., 2], -1.0, 1.0))
    new_phi = np.mod(np.arctan2(rotated[..., 1], rotated[..., 0]), 2.0 * np.pi)
    return new_theta, new_phi


def norm_bound(J: HalfInt) -> float:
    """Bound ``(2J+1)/sqrt(4 pi)`` on |W_A| for operators of unit Frobenius norm."""
    return (twice(J) + 1) / math.sqrt(4.0 * math.pi)


def random_operator(
    n_spins: int, J: HalfInt, rng: np.random.Generator, hermitian: bool = False, normalized: bool = True
) -> SpinOperator:
    spin_twice = twice(J)
    dim = (spin_twice + 1) ** n_spins
    matrix = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if hermitian:
        matrix = (matrix + matrix.conj().T) / 2
    if normalized:
        matrix = matrix / np.linalg.norm(matrix)
    return SpinOperator(n_spins, spin_twice, matrix)


@dataclass
class PostulateCheck:
    max_deviation: float = 0.0
    threshold: float = COEFF_TOL
    points: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.threshold)

    def record(self, deviation) -> None:
        deviation = np.asarray(deviation, dtype=float)
        self.points += int(deviation.size)
        self.max_deviation = max(self.max_deviation, float(np.max(deviation)))


@dataclass
class StratonovichReport:
    """Per-postulate outcome of :func:`validate_stratonovich`."""

    n_spins: int
    spin_twice: int
    trials: int
    seed: int
    checks: Dict[str, PostulateCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def to_json(self) -> dict:
        return {
            "n_spins": self.n_spins,
            "J": str(half(self.spin_twice)),
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "postulates": {
                name: {
                    "passed": check.passed,
                    "max_deviation": check.max_deviation,
                    "threshold": check.threshold,
                    "points": check.points,
                }
                for name, check in self.checks.items()
            },
        }

    def __str__(self):
        lines = [f"Stratonovich checks: {self.n_spins} spin(s), J={half(self.spin_twice)}, {self.trials} trials"]
        for name, check in self.checks.items():
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"  {name:<14} {status}  max deviation {check.max_deviation:.3e} (threshold {check.threshold:g})")
        return "\n".join(lines)


def _random_rotations(n_spins: int, rng: np.random.Generator) -> List[Rotation]:
    return [Rotation.from_rotvec(vector) for vector in rng.normal(size=(n_spins, 3))]


def _rotate_operator(op: SpinOperator, rotations: Sequence[Rotation]) -> SpinOperator:
    result = op
    for k, rotation in enumerate(rotations, start=1):
        vector = rotation.as_rotvec()
        angle = float(np.linalg.norm(vector))
        if angle == 0.0:
            continue
        U = spin_rotation(op.n_spins, k, vector / angle, angle, op.spin_J)
        result = U @ result @ U.dagger()
    return result


def validate_stratonovich(
    n_spins: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    J: HalfInt = half(1),
    grid: Optional[SphereGrid] = None,
    progress: bool = False,
) -> StratonovichReport:
    """Check the Wigner map against linearity, reality, normalization, traciality and covariance.

    Each trial draws random unit-norm operators. Coefficient identities use
    ``COEFF_TOL``, quadrature identities ``QUAD_TOL`` and reality
    ``REALITY_TOL``. The pointwise bound ``|W_A| <= (2J+1)/sqrt(4 pi)`` is
    checked on the grid as well.

    Args:
        n_spins: Number of spheres.
        trials: Number of random draws.
        seed: Seed for ``numpy.random.default_rng``.
        J: Spin number of every spin.
        grid: Quadrature grid; defaults to one resolving rank-4J products.
        progress: Show a progress bar over the trials.

    Returns:
        StratonovichReport with one entry per postulate.
    """
    spin_twice = twice(J)
    grid = grid or SphereGrid(n_theta=max(DEFAULT_N_THETA, 2 * spin_twice + 1))
    if grid.exact_rank < 2 * spin_twice:
        raise GridResolutionError(f"grid cannot resolve rank-{2 * spin_twice} products")
    rng = np.random.default_rng(seed)
    report = StratonovichReport(n_spins, spin_twice, trials, seed)
    checks = report.checks
    checks["linearity"] = PostulateCheck(threshold=COEFF_TOL)
    checks["reality"] = PostulateCheck(threshold=REALITY_TOL)
    checks["normalization"] = PostulateCheck(threshold=QUAD_TOL)
    checks["traciality"] = PostulateCheck(threshold=QUAD_TOL)
    checks["covariance"] = PostulateCheck(threshold=COEFF_TOL)
    checks["bound"] = PostulateCheck(threshold=COEFF_TOL)

    local_volume = 4.0 * math.pi / (spin_twice + 1)
    bound = norm_bound(J) ** n_spins
    logger.info("Validating %d trial(s) on %d sphere(s), J=%s", trials, n_spins, half(spin_twice))
    for _ in tqdm(range(trials), desc="Stratonovich trials", unit="trial", leave=False, disable=not progress):
        A = random_operator(n_spins, J, rng)
        B = random_operator(n_spins, J, rng)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        W_A = wigner_transform(A)
        W_B = wigner_transform(B)

        checks["linearity"].record(wigner_transform(a * A + b * B).max_abs_diff(a * W_A + b * W_B))

        H = random_operator(n_spins, J, rng, hermitian=True)
        samples_H = sample_grid(wigner_transform(H), grid)
        checks["reality"].record(np.max(np.abs(samples_H.imag)))

        samples_A = sample_grid(W_A, grid)
        expected = A.trace() * local_volume ** (n_spins / 2)
        checks["normalization"].record(abs(integrate(samples_A, grid) - expected))
        checks["traciality"].record(
            abs(integrate(sample_grid(W_B, grid).conj() * samples_A, grid) - np.trace(B.matrix.conj().T @ A.matrix))
        )
        checks["bound"].record(max(0.0, float(np.max(np.abs(samples_A))) - bound))

        rotations = _random_rotations(n_spins, rng)
        rotated = wigner_transform(_rotate_operator(A, rotations))
        moved = [rotate_angles(grid.theta, grid.phi, rotation) for rotation in rotations]
        checks["covariance"].record(np.abs(sample_grid(rotated, grid) - evaluate_grid(W_A, moved)))

    for name, check in checks.items():
        logger.info("%s: max deviation %.3e (threshold %g)", name, check.max_deviation, check.threshold)
    return report
