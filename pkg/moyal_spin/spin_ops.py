#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Hilbert-space side: tensor operators, product operators and the matrix oracle.

Single-spin matrices are indexed by magnetic quantum number in descending
order (m = J, J-1, ..., -J), so for J = 1/2 the state |alpha> is (1, 0)
and |beta> is (0, 1). Multi-spin matrices are Kronecker products with
spin 1 as the most significant factor.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh, eigvalsh, expm

from .angular import HalfInt, TABLES, half, rank_pairs, twice
from .config import EIGEN_FLOOR, HERMITIAN_TOL, TRACE_TOL
from .exceptions import (
    NonHermitianError,
    RankOutOfRangeError,
    ShapeMismatchError,
    SpinSlotError,
    TraceError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "BasisIndex",
    "SpinOperator",
    "spin_matrices",
    "tensor_op",
    "tensor_stack",
    "tensor_op_embedded",
    "product_basis_op",
    "basis_indices",
    "basis_coefficients",
    "decompose",
    "cartesian_op",
    "identity_op",
    "spin_rotation",
    "von_neumann_rhs",
    "evolve_exact",
    "partial_trace",
    "entanglement_entropy",
]

# Per-spin (j, m) pairs, one per spin slot.
BasisIndex = Tuple[Tuple[int, int], ...]

SPIN_HALF = 1  # twice the value


@dataclass(frozen=True, eq=False)
class SpinOperator:
    """Dense operator on ``n_spins`` spins of equal spin number J.

    Attributes:
        n_spins: Number of spins.
        spin_twice: 2J.
        matrix: Complex square matrix of dimension (2J+1)**n_spins.
    """

    n_spins: int
    spin_twice: int
    matrix: np.ndarray

    # numpy scalars defer to the reflected operators
    __array_ufunc__ = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        dim = (self.spin_twice + 1) ** self.n_spins
        if matrix.shape != (dim, dim):
            raise ShapeMismatchError(
                f"matrix shape {matrix.shape} does not match {self.n_spins} spins of J={self.spin_J} (dim {dim})"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def spin_J(self) -> Fraction:
        return half(self.spin_twice)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def local_dim(self) -> int:
        return self.spin_twice + 1

    def _check_compatible(self, other: "SpinOperator") -> None:
        if self.n_spins != other.n_spins or self.spin_twice != other.spin_twice:
            raise ShapeMismatchError(
                f"operators differ: {self.n_spins} spins J={self.spin_J} vs {other.n_spins} spins J={other.spin_J}"
            )

    def _like(self, matrix: np.ndarray) -> "SpinOperator":
        return SpinOperator(self.n_spins, self.spin_twice, matrix)

    def __add__(self, other):
        if isinstance(other, SpinOperator):
            self._check_compatible(other)
            return self._like(self.matrix + other.matrix)
        return self._like(self.matrix + other * np.eye(self.dim))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return self._like(-self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, SpinOperator):
            return self @ scalar
        return self._like(self.matrix * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._like(self.matrix / scalar)

    def __matmul__(self, other: "SpinOperator") -> "SpinOperator":
        self._check_compatible(other)
        return self._like(self.matrix @ other.matrix)

    def dagger(self) -> "SpinOperator":
        return self._like(self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(self.frobenius_norm(), 1.0)
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0)) <= tol * scale

    def allclose(self, other: "SpinOperator", atol: float = 1e-12) -> bool:
        self._check_compatible(other)
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))

    def to_json(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {
            "n_spins": self.n_spins,
            "spin_2J": self.spin_twice,
            "matrix": [[float(value.real), float(value.imag)] for value in flat],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "SpinOperator":
        """Build an operator from the JSON layout of :meth:`to_json`.

        ``matrix`` may be the flat row-major list of ``[re, im]`` pairs or a
        list of rows of such pairs.
        """
        n_spins = int(payload["n_spins"])
        spin_twice = int(payload.get("spin_2J", SPIN_HALF))
        pairs = np.asarray(payload["matrix"], dtype=float)
        values = pairs[..., 0] + 1j * pairs[..., 1]
        dim = (spin_twice + 1) ** n_spins
        return cls(n_spins, spin_twice, values.reshape(dim, dim))

    @classmethod
    def load(cls, path) -> "SpinOperator":
        with open(path, "r") as f:
            return cls.from_json(json.load(f))


@lru_cache(maxsize=None)
def _spin_matrices_twice(spin_twice: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    J = spin_twice / 2.0
    ms = J - np.arange(spin_twice + 1)
    iz = np.diag(ms).astype(complex)
    iplus = np.zeros((spin_twice + 1, spin_twice + 1), dtype=complex)
    for row in range(1, spin_twice + 1):
        m = ms[row]
        iplus[row - 1, row] = np.sqrt(J * (J + 1) - m * (m + 1))
    ix = (iplus + iplus.conj().T) / 2
    iy = (iplus - iplus.conj().T) / 2j
    for matrix in (ix, iy, iz):
        matrix.setflags(write=False)
    return ix, iy, iz


def spin_matrices(J: HalfInt = Fraction(1, 2)) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the (I_x, I_y, I_z) matrices of a single spin J."""
    return _spin_matrices_twice(twice(J))


@lru_cache(maxsize=None)
def _tensor_matrix(spin_twice: int, j: int, m: int) -> np.ndarray:
    J = half(spin_twice)
    size = spin_twice + 1
    matrix = np.zeros((size, size), dtype=complex)
    scale = np.sqrt((2 * j + 1) / (spin_twice + 1))
    for row in range(size):
        m1 = J - row
        for col in range(size):
            m2 = J - col
            matrix[row, col] = scale * TABLES.cg(J, m2, j, m, J, m1)
    matrix.setflags(write=False)
    return matrix


def _check_rank(spin_twice: int, j, m) -> None:
    if int(j) != j or int(m) != m or not (0 <= j <= spin_twice) or abs(m) > j:
        raise RankOutOfRangeError(j, m, half(spin_twice))


def tensor_op(J: HalfInt, j: int, m: int) -> SpinOperator:
    """Irreducible tensor operator T_{jm} of a single spin J.

    ``[T_jm]_{m1 m2} = sqrt((2j+1)/(2J+1)) C^{J m1}_{J m2, j m}``.

    Raises:
        RankOutOfRangeError: Unless 0 <= j <= 2J and |m| <= j.
    """
    spin_twice = twice(J)
    _check_rank(spin_twice, j, m)
    return SpinOperator(1, spin_twice, _tensor_matrix(spin_twice, int(j), int(m)))


@lru_cache(maxsize=None)
def tensor_stack(spin_twice: int) -> np.ndarray:
    """All T_{jm} of spin J stacked in flat-index order, shape (D, 2J+1, 2J+1)."""
    stack = np.stack([_tensor_matrix(spin_twice, j, m) for j, m in rank_pairs(spin_twice)])
    stack.setflags(write=False)
    return stack


def _kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors)


def _check_slot(n_spins: int, k: int) -> None:
    if not 1 <= k <= n_spins:
        raise SpinSlotError(f"spin slot {k} out of range 1..{n_spins}")


def tensor_op_embedded(n_spins: int, k: int, J: HalfInt, j: int, m: int) -> SpinOperator:
    """T_{00} x ... x T_{jm} (slot k, 1-based) x ... x T_{00}."""
    _check_slot(n_spins, k)
    spin_twice = twice(J)
    _check_rank(spin_twice, j, m)
    identity_part = _tensor_matrix(spin_twice, 0, 0)
    factors = [identity_part] * n_spins
    factors[k - 1] = _tensor_matrix(spin_twice, int(j), int(m))
    return SpinOperator(n_spins, spin_twice, _kron_all(factors))


def product_basis_op(n_spins: int, J: HalfInt, idx: BasisIndex) -> SpinOperator:
    """Normalized product operator T_{j1 m1} x ... x T_{jN mN}."""
    spin_twice = twice(J)
    if len(idx) != n_spins:
        raise ShapeMismatchError(f"basis index {idx} has {len(idx)} slots, expected {n_spins}")
    for j, m in idx:
        _check_rank(spin_twice, j, m)
    return SpinOperator(n_spins, spin_twice, _kron_all([_tensor_matrix(spin_twice, j, m) for j, m in idx]))


def basis_indices(n_spins: int, J: HalfInt = Fraction(1, 2)) -> List[BasisIndex]:
    """Canonical enumeration of the product basis (spin 1 slowest)."""
    pairs = rank_pairs(twice(J))
    indices: List[BasisIndex] = [()]
    for _ in range(n_spins):
        indices = [index + (pair,) for index in indices for pair in pairs]
    return indices


def basis_coefficients(op: SpinOperator) -> np.ndarray:
    """Coefficients tr(T_idx^dagger op) as an (D,)*N tensor."""
    n = op.n_spins
    d = op.local_dim
    stack = tensor_stack(op.spin_twice).conj()
    tensor = op.matrix.reshape((d,) * (2 * n))
    # contract row index i_k and column index c_k of spin k against conj(T)[q_k, i_k, c_k]
    for _ in range(n):
        tensor = np.tensordot(tensor, stack, axes=([0, n], [1, 2]))
        n -= 1
    return tensor


def decompose(op: SpinOperator, tol: float = 1e-14) -> Dict[BasisIndex, complex]:
    """Expand ``op`` in the orthonormal product basis.

    Returns:
        Mapping from basis index to ``tr(basis^dagger op)``; entries with
        magnitude at or below ``tol`` are omitted.
    """
    coefficients = basis_coefficients(op)
    result: Dict[BasisIndex, complex] = {}
    for index in basis_indices(op.n_spins, op.spin_J):
        flat = tuple(j * j + j + m for j, m in index)
        value = complex(coefficients[flat])
        if abs(value) > tol:
            result[index] = value
    return result


def identity_op(n_spins: int, J: HalfInt = Fraction(1, 2)) -> SpinOperator:
    spin_twice = twice(J)
    return SpinOperator(n_spins, spin_twice, np.eye((spin_twice + 1) ** n_spins))


def _single_cartesian(axis: str, spin_twice: int) -> np.ndarray:
    ix, iy, iz = _spin_matrices_twice(spin_twice)
    axis = axis.lower()
    if axis == "x":
        return ix
    if axis == "y":
        return iy
    if axis == "z":
        return iz
    if axis in ("p", "+", "plus"):
        return ix + 1j * iy
    if axis in ("m", "-", "minus"):
        return ix - 1j * iy
    if axis in ("a", "alpha", "b", "beta"):
        if spin_twice != SPIN_HALF:
            raise ValueError(f"projector I_{axis} is only defined for J = 1/2")
        sign = 1.0 if axis in ("a", "alpha") else -1.0
        return np.eye(2) / 2 + sign * iz
    raise ValueError(f"unknown Cartesian axis {axis!r}")


def cartesian_op(n_spins: int, spec: Iterable[Tuple[int, str]], J: HalfInt = Fraction(1, 2)) -> SpinOperator:
    """Product of embedded Cartesian operators, e.g. ``[(1, "z"), (2, "z")]`` for I_1z I_2z.

    Axes: x, y, z, alpha/a, beta/b (J = 1/2 projectors 1/2 +- I_z),
    p/m (raising and lowering). An empty spec gives the identity.

    Raises:
        SpinSlotError: If a slot is out of range or repeated.
    """
    spin_twice = twice(J)
    factors = [np.eye(spin_twice + 1, dtype=complex) for _ in range(n_spins)]
    seen = set()
    for k, axis in spec:
        _check_slot(n_spins, k)
        if k in seen:
            raise SpinSlotError(f"spin slot {k} appears more than once")
        seen.add(k)
        factors[k - 1] = _single_cartesian(axis, spin_twice)
    return SpinOperator(n_spins, spin_twice, _kron_all(factors))


def spin_rotation(n_spins: int, k: int, axis: Sequence[float], angle: float, J: HalfInt = Fraction(1, 2)) -> SpinOperator:
    """Unitary exp(-i angle n.I_k) rotating spin k about the unit vector ``axis``."""
    _check_slot(n_spins, k)
    spin_twice = twice(J)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    ix, iy, iz = _spin_matrices_twice(spin_twice)
    local = expm(-1j * angle * (n[0] * ix + n[1] * iy + n[2] * iz))
    factors = [np.eye(spin_twice + 1, dtype=complex) for _ in range(n_spins)]
    factors[k - 1] = local
    return SpinOperator(n_spins, spin_twice, _kron_all(factors))


def von_neumann_rhs(H: SpinOperator, rho: SpinOperator) -> SpinOperator:
    """Right-hand side of the von Neumann equation, -i[H, rho]."""
    H._check_compatible(rho)
    return H._like(-1j * (H.matrix @ rho.matrix - rho.matrix @ H.matrix))


def _require_hermitian(H: SpinOperator) -> None:
    if not H.is_hermitian():
        raise NonHermitianError("Hamiltonian is not hermitian within tolerance")


def evolve_exact(H: SpinOperator, rho: SpinOperator, t: float) -> SpinOperator:
    """Return U_t rho U_t^dagger with U_t = exp(-i H t).

    Raises:
        NonHermitianError: If H is not hermitian (relative tolerance 1e-10).
    """
    H._check_compatible(rho)
    _require_hermitian(H)
    hermitian_part = (H.matrix + H.matrix.conj().T) / 2
    energies, vectors = eigh(hermitian_part)
    propagator = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
    return rho._like(propagator @ rho.matrix @ propagator.conj().T)


def partial_trace(rho: SpinOperator, keep: Iterable[int]) -> np.ndarray:
    """Reduced matrix on the (1-based) spins in ``keep``, in ascending slot order."""
    keep = sorted(set(keep))
    for k in keep:
        _check_slot(rho.n_spins, k)
    n = rho.n_spins
    d = rho.local_dim
    tensor = rho.matrix.reshape((d,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for k in range(1, n + 1):
        if k not in keep:
            cols[k - 1] = rows[k - 1]
    kept_rows = "".join(rows[k - 1] for k in keep)
    kept_cols = "".join(cols[k - 1] for k in keep)
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{kept_rows}{kept_cols}", tensor)
    size = d ** len(keep)
    return reduced.reshape(size, size)


def entanglement_entropy(rho: SpinOperator, subsystem: Iterable[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on ``subsystem``.

    Raises:
        TraceError: If ``rho`` is not of unit trace.
    """
    subsystem = tuple(subsystem)
    trace = rho.trace()
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceError(f"density operator has trace {trace:.12g}, expected 1")
    reduced = partial_trace(rho, subsystem)
    reduced = (reduced + reduced.conj().T) / 2
    eigenvalues = eigvalsh(reduced)
    entropy = -sum(float(value) * np.log2(value) for value in eigenvalues if value >= EIGEN_FLOOR)
    logger.debug("entropy of subsystem %s: %.15g", sorted(set(subsystem)), entropy)
    return abs(float(entropy))
