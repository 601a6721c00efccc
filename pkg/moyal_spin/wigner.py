#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Phase-space side: Wigner functions of coupled spins as coefficient tensors.

A Wigner function on N spheres is stored as the dense tensor of its
coefficients in the products Y_{j1 m1}(theta_1, phi_1) ... Y_{jN mN}(theta_N, phi_N).
The transform of the normalized product operator T_{j1 m1} x ... x T_{jN mN}
is exactly that product of spherical harmonics, so operator coefficients in
the product basis and Wigner coefficients coincide. Grids of values are
derived views; every algebraic operation here is exact in coefficient space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import lpmv

from .angular import bracket_kernel, flat_index, half, n_slots, product_kernel, rank_pairs, twice, HalfInt
from .config import DROP_TOL
from .exceptions import ShapeMismatchError, SpinSlotError, UnrepresentableRankError
from .spin_ops import BasisIndex, SpinOperator, basis_coefficients, tensor_stack

logger = logging.getLogger(__name__)

__all__ = [
    "WignerCoeffs",
    "SphereAngles",
    "spherical_harmonic",
    "harmonics",
    "wigner_kernel",
    "wigner_transform",
    "inverse_wigner",
    "evaluate",
    "evaluate_grid",
    "poisson_bracket",
    "pointwise_product",
    "project_rank",
    "inner",
    "coherence_split",
    "bilinear",
]


def _rank_of_slots(size: int) -> int:
    rank = math.isqrt(size) - 1
    if (rank + 1) ** 2 != size:
        raise ShapeMismatchError(f"axis length {size} is not a perfect square")
    return rank


def _split_flat(q: int) -> Tuple[int, int]:
    j = math.isqrt(q)
    return j, q - j * j - j


@dataclass(frozen=True, eq=False)
class WignerCoeffs:
    """Spherical-harmonic coefficients of a Wigner function on ``n_spins`` spheres.

    ``data`` has shape ``((r+1)**2,) * n_spins`` where ``r`` is
    :attr:`max_rank`; axis k holds sphere k+1 in flat (j, m) order.
    Entries smaller than ``DROP_TOL`` are stored as exact zeros.
    """

    n_spins: int
    spin_twice: int
    data: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != self.n_spins or self.n_spins < 1:
            raise ShapeMismatchError(f"coefficient tensor has {data.ndim} axes for {self.n_spins} spins")
        if len(set(data.shape)) != 1:
            raise ShapeMismatchError(f"coefficient tensor axes differ in length: {data.shape}")
        _rank_of_slots(data.shape[0])
        data[np.abs(data) < DROP_TOL] = 0
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    # construction

    @classmethod
    def zeros(cls, n_spins: int, spin_twice: int = 1, max_rank: Optional[int] = None) -> "WignerCoeffs":
        rank = spin_twice if max_rank is None else max_rank
        return cls(n_spins, spin_twice, np.zeros((n_slots(rank),) * n_spins, dtype=complex))

    @classmethod
    def from_dict(
        cls,
        entries: Mapping[BasisIndex, complex],
        n_spins: int,
        spin_twice: int = 1,
        max_rank: Optional[int] = None,
    ) -> "WignerCoeffs":
        """Build from ``{((j1, m1), ..., (jN, mN)): value}``."""
        rank = spin_twice if max_rank is None else max_rank
        for index in entries:
            if len(index) != n_spins:
                raise ShapeMismatchError(f"index {index} does not address {n_spins} spheres")
            if max_rank is None:
                rank = max([rank] + [j for j, _ in index])
        data = np.zeros((n_slots(rank),) * n_spins, dtype=complex)
        for index, value in entries.items():
            for j, m in index:
                if j < 0 or abs(m) > j:
                    raise ShapeMismatchError(f"invalid (j, m) = ({j}, {m}) in {index}")
                if j > rank:
                    raise ShapeMismatchError(f"rank {j} in {index} exceeds max_rank {rank}")
            data[tuple(flat_index(j, m) for j, m in index)] += value
        return cls(n_spins, spin_twice, data)

    @classmethod
    def unit(cls, index: BasisIndex, spin_twice: int = 1, max_rank: Optional[int] = None, value: complex = 1.0) -> "WignerCoeffs":
        return cls.from_dict({tuple(index): value}, len(index), spin_twice, max_rank)

    @classmethod
    def constant(cls, n_spins: int, value: complex, spin_twice: int = 1) -> "WignerCoeffs":
        """The constant function ``value`` (only the all-(0,0) coefficient)."""
        return cls.unit(((0, 0),) * n_spins, spin_twice, value=value * math.sqrt(4.0 * math.pi) ** n_spins)

    # shape

    @property
    def max_rank(self) -> int:
        return _rank_of_slots(self.data.shape[0])

    @property
    def spin_J(self) -> Fraction:
        return half(self.spin_twice)

    def effective_rank(self) -> int:
        """Highest rank carrying a nonzero coefficient on any sphere (-1 if zero)."""
        nonzero = np.argwhere(self.data != 0)
        if nonzero.size == 0:
            return -1
        return max(_split_flat(int(q))[0] for q in nonzero.reshape(-1))

    def with_rank(self, max_rank: int) -> "WignerCoeffs":
        """Zero-pad or truncate every sphere to ``max_rank``."""
        current = self.data.shape[0]
        target = n_slots(max_rank)
        if target == current:
            return self
        if target < current:
            return WignerCoeffs(self.n_spins, self.spin_twice, self.data[(slice(0, target),) * self.n_spins])
        padded = np.zeros((target,) * self.n_spins, dtype=complex)
        padded[(slice(0, current),) * self.n_spins] = self.data
        return WignerCoeffs(self.n_spins, self.spin_twice, padded)

    def _aligned(self, other: "WignerCoeffs") -> Tuple[np.ndarray, np.ndarray]:
        if self.n_spins != other.n_spins or self.spin_twice != other.spin_twice:
            raise ShapeMismatchError(
                f"Wigner functions differ: {self.n_spins} spheres J={self.spin_J} "
                f"vs {other.n_spins} spheres J={other.spin_J}"
            )
        rank = max(self.max_rank, other.max_rank)
        return self.with_rank(rank).data, other.with_rank(rank).data

    # mapping view

    def items(self) -> Iterator[Tuple[BasisIndex, complex]]:
        """Nonzero coefficients in ascending flat-index order."""
        for position in np.argwhere(self.data != 0):
            index = tuple(_split_flat(int(q)) for q in position)
            yield index, complex(self.data[tuple(position)])

    def to_dict(self) -> Dict[BasisIndex, complex]:
        return dict(self.items())

    def __getitem__(self, index: BasisIndex) -> complex:
        if len(index) != self.n_spins:
            raise ShapeMismatchError(f"index {index} does not address {self.n_spins} spheres")
        if any(j > self.max_rank or abs(m) > j for j, m in index):
            return 0j
        return complex(self.data[tuple(flat_index(j, m) for j, m in index)])

    # arithmetic

    def __add__(self, other: "WignerCoeffs") -> "WignerCoeffs":
        left, right = self._aligned(other)
        return WignerCoeffs(self.n_spins, self.spin_twice, left + right)

    def __sub__(self, other: "WignerCoeffs") -> "WignerCoeffs":
        left, right = self._aligned(other)
        return WignerCoeffs(self.n_spins, self.spin_twice, left - right)

    def __neg__(self) -> "WignerCoeffs":
        return WignerCoeffs(self.n_spins, self.spin_twice, -self.data)

    def __mul__(self, scalar: complex) -> "WignerCoeffs":
        return WignerCoeffs(self.n_spins, self.spin_twice, self.data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "WignerCoeffs":
        return WignerCoeffs(self.n_spins, self.spin_twice, self.data / scalar)

    def conj(self) -> "WignerCoeffs":
        """Coefficients of the complex-conjugate function, i.e. W(A^dagger)."""
        pairs = rank_pairs(self.max_rank)
        permutation = np.array([flat_index(j, -m) for j, m in pairs])
        signs = np.array([(-1.0) ** m for _, m in pairs])
        data = self.data.conj()
        for axis in range(self.n_spins):
            data = np.take(data, permutation, axis=axis)
            shape = [1] * self.n_spins
            shape[axis] = -1
            data = data * signs.reshape(shape)
        return WignerCoeffs(self.n_spins, self.spin_twice, data)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def max_abs_diff(self, other: "WignerCoeffs") -> float:
        left, right = self._aligned(other)
        return float(np.max(np.abs(left - right), initial=0.0))

    def allclose(self, other: "WignerCoeffs", atol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= atol

    def __str__(self) -> str:
        terms = [f"{value.real:+.6g}{value.imag:+.6g}j {index}" for index, value in self.items()]
        header = f"WignerCoeffs(n_spins={self.n_spins}, J={self.spin_J}, max_rank={self.max_rank})"
        return "\n".join([header] + ["  " + term for term in terms])

    # serialization

    def to_json(self) -> dict:
        return {
            "n_spins": self.n_spins,
            "spin_2J": self.spin_twice,
            "max_rank": self.max_rank,
            "entries": [
                {"jm": [[j, m] for j, m in index], "re": float(value.real), "im": float(value.imag)}
                for index, value in self.items()
            ],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "WignerCoeffs":
        entries = {}
        for entry in payload.get("entries", []):
            index = tuple((int(j), int(m)) for j, m in entry["jm"])
            entries[index] = entries.get(index, 0) + complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        return cls.from_dict(
            entries,
            int(payload["n_spins"]),
            int(payload.get("spin_2J", 1)),
            payload.get("max_rank"),
        )


@dataclass(frozen=True)
class SphereAngles:
    """One point (theta_k, phi_k) per sphere; phi is wrapped into [0, 2 pi)."""

    pairs: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        cleaned = []
        for theta, phi in self.pairs:
            if not 0.0 <= theta <= math.pi:
                raise ValueError(f"theta={theta} outside [0, pi]")
            cleaned.append((float(theta), float(phi) % (2.0 * math.pi)))
        object.__setattr__(self, "pairs", tuple(cleaned))

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "SphereAngles":
        """From ``[theta_1, phi_1, theta_2, phi_2, ...]``."""
        if len(values) % 2:
            raise ValueError("angles must come in (theta, phi) pairs")
        return cls(tuple((values[i], values[i + 1]) for i in range(0, len(values), 2)))

    @classmethod
    def random(cls, n_spins: int, rng: np.random.Generator) -> "SphereAngles":
        """Points uniformly distributed over each sphere."""
        thetas = np.arccos(rng.uniform(-1.0, 1.0, n_spins))
        phis = rng.uniform(0.0, 2.0 * math.pi, n_spins)
        return cls(tuple(zip(thetas.tolist(), phis.tolist())))

    def __len__(self) -> int:
        return len(self.pairs)


def spherical_harmonic(j: int, m: int, theta, phi):
    """Y_{jm}(theta, phi) with the Condon-Shortley phase, vectorized over angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    am = abs(m)
    norm = math.sqrt((2 * j + 1) / (4.0 * math.pi) * math.factorial(j - am) / math.factorial(j + am))
    value = norm * lpmv(am, j, np.cos(theta)) * np.exp(1j * am * phi)
    if m < 0:
        value = (-1) ** am * np.conj(value)
    return value


def harmonics(max_rank: int, theta, phi) -> np.ndarray:
    """All Y_{jm} with j <= max_rank stacked along a leading flat-index axis."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    return np.stack([spherical_harmonic(j, m, theta, phi) for j, m in rank_pairs(max_rank)])


def wigner_kernel(J: HalfInt, theta: float, phi: float) -> np.ndarray:
    """Single-spin kernel Delta_J(theta, phi) = sum_jm Y_jm T_jm^dagger.

    The kernel is hermitian and ``tr(Delta_J A)`` is the Wigner function of A.
    """
    spin_twice = twice(J)
    values = harmonics(spin_twice, theta, phi)
    stack = tensor_stack(spin_twice)
    return np.einsum("q,qab->ab", values, stack.conj().transpose(0, 2, 1))


def wigner_transform(op: SpinOperator) -> WignerCoeffs:
    """Wigner function of ``op``: coefficient of each product harmonic is tr(T_idx^dagger op)."""
    return WignerCoeffs(op.n_spins, op.spin_twice, basis_coefficients(op))


def inverse_wigner(w: WignerCoeffs) -> SpinOperator:
    """Operator whose Wigner function is ``w``.

    Raises:
        UnrepresentableRankError: If a nonzero coefficient has rank above 2J.
    """
    rank = w.effective_rank()
    if rank > w.spin_twice:
        raise UnrepresentableRankError(rank, w.spin_J)
    data = w.with_rank(w.spin_twice).data
    stack = tensor_stack(w.spin_twice)
    n = w.n_spins
    tensor = data
    for _ in range(n):
        tensor = np.tensordot(tensor, stack, axes=([0], [0]))
    order = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    dim = (w.spin_twice + 1) ** n
    return SpinOperator(n, w.spin_twice, tensor.transpose(order).reshape(dim, dim))


def _contract_spheres(data: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    result = data
    for matrix in matrices:
        result = np.tensordot(result, matrix, axes=([0], [0]))
    return result


def evaluate(w: WignerCoeffs, angles: Union[SphereAngles, Sequence[Tuple[float, float]]]) -> complex:
    """Value of the Wigner function at one point per sphere."""
    if not isinstance(angles, SphereAngles):
        angles = SphereAngles(tuple(tuple(pair) for pair in angles))
    if len(angles) != w.n_spins:
        raise ShapeMismatchError(f"{len(angles)} angle pairs given for {w.n_spins} spheres")
    vectors = [harmonics(w.max_rank, theta, phi) for theta, phi in angles.pairs]
    return complex(_contract_spheres(w.data, vectors))


def evaluate_grid(w: WignerCoeffs, nodes: Sequence[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Values on a tensor-product set of points.

    Args:
        w: Wigner function.
        nodes: Per sphere, a pair of equally shaped ``theta`` and ``phi`` arrays.

    Returns:
        Array of shape ``shape_1 + shape_2 + ... + shape_N``.
    """
    if len(nodes) != w.n_spins:
        raise ShapeMismatchError(f"{len(nodes)} node sets given for {w.n_spins} spheres")
    matrices = []
    shapes = []
    for theta, phi in nodes:
        values = harmonics(w.max_rank, theta, phi)
        shapes.extend(values.shape[1:])
        matrices.append(values.reshape(values.shape[0], -1))
    return _contract_spheres(w.data, matrices).reshape(shapes)


def _check_pair(f: WignerCoeffs, g: WignerCoeffs) -> None:
    if f.n_spins != g.n_spins or f.spin_twice != g.spin_twice:
        raise ShapeMismatchError(
            f"Wigner functions differ: {f.n_spins} spheres J={f.spin_J} vs {g.n_spins} spheres J={g.spin_J}"
        )


def bilinear(f: WignerCoeffs, g: WignerCoeffs, kernels: Sequence[np.ndarray]) -> np.ndarray:
    """Contract ``f x g`` with one (D_out, D_f, D_g) kernel per sphere."""
    n = f.n_spins
    tensor = np.multiply.outer(f.data, g.data)
    tensor = tensor.transpose([axis for k in range(n) for axis in (k, n + k)])
    for kernel in kernels:
        tensor = np.tensordot(tensor, kernel, axes=([0, 1], [1, 2]))
    return tensor


def poisson_bracket(f: WignerCoeffs, g: WignerCoeffs, k: int) -> WignerCoeffs:
    """Spherical Poisson bracket {f, g}^{(k)} acting on the variables of sphere k (1-based).

    The remaining spheres are multiplied pointwise.
    """
    _check_pair(f, g)
    if not 1 <= k <= f.n_spins:
        raise SpinSlotError(f"sphere {k} out of range 1..{f.n_spins}")
    product = product_kernel(f.max_rank, g.max_rank)
    kernels = [product] * f.n_spins
    kernels[k - 1] = bracket_kernel(f.max_rank, g.max_rank)
    return WignerCoeffs(f.n_spins, f.spin_twice, bilinear(f, g, kernels))


def pointwise_product(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """Ordinary product of two Wigner functions; ranks add per sphere."""
    _check_pair(f, g)
    kernel = product_kernel(f.max_rank, g.max_rank)
    return WignerCoeffs(f.n_spins, f.spin_twice, bilinear(f, g, [kernel] * f.n_spins))


def project_rank(w: WignerCoeffs, max_j: Optional[int] = None) -> WignerCoeffs:
    """Drop every component with a rank above ``max_j`` (default 2J) on any sphere."""
    limit = w.spin_twice if max_j is None else max_j
    if limit >= w.max_rank:
        return w
    return w.with_rank(limit)


def inner(f: WignerCoeffs, g: WignerCoeffs) -> complex:
    """Integral of conj(f) g over all spheres, equal to tr(F^dagger G)."""
    left, right = f._aligned(g)
    return complex(np.vdot(left, right))


def coherence_split(w: WignerCoeffs, slot: int) -> WignerCoeffs:
    """Part W_A of ``w`` with ``w = W_A + conj(W_A)`` for a real ``w``.

    W_A keeps the components with m < 0 on sphere ``slot`` and half of the
    components with m = 0 there.
    """
    if not 1 <= slot <= w.n_spins:
        raise SpinSlotError(f"sphere {slot} out of range 1..{w.n_spins}")
    weights = np.array([1.0 if m < 0 else (0.5 if m == 0 else 0.0) for _, m in rank_pairs(w.max_rank)])
    shape = [1] * w.n_spins
    shape[slot - 1] = -1
    return WignerCoeffs(w.n_spins, w.spin_twice, w.data * weights.reshape(shape))
