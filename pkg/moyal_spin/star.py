#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Star algebra of spin-1/2 Wigner functions.

The prestar product of N coupled spins factorizes over spheres,

    f (*~) g = prod_k ( sqrt(2 pi) - (i/2) {., .}^{(k)} ) applied to f x g,

and expands into 2^N terms, one per subset S of spheres: Poisson brackets on
the spheres in S, pointwise products elsewhere, weighted by
``sqrt(2 pi)^(N - |S|) (-i/2)^|S|``. The star product keeps ranks 0 and 1.
Subsets are enumerated by ascending bitmask, bit k-1 standing for sphere k.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .angular import HalfInt, bracket_kernel, half, product_kernel, twice
from .exceptions import NonlinearHamiltonianError, NotNaturalHamiltonianError, ShapeMismatchError
from .spin_ops import cartesian_op
from .wigner import WignerCoeffs, bilinear, inner, poisson_bracket, pointwise_product, project_rank, wigner_transform

logger = logging.getLogger(__name__)

__all__ = [
    "StarResult",
    "star_result",
    "prestar_single",
    "star_single",
    "prestar_multi",
    "star_multi",
    "star_commutator",
    "eom_rhs",
    "eom_rhs_natural",
    "eom_rhs_linear_J",
    "subset_weight",
    "quaternion_units",
    "pauli_functions",
    "vector_wigner",
    "quaternion_inner",
    "quaternion_to_wigner",
    "wigner_to_quaternion",
    "quaternion_product_wigner",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class StarResult:
    """A star product together with the untruncated prestar product it came from."""

    prestar: WignerCoeffs
    star: WignerCoeffs


def _require_pair(f: WignerCoeffs, g: WignerCoeffs) -> None:
    if f.spin_twice != 1 or g.spin_twice != 1:
        raise ShapeMismatchError(f"star products need J=1/2, got J={f.spin_J} and J={g.spin_J}")
    if f.n_spins != g.n_spins:
        raise ShapeMismatchError(f"star product of {f.n_spins}-sphere and {g.n_spins}-sphere functions")


def subset_weight(n_spins: int, n_brackets: int) -> complex:
    """Weight ``sqrt(2 pi)^(N - l) (-i/2)^l`` of a subset with ``l`` brackets."""
    return SQRT_2PI ** (n_spins - n_brackets) * (-0.5j) ** n_brackets


def _subset_term(f: WignerCoeffs, g: WignerCoeffs, mask: int) -> np.ndarray:
    product = product_kernel(f.max_rank, g.max_rank)
    bracket = bracket_kernel(f.max_rank, g.max_rank)
    kernels = [bracket if mask >> k & 1 else product for k in range(f.n_spins)]
    return bilinear(f, g, kernels)


def _subset_sum(f: WignerCoeffs, g: WignerCoeffs, odd_only: bool = False) -> WignerCoeffs:
    n = f.n_spins
    total = None
    n_terms = 0
    for mask in range(1 << n):
        n_brackets = bin(mask).count("1")
        if odd_only and n_brackets % 2 == 0:
            continue
        term = subset_weight(n, n_brackets) * _subset_term(f, g, mask)
        total = term if total is None else total + term
        n_terms += 1
    logger.debug("Summed %d of %d subset terms on %d spheres", n_terms, 1 << n, n)
    return WignerCoeffs(n, f.spin_twice, total)


def prestar_single(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """``sqrt(2 pi) f g - (i/2) {f, g}`` for a single spin-1/2 sphere."""
    _require_pair(f, g)
    if f.n_spins != 1:
        raise ShapeMismatchError(f"prestar_single needs one sphere, got {f.n_spins}")
    return SQRT_2PI * pointwise_product(f, g) - 0.5j * poisson_bracket(f, g, 1)


def star_single(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """Single-spin star product: the prestar product projected onto ranks 0 and 1."""
    return project_rank(prestar_single(f, g), 1)


def prestar_multi(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """Untruncated N-spin prestar product, summed over all 2^N bracket subsets."""
    _require_pair(f, g)
    return _subset_sum(f, g)


def star_multi(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """N-spin star product: W(A B) = W_A * W_B."""
    return project_rank(prestar_multi(f, g), 1)


def star_result(f: WignerCoeffs, g: WignerCoeffs) -> StarResult:
    prestar = prestar_multi(f, g)
    return StarResult(prestar=prestar, star=project_rank(prestar, 1))


def star_commutator(f: WignerCoeffs, g: WignerCoeffs) -> WignerCoeffs:
    """``f * g - g * f``.

    Subsets with an even bracket count are symmetric in (f, g) and cancel, so
    only odd subsets are summed, each twice.
    """
    _require_pair(f, g)
    return project_rank(2.0 * _subset_sum(f, g, odd_only=True), 1)


def eom_rhs(W_H: WignerCoeffs, W_rho: WignerCoeffs) -> WignerCoeffs:
    """Time derivative ``-i [W_H, W_rho]_*`` of a Wigner function under W_H.

    Args:
        W_H: Wigner function of the Hamiltonian.
        W_rho: Wigner function of the evolving operator.

    Returns:
        dW_rho/dt; its all-(0,0) coefficient is exactly zero.
    """
    _require_pair(W_H, W_rho)
    rhs = project_rank(-2.0j * _subset_sum(W_H, W_rho, odd_only=True), 1)
    return _without_trace(rhs)


def _without_trace(w: WignerCoeffs) -> WignerCoeffs:
    data = np.array(w.data)
    data[(0,) * w.n_spins] = 0
    return WignerCoeffs(w.n_spins, w.spin_twice, data)


def _check_natural(W_H: WignerCoeffs) -> None:
    for index, _ in W_H.items():
        if sum(1 for j, _ in index if j >= 1) > 2:
            raise NotNaturalHamiltonianError(index)


def eom_rhs_natural(W_H: WignerCoeffs, W_rho: WignerCoeffs) -> WignerCoeffs:
    """Equation of motion for Hamiltonians with only linear and bilinear terms.

    ``sqrt(2 pi)^(N-1) P sum_k {W_rho, W_H}^{(k)}``; the triple and higher
    brackets of the full expansion vanish for such Hamiltonians.

    Raises:
        NotNaturalHamiltonianError: If a term of W_H acts on three or more spheres.
    """
    _require_pair(W_H, W_rho)
    _check_natural(W_H)
    n = W_rho.n_spins
    total = poisson_bracket(W_rho, W_H, 1)
    for k in range(2, n + 1):
        total = total + poisson_bracket(W_rho, W_H, k)
    return _without_trace(project_rank(SQRT_2PI ** (n - 1) * total, 1))


def eom_rhs_linear_J(W_H: WignerCoeffs, W_rho: WignerCoeffs, J: Optional[HalfInt] = None) -> WignerCoeffs:
    """Single spin J evolving under a Hamiltonian linear in the spin operators.

    Returns ``N_J {W_rho, W_H}`` with ``N_J = 1 / sqrt(2 J (J+1) (2J+1) / 3)``.

    Raises:
        NonlinearHamiltonianError: If W_H carries a rank above 1.
    """
    spin_twice = W_rho.spin_twice if J is None else twice(J)
    if W_H.n_spins != 1 or W_rho.n_spins != 1:
        raise ShapeMismatchError("eom_rhs_linear_J acts on a single sphere")
    if W_H.spin_twice != spin_twice or W_rho.spin_twice != spin_twice:
        raise ShapeMismatchError(f"J={half(spin_twice)} does not match the Wigner functions")
    rank = W_H.effective_rank()
    if rank > 1:
        raise NonlinearHamiltonianError(rank)
    spin = half(spin_twice)
    norm = 1.0 / math.sqrt(float(2 * spin * (spin + 1) * (2 * spin + 1) / 3))
    return project_rank(norm * poisson_bracket(W_rho, W_H, 1))


# quaternions


def pauli_functions() -> Tuple[WignerCoeffs, WignerCoeffs, WignerCoeffs]:
    """Real single-sphere functions W(sigma_x), W(sigma_y), W(sigma_z)."""
    return tuple(2.0 * wigner_transform(cartesian_op(1, [(1, axis)])) for axis in "xyz")


def quaternion_units() -> Dict[str, WignerCoeffs]:
    """Wigner functions of the quaternion units, closed under the star product.

    ``W_1 = 1/sqrt(2 pi)`` and ``W_i, W_j, W_k = -i W(sigma_x), -i W(sigma_y), -i W(sigma_z)``.
    """
    w_x, w_y, w_z = pauli_functions()
    return {
        "1": WignerCoeffs.constant(1, 1.0 / SQRT_2PI),
        "i": -1j * w_x,
        "j": -1j * w_y,
        "k": -1j * w_z,
    }


def vector_wigner(v: Sequence[float]) -> WignerCoeffs:
    """``v . (W(sigma_x), W(sigma_y), W(sigma_z))``."""
    w_x, w_y, w_z = pauli_functions()
    return v[0] * w_x + v[1] * w_y + v[2] * w_z


def quaternion_inner(f: WignerCoeffs, g: WignerCoeffs) -> complex:
    """``(1/2) int f g dOmega`` (no complex conjugation)."""
    return 0.5 * inner(f.conj(), g)


def quaternion_to_wigner(r: complex, v: Sequence[complex]) -> WignerCoeffs:
    """Wigner function of the quaternion ``r + v_1 i + v_2 j + v_3 k``."""
    units = quaternion_units()
    return r * units["1"] + v[0] * units["i"] + v[1] * units["j"] + v[2] * units["k"]


def wigner_to_quaternion(w: WignerCoeffs) -> Tuple[complex, np.ndarray]:
    """Components ``(r, v)`` of a single-sphere function spanned by the quaternion units."""
    units = quaternion_units()
    components = [quaternion_inner(units[key], w) / quaternion_inner(units[key], units[key]) for key in "1ijk"]
    return components[0], np.array(components[1:])


def quaternion_product_wigner(
    r1: complex, w_v1: WignerCoeffs, r2: complex, w_v2: WignerCoeffs
) -> Tuple[complex, WignerCoeffs]:
    """Product of quaternions ``(r1, W_v1)`` and ``(r2, W_v2)`` with vector parts as Wigner functions.

    Vector parts are real functions ``v . W(sigma)``. The scalar part is
    ``r1 r2 - <W_v1|W_v2>`` and the vector part
    ``r1 W_v2 + r2 W_v1 - (1/2) {W_v1, W_v2}``.
    The scalar part is returned as a float when its imaginary part vanishes.
    """
    scalar = r1 * r2 - quaternion_inner(w_v1, w_v2)
    vector = r1 * w_v2 + r2 * w_v1 - 0.5 * poisson_bracket(w_v1, w_v2, 1)
    if abs(scalar.imag) < 1e-15:
        scalar = scalar.real
    return scalar, project_rank(vector, 1)
