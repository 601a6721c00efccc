#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Angular-momentum coupling coefficients and the bilinear kernels built on them.

All spin quantities are handled internally as *twice* their value so that
half-integers stay exact. Clebsch-Gordan and 6-j symbols are evaluated with
the Racah sums over exact integer factorials; only the final square root is
taken in floating point. Selection-rule violations yield 0, never an error.

Per-sphere spherical-harmonic coefficients are stored in the flat order
``q = j*j + j + m``, so a sphere truncated at rank ``r`` has ``(r+1)**2``
slots.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple, Union

import numpy as np

__all__ = [
    "R",
    "HalfInt",
    "AngularTables",
    "TABLES",
    "twice",
    "half",
    "flat_index",
    "rank_pairs",
    "n_slots",
    "clebsch_gordan",
    "wigner_6j",
    "coeff_Q",
    "coeff_Z",
    "coeff_U",
    "coeff_Lambda",
    "product_kernel",
    "bracket_kernel",
    "star_kernel",
    "trikernel",
    "coefficient_rows",
]

# Normalization of the spherical Poisson bracket.
R = math.sqrt(3.0 / (8.0 * math.pi))

HalfInt = Union[int, float, Fraction, str]


def twice(value: HalfInt) -> int:
    """Return ``2 * value`` as an exact integer.

    Args:
        value: An integer or half-integer given as int, float, Fraction or
            a string such as ``"3/2"``.

    Raises:
        ValueError: If ``value`` is not a multiple of 1/2.
    """
    if isinstance(value, str):
        value = Fraction(value)
    doubled = 2 * value
    rounded = int(round(doubled))
    if abs(doubled - rounded) > 1e-9:
        raise ValueError(f"{value!r} is not an integer or half-integer")
    return rounded


def half(twice_value: int) -> Fraction:
    return Fraction(twice_value, 2)


def flat_index(j: int, m: int) -> int:
    return j * j + j + m


def n_slots(max_rank: int) -> int:
    return (max_rank + 1) ** 2


def rank_pairs(max_rank: int) -> List[Tuple[int, int]]:
    """All (j, m) with j <= max_rank in flat-index order."""
    return [(j, m) for j in range(max_rank + 1) for m in range(-j, j + 1)]


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def _signed_sqrt(sign_part: Fraction, radicand: Fraction) -> float:
    """Evaluate ``sign_part * sqrt(radicand)`` with one rounding step."""
    if sign_part == 0 or radicand == 0:
        return 0.0
    magnitude = math.sqrt(float(sign_part * sign_part * radicand))
    return magnitude if sign_part > 0 else -magnitude


def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tL: int, tM: int) -> float:
    if tM != tm1 + tm2:
        return 0.0
    if min(tj1, tj2, tL) < 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tL:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tL + tM) % 2 or (tj1 + tj2 + tL) % 2:
        return 0.0
    if tL < abs(tj1 - tj2) or tL > tj1 + tj2:
        return 0.0

    a = (tj1 + tj2 - tL) // 2
    b = (tj1 - tj2 + tL) // 2
    c = (-tj1 + tj2 + tL) // 2
    radicand = Fraction((tL + 1) * _factorial(a) * _factorial(b) * _factorial(c), _factorial((tj1 + tj2 + tL) // 2 + 1))
    radicand *= (
        _factorial((tL + tM) // 2)
        * _factorial((tL - tM) // 2)
        * _factorial((tj1 - tm1) // 2)
        * _factorial((tj1 + tm1) // 2)
        * _factorial((tj2 - tm2) // 2)
        * _factorial((tj2 + tm2) // 2)
    )

    e1 = (tj1 - tm1) // 2
    e2 = (tj2 + tm2) // 2
    e3 = (tL - tj2 + tm1) // 2
    e4 = (tL - tj1 - tm2) // 2
    total = Fraction(0)
    for k in range(max(0, -e3, -e4), min(a, e1, e2) + 1):
        denominator = (
            _factorial(k)
            * _factorial(a - k)
            * _factorial(e1 - k)
            * _factorial(e2 - k)
            * _factorial(e3 + k)
            * _factorial(e4 + k)
        )
        total += Fraction((-1) ** k, denominator)
    return _signed_sqrt(total, radicand)


def _triangle_twice(ta: int, tb: int, tc: int) -> bool:
    if min(ta, tb, tc) < 0 or (ta + tb + tc) % 2:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def _delta_squared(ta: int, tb: int, tc: int) -> Fraction:
    return Fraction(
        _factorial((ta + tb - tc) // 2) * _factorial((ta - tb + tc) // 2) * _factorial((-ta + tb + tc) // 2),
        _factorial((ta + tb + tc) // 2 + 1),
    )


def _sixj_twice(ta: int, tb: int, tc: int, td: int, te: int, tf: int) -> float:
    """Racah sum for {a b c; d e f} in twice units."""
    triads = ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc))
    if not all(_triangle_twice(*triad) for triad in triads):
        return 0.0

    radicand = Fraction(1)
    for triad in triads:
        radicand *= _delta_squared(*triad)

    lower = [sum(triad) // 2 for triad in triads]
    upper = [(ta + tb + td + te) // 2, (ta + tc + td + tf) // 2, (tb + tc + te + tf) // 2]
    total = Fraction(0)
    for t in range(max(lower), min(upper) + 1):
        denominator = 1
        for value in lower:
            denominator *= _factorial(t - value)
        for value in upper:
            denominator *= _factorial(value - t)
        total += Fraction((-1) ** t * _factorial(t + 1), denominator)
    return _signed_sqrt(total, radicand)


class AngularTables:
    """Memoized coupling coefficients keyed by twice-integer tuples.

    Entries are filled on first use and never evicted; recomputation of an
    entry reproduces it bit-for-bit because every value comes from exact
    rational arithmetic followed by a single square root.
    """

    def __init__(self):
        self.cg_cache: Dict[Tuple[int, ...], float] = {}
        self.sixj_cache: Dict[Tuple[int, ...], float] = {}
        self.z_cache: Dict[Tuple[int, ...], float] = {}
        self.u_cache: Dict[Tuple[int, ...], complex] = {}
        self.q_cache: Dict[Tuple[int, ...], float] = {}
        self.lambda_cache: Dict[Tuple[int, ...], complex] = {}

    def cg(self, j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, L: HalfInt, M: HalfInt) -> float:
        key = (twice(j1), twice(m1), twice(j2), twice(m2), twice(L), twice(M))
        value = self.cg_cache.get(key)
        if value is None:
            value = _cg_twice(*key)
            self.cg_cache[key] = value
        return value

    def sixj(self, j1: HalfInt, j2: HalfInt, L: HalfInt, J: HalfInt) -> float:
        key = (twice(j1), twice(j2), twice(L), twice(J))
        value = self.sixj_cache.get(key)
        if value is None:
            tj1, tj2, tL, tJ = key
            value = _sixj_twice(tj1, tj2, tL, tJ, tJ, tJ)
            self.sixj_cache[key] = value
        return value

    def Q(self, J: HalfInt, j1: HalfInt, j2: HalfInt, L: HalfInt) -> float:
        key = (twice(J), twice(j1), twice(j2), twice(L))
        value = self.q_cache.get(key)
        if value is None:
            tJ, tj1, tj2, tL = key
            if tL % 2 or tj1 % 2 or tj2 % 2 or tL > 2 * tJ:
                value = 0.0
            else:
                sign = -1.0 if (tJ + tL // 2) % 2 else 1.0
                value = sign * math.sqrt((tj1 + 1) * (tj2 + 1)) * self.sixj(j1, j2, L, J)
            self.q_cache[key] = value
        return value

    def Z(self, j1: int, j2: int, L: int) -> float:
        key = (twice(j1), twice(j2), twice(L))
        value = self.z_cache.get(key)
        if value is None:
            value = math.sqrt((2 * j1 + 1) * (2 * j2 + 1) / (4.0 * math.pi * (2 * L + 1))) * self.cg(j1, 0, j2, 0, L, 0)
            self.z_cache[key] = value
        return value

    def U(self, j1: int, j2: int, L: int) -> complex:
        key = (twice(j1), twice(j2), twice(L))
        value = self.u_cache.get(key)
        if value is None:
            if (L - j1 - j2) % 2 == 0:
                value = 0j
            else:
                # the parity bracket [1 - (-1)^(L-j1-j2)] equals 2 here
                magnitude = (
                    2.0
                    * math.sqrt(j1 * (j1 + 1) * L * (L + 1))
                    * math.sqrt((2 * j1 + 1) * (2 * j2 + 1) / (4.0 * math.pi * (2 * L + 1)))
                    * self.cg(j1, 1, j2, 0, L, 1)
                )
                value = complex(0.0, -magnitude / (2.0 * R))
            self.u_cache[key] = value
        return value

    def Lambda(self, j1: int, j2: int, L: int) -> complex:
        key = (twice(j1), twice(j2), twice(L))
        value = self.lambda_cache.get(key)
        if value is None:
            value = math.sqrt(2.0 * math.pi) * self.Z(j1, j2, L) - 0.5j * self.U(j1, j2, L)
            self.lambda_cache[key] = value
        return value


TABLES = AngularTables()


def clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, L: HalfInt, M: HalfInt) -> float:
    """Clebsch-Gordan coefficient C^{L M}_{j1 m1 j2 m2}, Condon-Shortley phase.

    Returns 0 whenever ``M != m1 + m2`` or a triangle/range rule fails.
    """
    return TABLES.cg(j1, m1, j2, m2, L, M)


def wigner_6j(j1: HalfInt, j2: HalfInt, L: HalfInt, J: HalfInt) -> float:
    """The 6-j symbol {j1 j2 L; J J J}."""
    return TABLES.sixj(j1, j2, L, J)


def coeff_Q(J: HalfInt, j1: int, j2: int, L: int) -> float:
    """Structure constant of tensor-operator products for spin J.

    ``T_{j1 m1} T_{j2 m2} = sum_L Q C^{L M}_{j1 m1 j2 m2} T_{L M}``; zero for L > 2J.
    """
    return TABLES.Q(J, j1, j2, L)


def coeff_Z(j1: int, j2: int, L: int) -> float:
    """Coefficient of the pointwise product of two spherical harmonics."""
    return TABLES.Z(j1, j2, L)


def coeff_U(j1: int, j2: int, L: int) -> complex:
    """Coefficient of the Poisson bracket of two spherical harmonics."""
    return TABLES.U(j1, j2, L)


def coeff_Lambda(j1: int, j2: int, L: int) -> complex:
    """``sqrt(2 pi) Z - (i/2) U``, the single-spin prestar coefficient."""
    return TABLES.Lambda(j1, j2, L)


def _build_kernel(r1: int, r2: int, r_out: int, coefficient) -> np.ndarray:
    kernel = np.zeros((n_slots(r_out), n_slots(r1), n_slots(r2)), dtype=complex)
    for j1, m1 in rank_pairs(r1):
        for j2, m2 in rank_pairs(r2):
            M = m1 + m2
            for L in range(abs(j1 - j2), min(j1 + j2, r_out) + 1):
                if abs(M) > L:
                    continue
                value = coefficient(j1, j2, L)
                if value == 0:
                    continue
                kernel[flat_index(L, M), flat_index(j1, m1), flat_index(j2, m2)] = value * TABLES.cg(j1, m1, j2, m2, L, M)
    kernel.setflags(write=False)
    return kernel


@lru_cache(maxsize=None)
def product_kernel(r1: int, r2: int) -> np.ndarray:
    """K[c, a, b] with Y_a Y_b = sum_c K[c, a, b] Y_c (output rank r1 + r2)."""
    return _build_kernel(r1, r2, r1 + r2, TABLES.Z)


@lru_cache(maxsize=None)
def bracket_kernel(r1: int, r2: int) -> np.ndarray:
    """K[c, a, b] with {Y_a, Y_b} = sum_c K[c, a, b] Y_c (output rank r1 + r2)."""
    return _build_kernel(r1, r2, r1 + r2, TABLES.U)


@lru_cache(maxsize=None)
def star_kernel(r1: int, r2: int) -> np.ndarray:
    """Per-sphere prestar kernel sqrt(2 pi) K_product - (i/2) K_bracket."""
    kernel = _build_kernel(r1, r2, r1 + r2, TABLES.Lambda)
    return kernel


@lru_cache(maxsize=None)
def trikernel(spin_twice: int) -> np.ndarray:
    """Expansion of tr[Delta Delta Delta] for spin J = spin_twice / 2.

    Inputs and output are truncated at rank 2J; entry [c, a, b] is
    ``Q^{(J)}_{j1 j2 L} C^{L M}_{j1 m1 j2 m2}``.
    """
    J = half(spin_twice)
    return _build_kernel(spin_twice, spin_twice, spin_twice, lambda j1, j2, L: TABLES.Q(J, j1, j2, L))


def coefficient_rows(max_j: int) -> List[Tuple[str, int, int, int, float, float]]:
    """Nonzero Z, U, Q and Lambda values with j1, j2, L <= max_j.

    Q is tabulated for the spin J = max_j / 2 whose operator ranks reach
    ``max_j``.
    """
    J = half(max_j)
    rows = []
    sources = (
        ("Z", TABLES.Z),
        ("U", TABLES.U),
        ("Q", lambda j1, j2, L: TABLES.Q(J, j1, j2, L)),
        ("Lambda", TABLES.Lambda),
    )
    for name, coefficient in sources:
        for j1 in range(max_j + 1):
            for j2 in range(max_j + 1):
                for L in range(abs(j1 - j2), min(j1 + j2, max_j) + 1):
                    value = complex(coefficient(j1, j2, L))
                    if abs(value) > 1e-15:
                        rows.append((name, j1, j2, L, value.real, value.imag))
    return rows
