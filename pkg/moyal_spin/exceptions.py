#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Exception hierarchy for moyal-spin."""

from __future__ import annotations

from typing import Optional

__all__ = [
    "MoyalSpinError",
    "RankOutOfRangeError",
    "SpinSlotError",
    "ShapeMismatchError",
    "NonHermitianError",
    "TraceError",
    "UnrepresentableRankError",
    "NotNaturalHamiltonianError",
    "NonlinearHamiltonianError",
    "GridResolutionError",
    "TimeGridError",
    "ScenarioError",
    "ExpressionError",
    "ExportError",
]


class MoyalSpinError(Exception):
    """Base class for every error raised by moyal-spin."""


class RankOutOfRangeError(MoyalSpinError, ValueError):
    """A tensor-operator rank or order lies outside 0 <= j <= 2J, |m| <= j."""

    def __init__(self, j, m, spin_J):
        super().__init__(f"rank/order out of range: j={j}, m={m} for J={spin_J}")
        self.j = j
        self.m = m
        self.spin_J = spin_J


class SpinSlotError(MoyalSpinError, ValueError):
    """A spin slot is out of range or used twice."""


class ShapeMismatchError(MoyalSpinError, ValueError):
    """Operands disagree in spin count, spin number or dimension."""


class NonHermitianError(MoyalSpinError, ValueError):
    """An operator that must be hermitian is not."""


class TraceError(MoyalSpinError, ValueError):
    """A density operator does not have unit trace."""


class UnrepresentableRankError(MoyalSpinError, ValueError):
    """A Wigner function carries ranks above 2J and has no operator image."""

    def __init__(self, max_rank: int, spin_J):
        super().__init__(f"unrepresentable rank: {max_rank} exceeds 2J for J={spin_J}")
        self.max_rank = max_rank
        self.spin_J = spin_J


class NotNaturalHamiltonianError(MoyalSpinError, ValueError):
    """The Hamiltonian contains terms acting on three or more spins."""

    def __init__(self, index):
        super().__init__(f"not a natural Hamiltonian: term {index} acts on more than two spins")
        self.index = index


class NonlinearHamiltonianError(MoyalSpinError, ValueError):
    """The Hamiltonian is not linear in the spin operators."""

    def __init__(self, rank: int):
        super().__init__(f"nonlinear Hamiltonian unsupported for J > 1/2 (rank {rank} present)")
        self.rank = rank


class GridResolutionError(MoyalSpinError, ValueError):
    """A quadrature grid cannot resolve the requested ranks."""


class TimeGridError(MoyalSpinError, ValueError):
    """Time points are unsorted or a step is not positive."""


class ScenarioError(MoyalSpinError, ValueError):
    """A scenario description is invalid.

    Args:
        message: What is wrong.
        field: Dotted path of the offending field, e.g. ``times.step``.
        line: Line number in the source file when known.
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class ExpressionError(MoyalSpinError, ValueError):
    """An operator expression failed to parse or evaluate."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}\n  {text}\n  {' ' * position}^")


class ExportError(MoyalSpinError, OSError):
    """An output file could not be written."""
