#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Wigner functions of coupled spins on spherical phase spaces."""

from __future__ import annotations

from .spin_ops import SpinOperator, cartesian_op, tensor_op, tensor_op_embedded
from .star import eom_rhs, star_multi
from .wigner import WignerCoeffs, evaluate, inverse_wigner, wigner_transform

__version__ = "0.1.0"

__all__ = [
    "SpinOperator",
    "WignerCoeffs",
    "cartesian_op",
    "tensor_op",
    "tensor_op_embedded",
    "wigner_transform",
    "inverse_wigner",
    "evaluate",
    "star_multi",
    "eom_rhs",
]
