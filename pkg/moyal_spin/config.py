#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Numerical tolerances, defaults and run settings for moyal-spin."""

from __future__ import annotations

import json
import logging
import os

logger = logging.getLogger(__name__)

ENABLE_DEBUG = bool(0)

# Coefficients below this magnitude are stored as exact zeros.
DROP_TOL = 1e-14

HERMITIAN_TOL = 1e-10   # relative to the Frobenius norm
TRACE_TOL = 1e-10
EIGEN_FLOOR = 1e-14     # eigenvalues below this contribute 0 entropy

COEFF_TOL = 1e-9        # exact coefficient identities
QUAD_TOL = 1e-8         # quadrature-based identities
REALITY_TOL = 1e-11

DEFAULT_N_THETA = 8
DEFAULT_RESOLUTION = 32
DEFAULT_SEED = 0
DEFAULT_ORACLE_TOLERANCE = 1e-10

THREADS_ENV_VAR = "MOYAL_SPIN_THREADS"


def num_threads() -> int:
    """Return the worker cap from MOYAL_SPIN_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV_VAR, raw)
        return 1
    if value < 1:
        logger.warning("Ignoring %s=%r: must be positive", THREADS_ENV_VAR, raw)
        return 1
    return value


class RunConfig:
    """Settings shared by the command-line subcommands."""

    def __init__(self, **kwargs):
        self.out_dir = kwargs.get("out_dir", "moyal_out")
        self.seed = int(kwargs.get("seed", DEFAULT_SEED))
        self.resolution = int(kwargs.get("resolution", DEFAULT_RESOLUTION))
        self.n_theta = int(kwargs.get("n_theta", DEFAULT_N_THETA))
        self.oracle_tolerance = float(kwargs.get("oracle_tolerance", DEFAULT_ORACLE_TOLERANCE))
        self.float_digits = int(kwargs.get("float_digits", 17))
        cap = num_threads()
        requested = int(kwargs.get("threads", cap))
        if requested > cap:
            logger.info("Capping threads at %d (%s)", cap, THREADS_ENV_VAR)
        self.threads = max(1, min(requested, cap))

    @classmethod
    def from_json(cls, json_file):
        print(f"Loading config from {json_file}")
        with open(json_file, "r") as f:
            config_dict = json.load(f)
        return cls(**config_dict)

    def updated(self, **overrides) -> "RunConfig":
        """Return a copy with every non-None override applied."""
        values = dict(self.__dict__)
        values.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfig(**values)

    def __str__(self):
        return "\n".join(f"{key}: {value}" for key, value in self.__dict__.items())
