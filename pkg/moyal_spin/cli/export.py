#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Writers for surfaces, trajectories and coefficient sets (CSV, JSON, OBJ).

Output is byte-deterministic: fixed row order, ``\\n`` line endings and
floats printed with ``repr`` unless fewer digits are requested.
"""

from __future__ import annotations

import colorsys
import csv
import io
import json
import logging
import math
from abc import ABC, abstractmethod
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..exceptions import ExportError
from .props import SampledSurface

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_VERSION",
    "get_moyal_spin_version",
    "BaseExporter",
    "CsvTableExporter",
    "CsvSurfaceExporter",
    "JsonExporter",
    "render_json",
    "ObjSurfaceExporter",
    "export",
]

DEFAULT_VERSION = "0.1.0"


def get_moyal_spin_version() -> str:
    """Version of the installed distribution, or the source-tree default."""
    try:
        return version("moyal-spin")
    except PackageNotFoundError:
        return DEFAULT_VERSION


def format_float(value: float, float_digits: int = 17) -> str:
    value = float(value)
    if float_digits >= 17:
        return repr(value)
    return f"{value:.{float_digits}g}"


class BaseExporter(ABC):
    """Abstract base class for file writers.

    Args:
        path: Destination file.
        float_digits: Significant digits for floats; 17 keeps ``repr`` precision.
    """

    def __init__(self, path: Union[str, Path], float_digits: int = 17):
        self.path = Path(path)
        self.float_digits = float_digits

    def preprocess(self):
        """Create the parent directory."""
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ExportError(f"cannot create directory {self.path.parent}: {e}") from e

    @abstractmethod
    def render(self, payload) -> str:
        """Each format implements its own text rendering."""
        pass

    def export(self, payload) -> Path:
        self.preprocess()
        text = self.render(payload)
        try:
            with open(self.path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            raise ExportError(f"cannot write {self.path}: {e}") from e
        logger.info("Wrote %s", self.path)
        return self.path


class CsvTableExporter(BaseExporter):
    """Plain CSV table: a header row then numeric rows."""

    def __init__(self, path, header: Sequence[str], float_digits: int = 17):
        super().__init__(path, float_digits)
        self.header = list(header)

    def _cell(self, value) -> str:
        if isinstance(value, (float, np.floating)):
            return format_float(value, self.float_digits)
        return str(value)

    def render(self, payload: Iterable[Sequence]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in payload:
            writer.writerow([self._cell(value) for value in row])
        return buffer.getvalue()


class CsvSurfaceExporter(CsvTableExporter):
    """Surface as ``theta,phi,re,im`` rows, theta-outer."""

    def __init__(self, path, float_digits: int = 17):
        super().__init__(path, ["theta", "phi", "re", "im"], float_digits)

    def render(self, payload: SampledSurface) -> str:
        rows = (
            (float(theta), float(phi), float(payload.values[i, j].real), float(payload.values[i, j].imag))
            for i, theta in enumerate(payload.theta)
            for j, phi in enumerate(payload.phi)
        )
        return super().render(rows)


def _surface_json(surface: SampledSurface) -> dict:
    return {
        "spin_slot": surface.spin_slot,
        "fixed_angles": surface.fixed_angles,
        "decomposition_id": surface.decomposition_id,
        "theta": [float(t) for t in surface.theta],
        "phi": [float(p) for p in surface.phi],
        "re": surface.values.real.tolist(),
        "im": surface.values.imag.tolist(),
    }


class JsonExporter(BaseExporter):
    """JSON rendering of surfaces, trajectories, reports and coefficient sets.

    Objects gain a ``moyal_spin_version`` field; arrays are written as is.
    """

    def render(self, payload) -> str:
        return render_json(payload, self.float_digits)


def render_json(payload, float_digits: int = 17) -> str:
    if isinstance(payload, SampledSurface):
        payload = _surface_json(payload)
    elif hasattr(payload, "to_json"):
        payload = payload.to_json()
    if isinstance(payload, dict):
        payload = {"moyal_spin_version": get_moyal_spin_version(), **payload}
    if float_digits < 17:
        payload = _round_floats(payload, float_digits)
    return json.dumps(payload, indent=2) + "\n"


def _round_floats(value, float_digits: int):
    if isinstance(value, float):
        return float(format_float(value, float_digits))
    if isinstance(value, dict):
        return {key: _round_floats(item, float_digits) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(item, float_digits) for item in value]
    return value


class ObjSurfaceExporter(BaseExporter):
    """Wavefront OBJ mesh of a surface.

    The vertex for direction (theta, phi) sits at radius |W|; its color is the
    phase of W mapped onto the hue circle. One vertex per lattice node, quads
    between neighbouring rows with phi wrapping around.
    """

    def render(self, payload: SampledSurface) -> str:
        n_theta = len(payload.theta)
        n_phi = len(payload.phi)
        lines = [f"# moyal-spin {get_moyal_spin_version()} surface, spin {payload.spin_slot}"]
        for i, theta in enumerate(payload.theta):
            for j, phi in enumerate(payload.phi):
                value = complex(payload.values[i, j])
                radius = abs(value)
                x = radius * math.sin(theta) * math.cos(phi)
                y = radius * math.sin(theta) * math.sin(phi)
                z = radius * math.cos(theta)
                hue = (math.atan2(value.imag, value.real) / (2.0 * math.pi)) % 1.0
                red, green, blue = colorsys.hsv_to_rgb(hue, 1.0, 1.0)
                coords = " ".join(format_float(c, self.float_digits) for c in (x, y, z, red, green, blue))
                lines.append(f"v {coords}")
        for i in range(n_theta - 1):
            for j in range(n_phi):
                a = i * n_phi + j + 1
                b = i * n_phi + (j + 1) % n_phi + 1
                lines.append(f"f {a} {b} {b + n_phi} {a + n_phi}")
        return "\n".join(lines) + "\n"


EXPORTERS = {
    "csv": CsvSurfaceExporter,
    "json": JsonExporter,
    "obj": ObjSurfaceExporter,
}


def export(payload, path: Union[str, Path], fmt: Optional[str] = None, float_digits: int = 17) -> Path:
    """Write ``payload`` to ``path`` in ``fmt`` (default: the file suffix).

    Surfaces accept csv, json and obj; trajectories, reports and coefficient
    sets accept json only.
    """
    fmt = (fmt or Path(path).suffix.lstrip(".")).lower()
    if fmt not in EXPORTERS:
        raise ValueError(f"unknown export format {fmt!r}; expected one of {sorted(EXPORTERS)}")
    if fmt != "json" and not isinstance(payload, SampledSurface):
        raise ValueError(f"{type(payload).__name__} can only be exported as json")
    return EXPORTERS[fmt](path, float_digits=float_digits).export(payload)
