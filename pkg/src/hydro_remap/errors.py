"""
Exceptions raised by the hydrodynamics engine.

Every error carries the location it was detected at (cell, node and step
index when known) so a failed run can be diagnosed from one message line.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


class HydroError(ValueError):
    """Base class of all engine errors."""

    def __init__(
        self,
        message: str,
        *,
        cell: tuple[int, int] | None = None,
        node: tuple[int, int] | None = None,
        step: int | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.cell = cell
        self.node = node
        self.step = step

    def __str__(self) -> str:
        location = []
        if self.step is not None:
            location.append(f"step {self.step}")
        if self.cell is not None:
            location.append(f"cell (i={self.cell[0]}, j={self.cell[1]})")
        if self.node is not None:
            location.append(f"node (I={self.node[0]}, J={self.node[1]})")
        if not location:
            return self.message
        return f"{self.message} at {', '.join(location)}"


class TangledCellError(HydroError):
    """A Lagrangian cell has a non-positive area."""


class UnphysicalStateError(HydroError):
    """Non-finite values, negative sound-speed radicand or non-positive gas pressure."""


class CflViolationError(HydroError):
    """A volume flux exceeds the admissible share of a cell, or no finite time step exists."""


class NegativeMassError(HydroError):
    """A remapped cell or node mass is not positive."""


class IsolatedMixedCellError(HydroError):
    """The volume-fraction gradient vanishes in a mixed cell."""


class VolumeFractionError(HydroError):
    """A remapped volume fraction left [0, 1] by more than the tolerance."""


class UsageError(HydroError):
    """Invalid command-line arguments."""


class ConfigError(HydroError):
    """Invalid configuration text, case name or run input."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


def first_index(mask: NDArray[np.bool_]) -> tuple[int, int] | None:
    """(i, j) of the first True entry of a ``[j, i]`` indexed mask, or None."""
    hits = np.argwhere(mask)
    if hits.size == 0:
        return None
    j, i = hits[0][-2], hits[0][-1]
    return (int(i), int(j))
