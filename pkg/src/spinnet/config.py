"""Numerical tolerances and engine limits, kept in one place."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    normalization: float = 1e-12
    hermiticity: float = 1e-12
    trace: float = 1e-12
    eigenvalue_floor: float = -1e-10
    trace_preserving: float = 1e-10
    completeness: float = 1e-10
    max_qubits: int = 14
    # Eigendecomposition-based state checks cost O(d^3); off unless asked for.
    debug_checks: bool = False


TOLERANCES = Tolerances(debug_checks=os.environ.get("SPINNET_DEBUG_CHECKS", "") not in ("", "0"))


def set_tolerances(**changes) -> Tolerances:
    """Replace fields of the global tolerance record; returns the previous record."""
    global TOLERANCES
    previous = TOLERANCES
    TOLERANCES = replace(TOLERANCES, **changes)
    return previous


def get_tolerances() -> Tolerances:
    return TOLERANCES
