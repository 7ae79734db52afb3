"""Asymptotic BB84 key fraction from a delivered pair's quality."""
from __future__ import annotations

import math


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def qkd_key_fraction(qber: float) -> float:
    """``max(0, 1 - 2 h(qber))``."""
    if not 0 <= qber <= 0.5:
        raise ValueError(f"qber must lie in [0, 0.5], got {qber!r}")
    return max(0.0, 1 - 2 * binary_entropy(qber))


def qber_from_fidelity(fidelity: float) -> float:
    """Error rate in either basis for a Werner pair of the given fidelity."""
    if not 0 <= fidelity <= 1:
        raise ValueError("fidelity must lie in [0, 1]")
    return min(0.5, 2 * (1 - fidelity) / 3)
