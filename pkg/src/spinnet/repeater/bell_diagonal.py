"""Closed-form maps on Bell-diagonal pairs.

A Bell-diagonal pair is stored as its four weights in ``BELL_ORDER``.  With index
``k = 2x + z``, ``x`` marks the psi states (bit flip) and ``z`` the minus states (phase
flip).  Every repeater operation keeps pairs Bell-diagonal, and on that family these maps
agree with the exact density-matrix operations in :mod:`.elementary`.
"""
from __future__ import annotations

import numpy as np

from ..qsim import BELL_BASIS, MixedState, QubitLabel, reorder

Weights = tuple[float, float, float, float]

PHI_PLUS_ONLY: Weights = (1.0, 0.0, 0.0, 0.0)


def from_state(state: MixedState, a: QubitLabel, b: QubitLabel) -> Weights:
    m = reorder(state, (a, b)).matrix
    return tuple(float(np.real(np.trace(p @ m))) for p in BELL_BASIS)


def to_state(w: Weights, a: QubitLabel, b: QubitLabel) -> MixedState:
    return MixedState((a, b), sum(wk * p for wk, p in zip(w, BELL_BASIS)))


def werner(f: float) -> Weights:
    r = (1 - f) / 3
    return (f, r, r, r)


def dephase(w: Weights, coherence: float) -> Weights:
    """Phase damping with total ``coherence`` (product over both qubits)."""
    keep, flip = (1 + coherence) / 2, (1 - coherence) / 2
    return tuple(keep * w[k] + flip * w[k ^ 1] for k in range(4))


def pauli_mixture(w: Weights, error_prob: float) -> Weights:
    e = error_prob / 3
    return tuple((1 - error_prob) * w[k] + e * (w[k ^ 1] + w[k ^ 2] + w[k ^ 3]) for k in range(4))


def swap(left: Weights, right: Weights, error_prob: float = 0.0) -> Weights:
    """Corrected swap: Bell indices add modulo 2."""
    out = [0.0] * 4
    for i in range(4):
        for j in range(4):
            out[i ^ j] += left[i] * right[j]
    return pauli_mixture(tuple(out), error_prob)


def purify(held: Weights, fresh: Weights) -> tuple[float, Weights]:
    """Bilateral CNOT round: success probability and the kept pair.

    Coincidence keeps terms with equal bit-flip labels; the phase labels add.
    """
    out = [0.0] * 4
    for x in (0, 1):
        for z1 in (0, 1):
            for z2 in (0, 1):
                out[2 * x + (z1 ^ z2)] += held[2 * x + z1] * fresh[2 * x + z2]
    prob = sum(out)
    if prob <= 0:
        return 0.0, held
    return prob, tuple(v / prob for v in out)
