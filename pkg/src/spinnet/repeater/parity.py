"""Quantum parity code: encoder and loss-decoding probability.

``|+-_L> = ((|0...0> +- |1...1>) / sqrt(2))^{(x) n}`` over ``n`` blocks of ``m`` photons, and
``|0_L>, |1_L> = (|+_L> +- |-_L>) / sqrt(2)``.  A loss pattern is decodable when some block
arrived intact and no block was lost entirely.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .. import config
from ..qsim import CapacityError, PureState, photon
from .config import ParityCode

Number = Union[float, Fraction]

ENUMERATION_LIMIT = 20


def _plus_minus(code: ParityCode) -> tuple[np.ndarray, np.ndarray]:
    m = code.block_size
    zeros = np.zeros(2**m)
    zeros[0] = 1
    ones = np.zeros(2**m)
    ones[-1] = 1
    plus, minus = np.ones(1), np.ones(1)
    for _ in range(code.n_blocks):
        plus = np.kron(plus, (zeros + ones) / np.sqrt(2))
        minus = np.kron(minus, (zeros - ones) / np.sqrt(2))
    return plus, minus


def parity_encode(logical: Sequence[complex] | PureState, code: ParityCode) -> PureState:
    """Encode ``alpha|0> + beta|1>`` into photons ``1 .. n*m`` (block-major order)."""
    if code.n_photons > config.TOLERANCES.max_qubits:
        raise CapacityError(f"{code.n_photons} photons exceeds the dense cap of {config.TOLERANCES.max_qubits}")
    amps = logical.amplitudes if isinstance(logical, PureState) else np.asarray(logical, dtype=complex)
    if amps.shape != (2,):
        raise ValueError("logical input must be a single-qubit state")
    alpha, beta = amps / np.linalg.norm(amps)
    plus, minus = _plus_minus(code)
    zero_l = (plus + minus) / np.sqrt(2)
    one_l = (plus - minus) / np.sqrt(2)
    register = tuple(photon(k) for k in range(1, code.n_photons + 1))
    return PureState(register, alpha * zero_l + beta * one_l)


def is_correctable(code: ParityCode, lost: Sequence[bool]) -> bool:
    lost = np.asarray(lost, dtype=bool).reshape(code.n_blocks, code.block_size)
    per_block = lost.sum(axis=1)
    return bool((per_block == 0).any() and (per_block < code.block_size).all())


@lru_cache(maxsize=None)
def correctable_counts(code: ParityCode) -> tuple[int, ...]:
    """Number of decodable loss patterns with ``w`` lost photons, for ``w = 0 .. n*m``."""
    n, m, nm = code.n_blocks, code.block_size, code.n_photons
    if nm > ENUMERATION_LIMIT:
        raise CapacityError(f"enumeration over 2^{nm} patterns is above the limit 2^{ENUMERATION_LIMIT}")
    patterns = np.arange(2**nm, dtype=np.uint32)
    bits = ((patterns[:, None] >> np.arange(nm - 1, -1, -1, dtype=np.uint32)) & 1).astype(np.uint8)
    per_block = bits.reshape(-1, n, m).sum(axis=2)
    ok = (per_block == 0).any(axis=1) & (per_block < m).all(axis=1)
    weights = bits.sum(axis=1)
    return tuple(int(c) for c in np.bincount(weights[ok], minlength=nm + 1))


def _check_epsilon(epsilon: Number) -> None:
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon!r}")


def parity_loss_enumerated(code: ParityCode, epsilon: Number) -> Number:
    """Sum of pattern probabilities over every decodable pattern (exact for ``Fraction``)."""
    _check_epsilon(epsilon)
    nm = code.n_photons
    return sum(c * epsilon**w * (1 - epsilon) ** (nm - w) for w, c in enumerate(correctable_counts(code)))


def parity_loss_closed_form(code: ParityCode, epsilon: Number) -> Number:
    """``(1 - e^m)^n - (1 - e^m - (1-e)^m)^n``: every block keeps a photon, minus no block intact."""
    _check_epsilon(epsilon)
    n, m = code.n_blocks, code.block_size
    none_lost_entirely = (1 - epsilon**m) ** n
    no_block_intact = (1 - epsilon**m - (1 - epsilon) ** m) ** n
    return none_lost_entirely - no_block_intact


def parity_loss_success(code: ParityCode, epsilon: Number) -> Number:
    """Probability that independent per-photon loss ``epsilon`` leaves a decodable pattern."""
    if code.n_photons <= ENUMERATION_LIMIT:
        return parity_loss_enumerated(code, epsilon)
    return parity_loss_closed_form(code, epsilon)
