"""Two-way building blocks: heralded links, entanglement swapping and purification.

Pairs are two-spin :class:`MixedState` objects.  Swapping and purification act exactly on
the joint four-spin density matrix.  Besides the sampled versions, each has a
deterministic form returning the outcome-averaged post-state together with the success
probability, which the Monte-Carlo driver uses to avoid redundant linear algebra.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .. import interface
from ..analyzers import (
    BELL_CORRECTION,
    BELL_OUTCOMES,
    BsaKind,
    BsaModel,
    bsa_error_prob,
    bsa_success_prob,
    linear_optics_success,
    misidentify,
)
from ..qsim import (
    BELL_BASIS,
    CNOT,
    PAULI,
    Z_BASIS,
    DegenerateOutcomeError,
    MixedState,
    QuantumChannel,
    QubitLabel,
    apply_channel,
    apply_unitary,
    bell_state,
    measure_projective,
    partial_trace,
    reorder,
    spin,
    tensor,
)
from .config import MaxAttemptsExceeded, RepeaterConfig, RepeaterMode

# rotations applied before the bilateral CNOT in the DEJMPS variant
RX_PLUS = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)
RX_MINUS = RX_PLUS.conj()


# -- link generation ----------------------------------------------------------

def half_link_transmissivity(cfg: RepeaterConfig) -> float:
    """Source to middle station: fiber over half a link times outcoupling (detectors included)."""
    return interface.fiber_transmissivity(cfg.link.scaled(cfg.link.length_km / 2)) * cfg.emitter.eta_out


def middle_station_success(m: BsaModel) -> float:
    if m.kind is BsaKind.LINEAR_OPTICS:
        return linear_optics_success(m.aux_photons)
    return bsa_success_prob(m)


def link_success_probability(cfg: RepeaterConfig) -> float:
    return half_link_transmissivity(cfg) ** 2 * middle_station_success(cfg.bsa)


def attempt_time(cfg: RepeaterConfig) -> float:
    """Photon travel to the middle station plus the herald coming back."""
    return cfg.link.signal_time


def sample_attempts(p: float, rng: np.random.Generator, max_attempts: int) -> int:
    if p <= 0:
        raise MaxAttemptsExceeded("link success probability is zero")
    n = int(rng.geometric(min(p, 1.0)))
    if n > max_attempts:
        raise MaxAttemptsExceeded(f"no herald within {max_attempts} attempts (p={p:.3g})")
    return n


def pauli_mixture(state: MixedState, qubit: QubitLabel, error_prob: float) -> MixedState:
    """``(1-e) rho + e/3 (X rho X + Y rho Y + Z rho Z)`` on one qubit."""
    if error_prob == 0:
        return state
    w = math.sqrt(error_prob / 3)
    ch = QuantumChannel(
        (math.sqrt(1 - error_prob) * PAULI["I"], w * PAULI["X"], w * PAULI["Y"], w * PAULI["Z"]),
        (qubit,),
    )
    return apply_channel(state, ch)


def dephase(state: MixedState, qubits: Sequence[QubitLabel], t_wait: float, cfg: RepeaterConfig) -> MixedState:
    if t_wait == 0 or math.isinf(cfg.emitter.t_coh):
        return state
    for q in qubits:
        state = apply_channel(state, interface.memory_dephasing_channel(t_wait, cfg.emitter, q))
    return state


def heralded_link_state(cfg: RepeaterConfig, labels: Sequence[QubitLabel] = (spin(0), spin(1))) -> MixedState:
    """Spin pair right after the herald arrives: BSA misidentification plus one attempt of dephasing."""
    a, b = labels
    st = bell_state(a, b).density()
    st = pauli_mixture(st, b, bsa_error_prob(cfg.bsa))
    return dephase(st, (a, b), attempt_time(cfg), cfg)


def generate_link_entanglement(
    cfg: RepeaterConfig,
    rng: np.random.Generator,
    labels: Sequence[QubitLabel] = (spin(0), spin(1)),
) -> tuple[float, MixedState]:
    """Repeat attempts until one heralds; returns the elapsed time and the spin pair."""
    if cfg.mode is not RepeaterMode.TWO_WAY:
        raise ValueError("link generation belongs to two_way mode")
    n = sample_attempts(link_success_probability(cfg), rng, cfg.max_attempts)
    return n * attempt_time(cfg), heralded_link_state(cfg, labels)


# -- swapping -----------------------------------------------------------------

def _pair(state: MixedState) -> tuple[QubitLabel, QubitLabel]:
    if state.n_qubits != 2:
        raise ValueError(f"expected a two-qubit pair, got {state.n_qubits} qubits")
    return state.register


def _swap_inputs(pair_ab: MixedState, pair_bc: MixedState):
    a, b1 = _pair(pair_ab)
    b2, c = _pair(pair_bc)
    if set(pair_ab.register) & set(pair_bc.register):
        raise ValueError("the two pairs share a qubit label")
    return a, b1, b2, c, tensor(pair_ab, pair_bc)


def entanglement_swap(
    pair_ab: MixedState,
    pair_bc: MixedState,
    m: BsaModel,
    rng: np.random.Generator,
) -> MixedState | None:
    """Bell-measure the inner spins (second of ``pair_ab``, first of ``pair_bc``).

    Returns the corrected A-C pair, or ``None`` on a heralded failure.
    """
    a, b1, b2, c, joint = _swap_inputs(pair_ab, pair_bc)
    if rng.random() >= bsa_success_prob(m):
        return None
    idx, post, _ = measure_projective(joint, BELL_BASIS, rng, on=(b1, b2))
    reported = misidentify(BELL_OUTCOMES[idx], bsa_error_prob(m), rng)
    post = apply_unitary(partial_trace(post, (b1, b2)), BELL_CORRECTION[reported], (c,))
    return reorder(post, (a, c))


def swap_average(pair_ab: MixedState, pair_bc: MixedState, error_prob: float) -> MixedState:
    """Success-conditioned A-C state averaged over the Bell outcomes."""
    a, b1, b2, c, joint = _swap_inputs(pair_ab, pair_bc)
    acc = None
    for idx, outcome in enumerate(BELL_OUTCOMES):
        try:
            _, post, prob = measure_projective(joint, BELL_BASIS, on=(b1, b2), outcome=idx)
        except DegenerateOutcomeError:
            continue
        post = apply_unitary(partial_trace(post, (b1, b2)), BELL_CORRECTION[outcome], (c,))
        acc = prob * post.matrix if acc is None else acc + prob * post.matrix
    out = MixedState(post.register, acc / np.trace(acc).real)
    return reorder(pauli_mixture(out, c, error_prob), (a, c))


# -- purification -------------------------------------------------------------

def _purify_prepare(pair1: MixedState, pair2: MixedState, dejmps: bool):
    a1, b1 = _pair(pair1)
    a2, b2 = _pair(pair2)
    if set(pair1.register) & set(pair2.register):
        raise ValueError("the two pairs share a qubit label")
    st = tensor(pair1, pair2)
    if dejmps:
        for q in (a1, a2):
            st = apply_unitary(st, RX_PLUS, (q,))
        for q in (b1, b2):
            st = apply_unitary(st, RX_MINUS, (q,))
    st = apply_unitary(st, CNOT, (a1, a2))
    st = apply_unitary(st, CNOT, (b1, b2))
    return (a1, b1, a2, b2), st


def purify_branches(pair1: MixedState, pair2: MixedState, dejmps: bool = False) -> tuple[float, MixedState | None]:
    """Success probability and the kept pair (``pair1``'s labels) after one recurrence round.

    Both pairs get a bilateral CNOT (``pair1`` controls) and ``pair2`` is measured in Z on
    both sides; the round succeeds when the two results agree.
    """
    (a1, b1, a2, b2), st = _purify_prepare(pair1, pair2, dejmps)
    both = [np.kron(Z_BASIS[i], Z_BASIS[j]) for i in (0, 1) for j in (0, 1)]
    agree = both[0] + both[3]
    try:
        _, post, prob = measure_projective(st, (agree, np.eye(4) - agree), on=(a2, b2), outcome=0)
    except DegenerateOutcomeError:
        return 0.0, None
    return prob, reorder(partial_trace(post, (a2, b2)), (a1, b1))


def purify(
    pair1: MixedState,
    pair2: MixedState,
    rng: np.random.Generator,
    dejmps: bool = False,
) -> MixedState | None:
    """One sampled purification round; ``None`` when the target results disagree."""
    prob, post = purify_branches(pair1, pair2, dejmps)
    if post is None or rng.random() >= prob:
        return None
    return post
