"""Bell-state analyzers and the spin-based QND photon detector.

Six analyzer families are modeled.  Five are parametric: a success probability and
an outcome-misidentification probability from closed-form scalings.  The cavity CZ
analyzer is additionally simulated at circuit level, scattering both photons off one
ancilla spin to read out the ZZ parity and then detecting the photons in the X basis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import interface
from .interface import EmitterParams, Geometry
from .qsim import (
    BELL_BASIS,
    DegenerateOutcomeError,
    HADAMARD,
    PAULI,
    X_BASIS,
    Z_BASIS,
    MixedState,
    PureState,
    QubitKind,
    QubitLabel,
    apply_channel,
    apply_unitary,
    bell_state,
    fresh_label,
    measure_projective,
    outcome_probabilities,
    partial_trace,
    sample_index,
    tensor,
)


class BsaKind(enum.Enum):
    LINEAR_OPTICS = "linear-optics"
    CAVITY_CZ = "cavity-cz"
    ACTIVE_TWO_SPIN = "active-two-spin"
    PASSIVE_SORTER = "passive-sorter"
    PASSIVE_CZ_CHAIN = "passive-cz-chain"
    ACTIVE_SFG = "active-sfg"


class BellOutcome(enum.Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    FAILURE = "failure"

    @property
    def succeeded(self) -> bool:
        return self is not BellOutcome.FAILURE


BELL_OUTCOMES = (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS)

# Pauli on the second qubit that maps each Bell state to phi+.
BELL_CORRECTION = {
    BellOutcome.PHI_PLUS: PAULI["I"],
    BellOutcome.PHI_MINUS: PAULI["Z"],
    BellOutcome.PSI_PLUS: PAULI["X"],
    BellOutcome.PSI_MINUS: PAULI["Z"] @ PAULI["X"],
}

PASSIVE_SORTER_SUCCESS = 0.75
PASSIVE_CZ_ERROR_PREFACTOR = 0.537
PASSIVE_CZ_ERROR_EXPONENT = -1.61
OPTIMAL_WIDTH_PREFACTOR = 0.350
OPTIMAL_WIDTH_EXPONENT = -0.81


@dataclass(frozen=True)
class ModelConstants:
    """Prefactors of scalings that are only known up to proportionality. All default to 1."""

    cavity_failure: float = 1.0
    sfg_failure: float = 1.0
    pulse_distortion: float = 1.0
    asymmetric_loss: float = 1.0
    active_spectral: float = 1.0
    inhomogeneous_coupling: float = 1.0


@dataclass(frozen=True)
class BsaModel:
    kind: BsaKind
    aux_photons: int = 0
    concatenations: int = 1
    n_emitters: int = 1
    pulse_width_sigma_omega: float = 0.0
    delta_gamma_1d: float = 0.0
    emitter: EmitterParams = field(default_factory=lambda: EmitterParams.waveguide(1.0))
    constants: ModelConstants = field(default_factory=ModelConstants)

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", BsaKind(self.kind))
        for name in ("aux_photons", "concatenations", "n_emitters"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.pulse_width_sigma_omega < 0 or self.delta_gamma_1d < 0:
            raise ValueError("pulse width and coupling mismatch must be >= 0")
        if self.kind is BsaKind.PASSIVE_SORTER and self.concatenations < 1:
            raise ValueError("passive sorter needs at least one concatenation")
        if self.kind is BsaKind.PASSIVE_CZ_CHAIN and self.n_emitters < 1:
            raise ValueError("passive CZ chain needs at least one emitter")


def linear_optics(aux_photons: int = 0) -> BsaModel:
    return BsaModel(BsaKind.LINEAR_OPTICS, aux_photons=aux_photons)


def deterministic_bsa() -> BsaModel:
    """Active two-spin analyzer on perfect emitters: success 1, no error."""
    return BsaModel(BsaKind.ACTIVE_TWO_SPIN, emitter=EmitterParams.waveguide(1.0))


def _clip(x: float, lo: float = 0.0, hi: float = 1.0) -> float:
    if math.isnan(x):
        return hi
    return min(hi, max(lo, x))


def _ratio(num: float, den: float) -> float:
    if num == 0:
        return 0.0
    return math.inf if den == 0 else num / den


def linear_optics_success(aux_photons: int) -> float:
    """Ladder of ancilla-assisted linear-optics analyzers: 1 - 2^-(N+1) with 2^(N+1) - 2 ancillas."""
    if aux_photons < 0:
        raise ValueError("aux_photons must be >= 0")
    level = 0
    while 2 ** (level + 2) - 2 <= aux_photons:
        level += 1
    return 1 - 2.0 ** -(level + 1)


def emission_bandwidth(p: EmitterParams) -> float:
    """Total emitter linewidth, Purcell-enhanced for cavities."""
    if p.geometry is Geometry.WAVEGUIDE:
        return interface.total_decay(p)
    return (p.gamma_rad + p.gamma_nonrad) * (1 + interface.cooperativity(p))


def bsa_success_prob(m: BsaModel) -> float:
    k = m.constants
    if m.kind is BsaKind.LINEAR_OPTICS:
        return linear_optics_success(m.aux_photons)
    if m.kind is BsaKind.CAVITY_CZ:
        c = interface.effective_cooperativity(m.emitter)
        return _clip(1 - _ratio(k.cavity_failure, c))
    if m.kind is BsaKind.ACTIVE_TWO_SPIN:
        b = interface.efficiency(m.emitter)
        return (2 * b - 1) ** 2 if b > 0.5 else 0.0
    if m.kind is BsaKind.PASSIVE_SORTER:
        return min(1 - (1 - PASSIVE_SORTER_SUCCESS) ** m.concatenations, math.nextafter(1.0, 0.0))
    if m.kind is BsaKind.PASSIVE_CZ_CHAIN:
        return 1.0
    if m.kind is BsaKind.ACTIVE_SFG:
        b = interface.efficiency(m.emitter)
        return _clip(1 - k.sfg_failure * _ratio(1 - b, b))
    raise ValueError(f"unknown analyzer kind {m.kind!r}")


def _pulse_distortion_error(m: BsaModel) -> float:
    bandwidth = m.emitter.kappa if m.emitter.geometry is Geometry.CAVITY else interface.total_decay(m.emitter)
    return m.constants.pulse_distortion * _ratio(m.pulse_width_sigma_omega, bandwidth)


def bsa_error_prob(m: BsaModel) -> float:
    k = m.constants
    if m.kind is BsaKind.LINEAR_OPTICS:
        return 0.0
    if m.kind is BsaKind.CAVITY_CZ:
        c = interface.effective_cooperativity(m.emitter)
        asym = k.asymmetric_loss * _ratio(1.0, c) ** 2
        return _clip(_pulse_distortion_error(m) + asym)
    if m.kind is BsaKind.ACTIVE_TWO_SPIN:
        return _clip(k.active_spectral * _ratio(m.pulse_width_sigma_omega, emission_bandwidth(m.emitter)) ** 4)
    if m.kind in (BsaKind.PASSIVE_SORTER, BsaKind.ACTIVE_SFG):
        return _clip(k.inhomogeneous_coupling * _ratio(m.delta_gamma_1d, m.pulse_width_sigma_omega) ** 2)
    if m.kind is BsaKind.PASSIVE_CZ_CHAIN:
        return _clip(PASSIVE_CZ_ERROR_PREFACTOR * m.n_emitters ** PASSIVE_CZ_ERROR_EXPONENT)
    raise ValueError(f"unknown analyzer kind {m.kind!r}")


def optimal_pulse_width(n_emitters: int, gamma_total: float) -> float:
    if n_emitters < 1 or gamma_total <= 0:
        raise ValueError("need n_emitters >= 1 and gamma_total > 0")
    return OPTIMAL_WIDTH_PREFACTOR * n_emitters ** OPTIMAL_WIDTH_EXPONENT * gamma_total


# -- simulation ---------------------------------------------------------------

def _check_photons(state: MixedState, photons: Sequence[QubitLabel]) -> tuple[QubitLabel, QubitLabel]:
    photons = tuple(photons)
    if len(photons) != 2:
        raise ValueError("a Bell analyzer needs exactly two photons")
    for q in photons:
        if q not in state.register:
            raise ValueError(f"{q!r} not in register")
        if q.kind is not QubitKind.PHOTON_POLARIZATION:
            raise ValueError(f"{q!r} is not a photon polarization qubit")
    return photons


def _discard(state: MixedState, labels: Sequence[QubitLabel]) -> MixedState | None:
    if len(labels) == state.n_qubits:
        return None
    return partial_trace(state, labels)


def misidentify(outcome: BellOutcome, error_prob: float, rng: np.random.Generator) -> BellOutcome:
    """With probability ``error_prob`` swap the outcome for one of the other three."""
    if error_prob > 0 and rng.random() < error_prob:
        others = [b for b in BELL_OUTCOMES if b is not outcome]
        return others[int(rng.integers(3))]
    return outcome


def project_bell(
    state: MixedState,
    photons: Sequence[QubitLabel],
    error_prob: float,
    rng: np.random.Generator,
) -> tuple[BellOutcome, MixedState | None]:
    """Success-conditioned Bell projection of ``photons`` with misidentification."""
    if len(photons) == state.n_qubits:
        idx = sample_index(outcome_probabilities(state, BELL_BASIS, photons), rng)
        return misidentify(BELL_OUTCOMES[idx], error_prob, rng), None
    idx, post, _ = measure_projective(state, BELL_BASIS, rng, on=photons)
    return misidentify(BELL_OUTCOMES[idx], error_prob, rng), _discard(post, photons)


def _simulate_cavity_cz(state, photons, m, rng):
    p1, p2 = photons
    anc = fresh_label(state.register, QubitKind.SPIN)
    pres1 = QubitLabel(anc.id + 1, QubitKind.PHOTON_PRESENCE)
    pres2 = QubitLabel(anc.id + 2, QubitKind.PHOTON_PRESENCE)
    amps = np.zeros(8, dtype=complex)
    amps[[0b011, 0b111]] = 1 / np.sqrt(2)  # ancilla |+>, both presence qubits |1>
    st = tensor(state, PureState((anc, pres1, pres2), amps))
    st = apply_channel(st, interface.spin_photon_cz_channel(m.emitter, p1, anc, pres1))
    st = apply_channel(st, interface.spin_photon_cz_channel(m.emitter, p2, anc, pres2))

    internal = [p1, p2, anc, pres1, pres2]
    both = np.zeros((4, 4), dtype=complex)
    both[3, 3] = 1
    lost, st, _ = measure_projective(st, (both, np.eye(4) - both), rng, on=(pres1, pres2))
    if lost:
        return BellOutcome.FAILURE, _discard(st, internal)

    odd, st, _ = measure_projective(st, X_BASIS, rng, on=(anc,))
    st = apply_unitary(st, np.kron(HADAMARD, HADAMARD), (p1, p2))
    x1, st, _ = measure_projective(st, Z_BASIS, rng, on=(p1,))
    x2, st, _ = measure_projective(st, Z_BASIS, rng, on=(p2,))
    minus = (x1 ^ x2) == 1
    outcome = BELL_OUTCOMES[2 * odd + int(minus)]
    # the reflection, loss and dephasing errors are in the circuit; pulse distortion is not
    outcome = misidentify(outcome, _clip(_pulse_distortion_error(m)), rng)
    return outcome, _discard(st, internal)


def simulate_bsa(
    state: MixedState,
    photons: Sequence[QubitLabel],
    m: BsaModel,
    rng: np.random.Generator,
) -> tuple[BellOutcome, MixedState | None]:
    """Bell measurement of two photons; returns the outcome and the state of the rest.

    The post-state is ``None`` when nothing but the two photons was in the register.
    Failures are heralded and return the unconditioned reduced state of the rest.
    """
    photons = _check_photons(state, photons)
    if m.kind is BsaKind.CAVITY_CZ:
        return _simulate_cavity_cz(state, photons, m, rng)
    if rng.random() >= bsa_success_prob(m):
        return BellOutcome.FAILURE, _discard(state, photons)
    return project_bell(state, photons, bsa_error_prob(m), rng)


# -- QND detection ------------------------------------------------------------

def qnd_error_probability(p: EmitterParams) -> float:
    """Wrong-answer probability: 1/beta_coh - 1 (waveguide) or 1/C_coh (cavity), at most 1/2."""
    if p.geometry is Geometry.WAVEGUIDE:
        b = interface.beta_coh(p)
        err = math.inf if b == 0 else 1 / b - 1
    else:
        c = interface.cooperativity(p, coherent=True)
        err = math.inf if c == 0 else 1 / c
    return _clip(err, 0.0, 0.5)


def qnd_branches(
    state: MixedState, presence_qubit: QubitLabel, p: EmitterParams
) -> list[tuple[bool, float, MixedState]]:
    """Both readout branches ``(present, probability, post-state)`` of a QND detection."""
    if presence_qubit not in state.register:
        raise ValueError(f"{presence_qubit!r} not in register")
    if presence_qubit.kind is not QubitKind.PHOTON_PRESENCE:
        raise ValueError(f"{presence_qubit!r} is not a presence qubit")
    err = qnd_error_probability(p)
    anc = fresh_label(state.register, QubitKind.SPIN)
    st = tensor(state, PureState((anc,), np.array([1, 1]) / np.sqrt(2)))
    # scattering flips the ancilla phase iff a photon is there
    st = apply_unitary(st, np.diag([1, 1, 1, -1]), (presence_qubit, anc))
    flipped = apply_unitary(st, PAULI["Z"], (anc,))
    st = MixedState(st.register, (1 - err) * st.matrix + err * flipped.matrix)
    out = []
    for idx in (0, 1):
        try:
            _, post, prob = measure_projective(st, X_BASIS, on=(anc,), outcome=idx)
        except DegenerateOutcomeError:
            continue
        out.append((idx == 1, prob, partial_trace(post, [anc])))
    return out


def qnd_detect(
    state: MixedState, presence_qubit: QubitLabel, p: EmitterParams, rng: np.random.Generator
) -> tuple[bool, MixedState]:
    branches = qnd_branches(state, presence_qubit, p)
    probs = np.array([b[1] for b in branches])
    pick = int(rng.choice(len(branches), p=probs / probs.sum()))
    present, _, post = branches[pick]
    return present, post


@dataclass(frozen=True)
class BenchResult:
    trials: int
    successes: int
    misidentified: int

    @property
    def success_frequency(self) -> float:
        return self.successes / self.trials

    @property
    def error_frequency(self) -> float:
        return self.misidentified / self.successes if self.successes else 0.0


def bench_bsa(m: BsaModel, trials: int, rng: np.random.Generator, which: str = "phi+") -> BenchResult:
    """Feed ``trials`` copies of a photonic Bell state to the analyzer and tally the answers."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p1 = QubitLabel(1, QubitKind.PHOTON_POLARIZATION)
    p2 = QubitLabel(2, QubitKind.PHOTON_POLARIZATION)
    state = bell_state(p1, p2, which).density()
    truth = BellOutcome(which)
    ok = wrong = 0
    for _ in range(trials):
        outcome, _ = simulate_bsa(state, (p1, p2), m, rng)
        if outcome.succeeded:
            ok += 1
            wrong += outcome is not truth
    return BenchResult(trials, ok, wrong)
