"""GHZ and linear-cluster emission from one spin, fusion of emitted strings.

The emitter starts in ``(|g> + |s>)/sqrt(2)``.  Each cycle excites it and lets it decay,
which copies the spin into a new polarization qubit (``g -> H``, ``s -> V``).  Without
rotations the spin and photons form a GHZ state; with an emitter Hadamard after every
emission they form the linear cluster on the chain ``p1 - p2 - ... - pn - spin``.

Photon loss is heralded: states are post-selected on collecting every photon and the
collection probability is carried alongside in :class:`HeraldedState`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config, interface
from .analyzers import BELL_CORRECTION, BellOutcome, BsaModel, bsa_success_prob, simulate_bsa
from .interface import EmitterParams, Geometry
from .qsim import (
    CNOT,
    HADAMARD,
    PAULI,
    CapacityError,
    MixedState,
    PauliString,
    PureState,
    QubitLabel,
    apply_channel,
    apply_unitary,
    photon,
    relabel,
    spin,
    stabilizer_expectation,
    tensor,
)


@dataclass(frozen=True)
class EmissionConfig:
    n_photons: int
    emitter: EmitterParams
    cycle_time: float = 1e-9
    intermediate_rotation: bool = False

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("n_photons must be >= 1")
        if not self.cycle_time > 0:
            raise ValueError("cycle_time must be > 0")


@dataclass(frozen=True)
class HeraldedState:
    """Post-selected state, its herald probability and the ideal stabilizer generators.

    ``ends`` lists photons that may be consumed by a fusion.
    """

    state: MixedState
    herald_probability: float
    stabilizers: tuple[PauliString, ...] = ()
    ends: tuple[QubitLabel, ...] = ()

    def __post_init__(self):
        if not 0 <= self.herald_probability <= 1:
            raise ValueError("herald_probability must lie in [0, 1]")
        for g in self.stabilizers:
            if len(g) != self.state.n_qubits:
                raise ValueError("stabilizer length does not match the register")


def ghz_generators(n_qubits: int) -> tuple[PauliString, ...]:
    """``X...X`` and ``Z_0 Z_k`` for the GHZ state with qubit 0 as the hub."""
    gens = [PauliString("X" * n_qubits)]
    for k in range(1, n_qubits):
        gens.append(PauliString("Z" + "I" * (k - 1) + "Z" + "I" * (n_qubits - k - 1)))
    return tuple(gens)


def cluster_generators(chain: Sequence[int], n_qubits: int) -> tuple[PauliString, ...]:
    """``X_i Z_{i-1} Z_{i+1}`` along ``chain`` (register positions), open boundary."""
    gens = []
    for pos, q in enumerate(chain):
        letters = ["I"] * n_qubits
        letters[q] = "X"
        for nb in (pos - 1, pos + 1):
            if 0 <= nb < len(chain):
                letters[chain[nb]] = "Z"
        gens.append(PauliString("".join(letters)))
    return tuple(gens)


def _per_photon_coherence(p: EmitterParams) -> float:
    """Share of emission that is coherent, relative to all guided emission."""
    if p.geometry is Geometry.WAVEGUIDE:
        b = interface.beta(p)
        return 1.0 if b == 0 else interface.beta_coh(p) / b
    c = interface.cooperativity(p)
    return 1.0 if c == 0 else interface.cavity_decay_fraction(interface.cooperativity(p, True)) / interface.cavity_decay_fraction(c)


def herald_probability(cfg: EmissionConfig) -> float:
    return (interface.efficiency(cfg.emitter) * cfg.emitter.eta_out) ** cfg.n_photons


def _emit(cfg: EmissionConfig) -> HeraldedState:
    n = cfg.n_photons
    if n + 1 > config.TOLERANCES.max_qubits:
        raise CapacityError(f"{n + 1} qubits exceeds the dense cap of {config.TOLERANCES.max_qubits}")
    s = spin(0)
    photons = [photon(k) for k in range(1, n + 1)]
    state = PureState((s,), np.array([1, 1]) / np.sqrt(2)).density()
    memory = interface.memory_dephasing_channel(cfg.cycle_time, cfg.emitter, s)
    leak = interface.phase_damping_channel(_per_photon_coherence(cfg.emitter), s)
    for ph in photons:
        state = apply_channel(state, memory)
        state = tensor(state, PureState((ph,), np.array([1, 0])))
        state = apply_unitary(state, CNOT, (s, ph))
        state = apply_channel(state, leak)
        if cfg.intermediate_rotation:
            state = apply_unitary(state, HADAMARD, (s,))

    if cfg.intermediate_rotation:
        chain = list(range(1, n + 1)) + [0]
        gens = cluster_generators(chain, n + 1)
    else:
        gens = ghz_generators(n + 1)
    ends = tuple(photons) if not cfg.intermediate_rotation else (photons[0],)
    return HeraldedState(state, herald_probability(cfg), gens, ends)


def emit_ghz(cfg: EmissionConfig) -> HeraldedState:
    if cfg.intermediate_rotation:
        raise ValueError("emit_ghz needs intermediate_rotation=False")
    return _emit(cfg)


def emit_1d_cluster(cfg: EmissionConfig) -> HeraldedState:
    if not cfg.intermediate_rotation:
        raise ValueError("emit_1d_cluster needs intermediate_rotation=True")
    return _emit(cfg)


def stabilizer_report(hs: HeraldedState) -> list[tuple[str, float, float]]:
    """Rows of (generator, expected value, measured value)."""
    return [(str(g), 1.0, stabilizer_expectation(hs.state, g)) for g in hs.stabilizers]


# -- fusion -------------------------------------------------------------------

def _xz(letter: str) -> tuple[int, int]:
    return {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}[letter]


def _solve_restriction(gens: Sequence[PauliString], pos: int, target: tuple[int, int]) -> PauliString | None:
    """Product of generators whose letter at ``pos`` has symplectic bits ``target``."""
    # Gaussian elimination on the 2-bit restriction vectors
    reduced: list[tuple[tuple[int, int], PauliString]] = []
    for g in gens:
        v = _xz(g.letters[pos])
        for rv, rg in reduced:
            lead = 0 if rv[0] else 1
            if v[lead] and rv[lead]:
                v = (v[0] ^ rv[0], v[1] ^ rv[1])
                g = g * rg
        if v != (0, 0):
            reduced.append((v, g))
    # combine reduced rows to hit the target
    for mask in range(1, 2 ** len(reduced)):
        v, acc = (0, 0), None
        for i, (rv, rg) in enumerate(reduced):
            if mask >> i & 1:
                v = (v[0] ^ rv[0], v[1] ^ rv[1])
                acc = rg if acc is None else acc * rg
        if v == target:
            return acc
    return None


def _fused_generators(gens: Sequence[PauliString], ia: int, ib: int) -> list[PauliString]:
    """Generators of the state left after projecting positions ``ia``, ``ib`` onto phi+."""
    pivots: list[tuple[tuple[int, int], PauliString]] = []
    kernel: list[PauliString] = []
    for g in gens:
        xa, za = _xz(g.letters[ia])
        xb, zb = _xz(g.letters[ib])
        v = (xa ^ xb, za ^ zb)
        for pv, pg in pivots:
            lead = 0 if pv[0] else 1
            if v[lead] and pv[lead]:
                v = (v[0] ^ pv[0], v[1] ^ pv[1])
                g = g * pg
        if v == (0, 0):
            kernel.append(g)
        else:
            pivots.append((v, g))
    out = []
    for k in kernel:
        pair = k.letters[ia] + k.letters[ib]
        value = -1 if pair == "YY" else 1  # <phi+|P P|phi+>
        letters = "".join(c for i, c in enumerate(k.letters) if i not in (ia, ib))
        if set(letters) <= {"I"}:
            continue
        out.append(PauliString(letters, k.sign * value))
    return out


def fuse_strings(
    a: HeraldedState | None,
    b: HeraldedState | None,
    m: BsaModel,
    rng: np.random.Generator,
) -> HeraldedState | None:
    """Join two strings by a Bell measurement of one end photon from each.

    On success the outcome-dependent Pauli correction is applied to ``b``'s remaining
    qubits so the result is the canonical fused state.  Returns ``None`` on failure.
    """
    if a is None or b is None:
        return None
    if not a.ends or not b.ends:
        raise ValueError("both strings need a designated end photon")
    offset = max(q.id for q in a.state.register) + 1 - min(q.id for q in b.state.register)
    mapping = {q: QubitLabel(q.id + offset, q.kind) for q in b.state.register}
    b_state = relabel(b.state, mapping)
    ea, eb = a.ends[0], mapping[b.ends[0]]

    joint = tensor(a.state, b_state)
    na, nb = a.state.n_qubits, b.state.n_qubits
    gens = [PauliString(g.letters + "I" * nb, g.sign) for g in a.stabilizers]
    gens += [PauliString("I" * na + g.letters, g.sign) for g in b.stabilizers]

    outcome, post = simulate_bsa(joint, (ea, eb), m, rng)
    if outcome is BellOutcome.FAILURE or post is None:
        return None

    ia, ib = joint.register.index(ea), joint.register.index(eb)
    correction = BELL_CORRECTION[outcome]
    needs_x = bool(abs(correction[1, 0]) > 0.5 or abs(correction[0, 1]) > 0.5)
    needs_z = outcome in (BellOutcome.PHI_MINUS, BellOutcome.PSI_MINUS)
    b_gens = [PauliString(g.letters, g.sign) for g in gens[len(a.stabilizers):]]
    for needed, target in ((needs_x, (1, 0)), (needs_z, (0, 1))):
        if not needed:
            continue
        s = _solve_restriction(b_gens, ib, target)
        if s is None:
            raise ValueError("end photon stabilizers cannot absorb the Pauli correction")
        for pos, letter in enumerate(s.letters):
            if pos != ib and letter != "I":
                post = apply_unitary(post, PAULI[letter], (joint.register[pos],))

    fused = _fused_generators(gens, ia, ib)
    ends = tuple(q for q in a.ends[1:] + tuple(mapping[e] for e in b.ends[1:]))
    herald = a.herald_probability * b.herald_probability * bsa_success_prob(m)
    return HeraldedState(post, herald, tuple(fused), ends)

