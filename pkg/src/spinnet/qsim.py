"""Dense state-vector / density-matrix engine over labeled qubit registers.

Qubits are addressed by :class:`QubitLabel` rather than position, so states
built in different places can be combined with :func:`tensor` and pieces
discarded with :func:`partial_trace` without index bookkeeping by the caller.
The first label in a register is the most significant bit of the basis index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config


class RegisterError(ValueError):
    """Overlapping, missing or otherwise inconsistent qubit labels."""


class DimensionError(ValueError):
    pass


class DegenerateOutcomeError(ValueError):
    """A forced measurement outcome has zero probability."""


class CapacityError(ValueError):
    """Register would exceed the dense-engine qubit cap."""


class QubitKind(enum.Enum):
    SPIN = "spin"
    PHOTON_POLARIZATION = "photon-polarization"
    PHOTON_PRESENCE = "photon-presence"


@dataclass(frozen=True)
class QubitLabel:
    id: int
    kind: QubitKind = QubitKind.SPIN

    def __repr__(self) -> str:
        return f"{self.kind.value}:{self.id}"


def spin(id: int) -> QubitLabel:
    return QubitLabel(id, QubitKind.SPIN)


def photon(id: int) -> QubitLabel:
    return QubitLabel(id, QubitKind.PHOTON_POLARIZATION)


def presence(id: int) -> QubitLabel:
    return QubitLabel(id, QubitKind.PHOTON_PRESENCE)


def fresh_label(register: Sequence[QubitLabel], kind: QubitKind) -> QubitLabel:
    """A label whose id is not used in ``register``."""
    next_id = max((q.id for q in register), default=-1) + 1
    return QubitLabel(next_id, kind)


def _check_register(register: Sequence[QubitLabel]) -> tuple[QubitLabel, ...]:
    register = tuple(register)
    ids = [q.id for q in register]
    if len(set(ids)) != len(ids):
        raise RegisterError(f"duplicate qubit ids in register {register}")
    if len(register) > config.TOLERANCES.max_qubits:
        raise CapacityError(
            f"{len(register)} qubits exceeds the dense cap of {config.TOLERANCES.max_qubits}"
        )
    return register


def _positions(register: Sequence[QubitLabel], labels: Sequence[QubitLabel]) -> list[int]:
    ids = [q.id for q in register]
    out = []
    for lab in labels:
        try:
            pos = ids.index(lab.id)
        except ValueError:
            raise RegisterError(f"{lab!r} is not in register {tuple(register)}") from None
        if register[pos] != lab:
            raise RegisterError(f"{lab!r} matches id of {register[pos]!r} but not its kind")
        out.append(pos)
    if len(set(out)) != len(out):
        raise RegisterError(f"repeated labels in {tuple(labels)}")
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    register: tuple[QubitLabel, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        reg = _check_register(self.register)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(reg):
            raise DimensionError(f"{amps.size} amplitudes for {len(reg)} qubits")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > config.TOLERANCES.normalization:
            raise ValueError(f"amplitudes not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, register, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(tuple(register), amps / np.linalg.norm(amps))

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    def density(self) -> "MixedState":
        return MixedState(self.register, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class MixedState:
    register: tuple[QubitLabel, ...]
    matrix: np.ndarray

    def __post_init__(self):
        reg = _check_register(self.register)
        mat = np.asarray(self.matrix, dtype=complex)
        d = 2 ** len(reg)
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} does not match {len(reg)} qubits")
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "matrix", mat)
        if config.TOLERANCES.debug_checks:
            check_state(self)

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    @property
    def dim(self) -> int:
        return 2 ** len(self.register)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def check_state(s: MixedState) -> None:
    """Raise ``ValueError`` unless ``s`` is Hermitian, unit-trace and PSD."""
    tol = config.TOLERANCES
    m = s.matrix
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol.hermiticity:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(m) - 1) > tol.trace:
        raise ValueError(f"density matrix trace {np.trace(m)!r} != 1")
    if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < tol.eigenvalue_floor:
        raise ValueError("density matrix has negative eigenvalues")


def basis_state(register: Sequence[QubitLabel], bits: Sequence[int]) -> PureState:
    register = tuple(register)
    if len(bits) != len(register):
        raise DimensionError("one bit per qubit required")
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[int("".join(str(int(b)) for b in bits) or "0", 2)] = 1
    return PureState(register, amps)


def maximally_mixed(register: Sequence[QubitLabel]) -> MixedState:
    d = 2 ** len(register)
    return MixedState(tuple(register), np.eye(d, dtype=complex) / d)


def as_mixed(s: MixedState | PureState) -> MixedState:
    return s.density() if isinstance(s, PureState) else s


# -- operator embedding -------------------------------------------------------

def _apply_left(mat: np.ndarray, n: int, op: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """``op`` (on ``targets``) times ``mat``, acting on the row index only."""
    k = len(targets)
    t = mat.reshape((2,) * n + (-1,))
    t = np.tensordot(op.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), list(targets)))
    t = np.moveaxis(t, list(range(k)), list(targets))
    return t.reshape(mat.shape)


def _conjugate(mat: np.ndarray, n: int, op: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """``op @ mat @ op^dagger`` with ``op`` embedded on ``targets``."""
    k = len(targets)
    opt = op.reshape((2,) * (2 * k))
    t = mat.reshape((2,) * (2 * n))
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), list(targets)))
    t = np.moveaxis(t, list(range(k)), list(targets))
    cols = [n + q for q in targets]
    t = np.tensordot(t, opt.conj(), axes=(cols, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
    return t.reshape(mat.shape)


def embed(op: np.ndarray, register: Sequence[QubitLabel], targets: Sequence[QubitLabel]) -> np.ndarray:
    """Full-register matrix of ``op`` acting on ``targets`` (mostly for oracles/tests)."""
    n = len(register)
    eye = np.eye(2 ** n, dtype=complex)
    return _apply_left(eye, n, np.asarray(op, dtype=complex), _positions(register, targets))


# -- channels -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by Kraus operators acting on ``acts_on`` (in that order)."""

    operators: tuple[np.ndarray, ...]
    acts_on: tuple[QubitLabel, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        acts_on = tuple(self.acts_on)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = 2 ** len(acts_on)
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError(f"Kraus operator of shape {k.shape} on {len(acts_on)} qubits")
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(d))) > config.TOLERANCES.trace_preserving:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "acts_on", acts_on)

    @classmethod
    def unitary(cls, u: np.ndarray, acts_on: Sequence[QubitLabel]) -> "QuantumChannel":
        return cls((np.asarray(u, dtype=complex),), tuple(acts_on))

    def relabel(self, acts_on: Sequence[QubitLabel]) -> "QuantumChannel":
        return QuantumChannel(self.operators, tuple(acts_on))

    def then(self, other: "QuantumChannel") -> "QuantumChannel":
        """Sequential composition (``self`` first) on the same qubits."""
        if tuple(other.acts_on) != tuple(self.acts_on):
            raise RegisterError("composition requires identical acts_on")
        ops = tuple(b @ a for a in self.operators for b in other.operators)
        return QuantumChannel(ops, self.acts_on)


def apply_channel(s: MixedState, ch: QuantumChannel) -> MixedState:
    targets = _positions(s.register, ch.acts_on)
    n = s.n_qubits
    out = np.zeros_like(s.matrix)
    for k in ch.operators:
        out += _conjugate(s.matrix, n, k, targets)
    return MixedState(s.register, out)


def apply_unitary(s: MixedState, u: np.ndarray, targets: Sequence[QubitLabel]) -> MixedState:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2 ** len(targets),) * 2:
        raise DimensionError(f"operator of shape {u.shape} on {len(targets)} qubits")
    return MixedState(s.register, _conjugate(s.matrix, s.n_qubits, u, _positions(s.register, targets)))


def tensor(a: MixedState | PureState, b: MixedState | PureState) -> MixedState:
    a, b = as_mixed(a), as_mixed(b)
    if {q.id for q in a.register} & {q.id for q in b.register}:
        raise RegisterError(f"registers overlap: {a.register} and {b.register}")
    return MixedState(a.register + b.register, np.kron(a.matrix, b.matrix))


def tensor_pure(a: PureState, b: PureState) -> PureState:
    if {q.id for q in a.register} & {q.id for q in b.register}:
        raise RegisterError(f"registers overlap: {a.register} and {b.register}")
    return PureState(a.register + b.register, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(s: MixedState, discard: Sequence[QubitLabel]) -> MixedState:
    if not discard:
        return s
    pos = _positions(s.register, discard)
    n = s.n_qubits
    if len(pos) == n:
        raise RegisterError("cannot trace out the entire register")
    t = s.matrix.reshape((2,) * (2 * n))
    m = n
    for p in sorted(pos, reverse=True):
        t = np.trace(t, axis1=p, axis2=p + m)
        m -= 1
    keep = tuple(q for i, q in enumerate(s.register) if i not in pos)
    d = 2 ** len(keep)
    return MixedState(keep, t.reshape(d, d))


def reorder(s: MixedState, register: Sequence[QubitLabel]) -> MixedState:
    """Same state with the register permuted into ``register`` order."""
    perm = _positions(s.register, register)
    if len(perm) != s.n_qubits:
        raise RegisterError("reorder needs a permutation of the full register")
    n = s.n_qubits
    t = s.matrix.reshape((2,) * (2 * n)).transpose(perm + [n + p for p in perm])
    return MixedState(tuple(register), t.reshape(s.dim, s.dim))


def relabel(s: MixedState, mapping: dict[QubitLabel, QubitLabel]) -> MixedState:
    """Rename qubits; unmapped labels keep their name."""
    return MixedState(tuple(mapping.get(q, q) for q in s.register), s.matrix)


# -- measurement --------------------------------------------------------------

def measure_projective(
    s: MixedState,
    basis: Sequence[np.ndarray],
    rng: np.random.Generator | None = None,
    *,
    on: Sequence[QubitLabel] | None = None,
    outcome: int | None = None,
) -> tuple[int, MixedState, float]:
    """Projective measurement with orthogonal projectors ``basis`` on qubits ``on``.

    Either ``rng`` samples the outcome from the Born rule or ``outcome`` forces it.
    Returns ``(index, normalized post-state, probability)``; the measured qubits
    stay in the register.
    """
    on = tuple(s.register if on is None else on)
    targets = _positions(s.register, on)
    d = 2 ** len(on)
    projectors = [np.asarray(p, dtype=complex) for p in basis]
    if any(p.shape != (d, d) for p in projectors):
        raise DimensionError(f"projectors must be {d}x{d}")
    if np.max(np.abs(sum(projectors) - np.eye(d))) > config.TOLERANCES.completeness:
        raise ValueError("projectors do not sum to identity")

    probs = _probabilities(s.matrix, s.n_qubits, projectors, targets)
    if outcome is None:
        if rng is None:
            raise ValueError("need an rng or a forced outcome")
        outcome = sample_index(probs, rng)
    p = float(probs[outcome])
    if p <= 0:
        raise DegenerateOutcomeError(f"outcome {outcome} has zero probability")
    branch = _conjugate(s.matrix, s.n_qubits, projectors[outcome], targets)
    return outcome, MixedState(s.register, branch / np.trace(branch).real), p


def sample_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to ``weights``."""
    cdf = np.cumsum(weights)
    return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(weights) - 1)


def _reduced(mat: np.ndarray, n: int, targets: Sequence[int]) -> np.ndarray:
    """Reduced matrix on ``targets`` (in that order)."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    t = mat.reshape((2,) * (2 * n))
    t = t.transpose(list(targets) + rest + [n + q for q in targets] + [n + q for q in rest])
    t = t.reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    return np.einsum("iaja->ij", t)


def _probabilities(mat: np.ndarray, n: int, projectors: Sequence[np.ndarray], targets: Sequence[int]) -> np.ndarray:
    red = _reduced(mat, n, targets)
    return np.array([max(float(np.sum(p.T * red).real), 0.0) for p in projectors])


def outcome_probabilities(s: MixedState, basis: Sequence[np.ndarray], on: Sequence[QubitLabel]) -> np.ndarray:
    targets = _positions(s.register, on)
    return _probabilities(s.matrix, s.n_qubits, [np.asarray(p, dtype=complex) for p in basis], targets)


def fidelity(a: MixedState, target: PureState) -> float:
    """Overlap <psi|rho|psi>; registers are matched by label when they agree as sets."""
    if a.n_qubits != target.n_qubits:
        raise DimensionError("state and target have different sizes")
    if a.register != target.register and {q.id for q in a.register} == {q.id for q in target.register}:
        a = reorder(a, target.register)
    psi = target.amplitudes
    return float(np.clip(np.vdot(psi, a.matrix @ psi).real, 0.0, 1.0))


# -- Pauli strings ------------------------------------------------------------

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# single-qubit products: (a, b) -> (phase, c) with a*b = phase*c
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True)
class PauliString:
    letters: str
    sign: int = 1

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"bad Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        if len(self) != len(other):
            raise DimensionError("Pauli strings of different length")
        phase: complex = self.sign * other.sign
        out = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _PAULI_PRODUCT[(a, b)]
            phase *= ph
            out.append(c)
        if abs(phase.imag) > 0.5:
            raise ValueError("product of anticommuting Pauli strings is not Hermitian")
        return PauliString("".join(out), int(round(phase.real)))

    def commutes_with(self, other: "PauliString") -> bool:
        anti = sum(a != "I" and b != "I" and a != b for a, b in zip(self.letters, other.letters))
        return anti % 2 == 0

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for c in self.letters:
            out = np.kron(out, PAULI[c])
        return self.sign * out


def stabilizer_expectation(s: MixedState, g: PauliString) -> float:
    if len(g) != s.n_qubits:
        raise DimensionError(f"Pauli string of length {len(g)} on {s.n_qubits} qubits")
    m = s.matrix
    for pos, c in enumerate(g.letters):
        if c != "I":
            m = _apply_left(m, s.n_qubits, PAULI[c], [pos])
    return float(g.sign * np.trace(m).real)


# -- common projector sets ----------------------------------------------------

Z_BASIS = (np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex))
X_BASIS = tuple(np.outer(v, v.conj()) for v in (np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)))

_BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}
BELL_ORDER = ("phi+", "phi-", "psi+", "psi-")
BELL_BASIS = tuple(np.outer(_BELL_VECTORS[k], _BELL_VECTORS[k]).astype(complex) for k in BELL_ORDER)


def bell_state(a: QubitLabel, b: QubitLabel, which: str = "phi+") -> PureState:
    return PureState((a, b), _BELL_VECTORS[which].astype(complex))


def werner_state(a: QubitLabel, b: QubitLabel, p: float) -> MixedState:
    """``p |phi+><phi+| + (1-p) I/4``."""
    phi = _BELL_VECTORS["phi+"]
    return MixedState((a, b), p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4)


def werner_from_fidelity(a: QubitLabel, b: QubitLabel, f: float) -> MixedState:
    return werner_state(a, b, (4 * f - 1) / 3)
