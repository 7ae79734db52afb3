import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinnet import config
from spinnet.qsim import (
    BELL_BASIS,
    CNOT,
    HADAMARD,
    PAULI,
    X_BASIS,
    Z_BASIS,
    CapacityError,
    DegenerateOutcomeError,
    DimensionError,
    MixedState,
    PauliString,
    PureState,
    QuantumChannel,
    QubitKind,
    RegisterError,
    apply_channel,
    apply_unitary,
    basis_state,
    bell_state,
    embed,
    fidelity,
    fresh_label,
    maximally_mixed,
    measure_projective,
    outcome_probabilities,
    partial_trace,
    photon,
    presence,
    relabel,
    reorder,
    spin,
    stabilizer_expectation,
    tensor,
    werner_from_fidelity,
    werner_state,
)

from conftest import kron_all

I2 = np.eye(2)


def random_density(n, seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(2**n, 2**n)) + 1j * r.normal(size=(2**n, 2**n))
    m = a @ a.conj().T
    return m / np.trace(m)


def random_unitary(d, seed):
    r = np.random.default_rng(seed)
    q, rr = np.linalg.qr(r.normal(size=(d, d)) + 1j * r.normal(size=(d, d)))
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


class TestStates:
    def test_pure_state_requires_normalization(self):
        with pytest.raises(ValueError):
            PureState((spin(0),), np.array([1.0, 1.0]))
        s = PureState.normalized((spin(0),), [1, 1])
        np.testing.assert_allclose(s.amplitudes, np.array([1, 1]) / np.sqrt(2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            PureState((spin(0), spin(1)), np.array([1, 0]))
        with pytest.raises(DimensionError):
            MixedState((spin(0),), np.eye(4) / 4)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(RegisterError):
            basis_state((spin(0), spin(0)), (0, 0))

    def test_debug_checks_reject_non_psd(self):
        with pytest.raises(ValueError):
            MixedState((spin(0),), np.diag([1.5, -0.5]))

    def test_fresh_label_is_unused(self):
        reg = (spin(0), photon(3))
        q = fresh_label(reg, QubitKind.SPIN)
        assert q.id == 4 and q.kind is QubitKind.SPIN

    def test_maximally_mixed(self):
        s = maximally_mixed((spin(0), spin(1)))
        np.testing.assert_allclose(s.matrix, np.eye(4) / 4)


class TestUnitariesAndChannels:
    def test_first_label_is_most_significant(self):
        s = basis_state((spin(0), spin(1)), (1, 0)).density()
        assert s.matrix[2, 2] == 1

    def test_apply_unitary_matches_kron_oracle(self):
        rho = random_density(3, 1)
        u = random_unitary(4, 2)
        reg = (spin(0), photon(1), spin(2))
        s = apply_unitary(MixedState(reg, rho), u, (spin(2), spin(0)))
        # oracle: full[o, i] = u[(o2 o0), (i2 i0)] when the untouched middle bit agrees
        full = np.zeros((8, 8), dtype=complex)
        for o in range(8):
            for i in range(8):
                ob, ib = [(o >> 2) & 1, (o >> 1) & 1, o & 1], [(i >> 2) & 1, (i >> 1) & 1, i & 1]
                if ob[1] == ib[1]:
                    full[o, i] = u[2 * ob[2] + ob[0], 2 * ib[2] + ib[0]]
        np.testing.assert_allclose(s.matrix, full @ rho @ full.conj().T, atol=1e-12)
        np.testing.assert_allclose(embed(u, reg, (spin(2), spin(0))), full, atol=1e-12)

    def test_cnot_target_order(self):
        s = basis_state((spin(0), photon(1)), (1, 0)).density()
        out = apply_unitary(s, CNOT, (spin(0), photon(1)))
        assert out.matrix[3, 3] == pytest.approx(1)
        out = apply_unitary(s, CNOT, (photon(1), spin(0)))
        assert out.matrix[2, 2] == pytest.approx(1)

    def test_channel_must_be_trace_preserving(self):
        with pytest.raises(ValueError):
            QuantumChannel((0.5 * I2,), (spin(0),))

    def test_channel_composition_matches_kraus_oracle(self):
        p = 0.3
        dep = QuantumChannel((np.sqrt(1 - p) * PAULI["I"], np.sqrt(p) * PAULI["Z"]), (spin(0),))
        flip = QuantumChannel((np.sqrt(0.8) * PAULI["I"], np.sqrt(0.2) * PAULI["X"]), (spin(0),))
        rho = random_density(1, 5)
        s = MixedState((spin(0),), rho)
        seq = apply_channel(apply_channel(s, dep), flip)
        comp = apply_channel(s, dep.then(flip))
        oracle = sum(
            (a @ b) @ rho @ (a @ b).conj().T
            for a in flip.operators
            for b in dep.operators
        )
        np.testing.assert_allclose(seq.matrix, oracle, atol=1e-12)
        np.testing.assert_allclose(comp.matrix, oracle, atol=1e-12)

    def test_partial_trace_of_product(self):
        a = random_density(1, 7)
        b = random_density(2, 8)
        s = MixedState((spin(0), spin(1), spin(2)), np.kron(a, b))
        np.testing.assert_allclose(partial_trace(s, (spin(1), spin(2))).matrix, a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(s, (spin(0),)).matrix, b, atol=1e-12)
        with pytest.raises(RegisterError):
            partial_trace(s, s.register)

    def test_reorder_and_relabel(self):
        a, b = random_density(1, 9), random_density(1, 10)
        s = MixedState((spin(0), spin(1)), np.kron(a, b))
        r = reorder(s, (spin(1), spin(0)))
        np.testing.assert_allclose(r.matrix, np.kron(b, a), atol=1e-12)
        t = relabel(s, {spin(0): spin(5)})
        assert t.register == (spin(5), spin(1))

    def test_tensor_rejects_overlap(self):
        with pytest.raises(RegisterError):
            tensor(maximally_mixed((spin(0),)), maximally_mixed((spin(0),)))


class TestMeasurement:
    def test_born_probabilities(self, rng):
        s = PureState((spin(0),), np.array([np.sqrt(0.3), np.sqrt(0.7)])).density()
        np.testing.assert_allclose(outcome_probabilities(s, Z_BASIS, (spin(0),)), [0.3, 0.7])
        counts = np.zeros(2)
        for _ in range(4000):
            idx, post, _ = measure_projective(s, Z_BASIS, rng)
            counts[idx] += 1
            assert post.matrix[idx, idx] == pytest.approx(1)
        assert abs(counts[0] / 4000 - 0.3) < 4 * np.sqrt(0.21 / 4000)

    def test_forced_zero_probability_outcome(self):
        s = basis_state((spin(0),), (0,)).density()
        with pytest.raises(DegenerateOutcomeError):
            measure_projective(s, Z_BASIS, outcome=1)

    def test_bell_measurement_on_bell_state(self, rng):
        for k, name in enumerate(("phi+", "phi-", "psi+", "psi-")):
            s = bell_state(photon(0), photon(1), name).density()
            idx, _, p = measure_projective(s, BELL_BASIS, rng)
            assert idx == k and p == pytest.approx(1)

    def test_incomplete_basis_rejected(self):
        s = maximally_mixed((spin(0),))
        with pytest.raises(ValueError):
            measure_projective(s, (Z_BASIS[0],), outcome=0)

    def test_measurement_on_subset(self):
        s = bell_state(spin(0), spin(1)).density()
        _, post, p = measure_projective(s, X_BASIS, on=(spin(0),), outcome=1)
        assert p == pytest.approx(0.5)
        red = partial_trace(post, (spin(0),))
        minus = np.array([1, -1]) / np.sqrt(2)
        np.testing.assert_allclose(red.matrix, np.outer(minus, minus), atol=1e-12)


class TestPauli:
    def test_product_and_sign(self):
        assert PauliString("XZ") * PauliString("ZX") == PauliString("YY", 1)
        with pytest.raises(ValueError):
            PauliString("X") * PauliString("Z")

    def test_matrix_matches_kron(self):
        g = PauliString("XIZ", -1)
        np.testing.assert_allclose(g.matrix(), -kron_all(PAULI["X"], I2, PAULI["Z"]))

    def test_bell_stabilizers(self):
        s = bell_state(spin(0), spin(1)).density()
        assert stabilizer_expectation(s, PauliString("XX")) == pytest.approx(1)
        assert stabilizer_expectation(s, PauliString("ZZ")) == pytest.approx(1)
        assert stabilizer_expectation(s, PauliString("YY")) == pytest.approx(-1)

    @given(st.text(alphabet="IXYZ", min_size=1, max_size=4), st.text(alphabet="IXYZ", min_size=1, max_size=4))
    def test_commutation_matches_matrices(self, a, b):
        n = min(len(a), len(b))
        pa, pb = PauliString(a[:n]), PauliString(b[:n])
        ma, mb = pa.matrix(), pb.matrix()
        assert pa.commutes_with(pb) == np.allclose(ma @ mb, mb @ ma)


class TestFidelityAndWerner:
    def test_fidelity_reorders_by_label(self):
        s = basis_state((spin(0), spin(1)), (0, 1)).density()
        target = basis_state((spin(1), spin(0)), (1, 0))
        assert fidelity(s, target) == pytest.approx(1)

    @given(st.floats(0.25, 1.0))
    def test_werner_fidelity_round_trip(self, f):
        s = werner_from_fidelity(spin(0), spin(1), f)
        assert fidelity(s, bell_state(spin(0), spin(1))) == pytest.approx(f, abs=1e-12)

    def test_werner_p_zero_is_maximally_mixed(self):
        np.testing.assert_allclose(werner_state(spin(0), spin(1), 0).matrix, np.eye(4) / 4)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 10_000))
    def test_unitary_preserves_trace_and_psd(self, n, seed):
        reg = tuple(spin(i) for i in range(n))
        s = MixedState(reg, random_density(n, seed))
        k = min(n, 2)
        u = random_unitary(2**k, seed + 1)
        out = apply_unitary(s, u, reg[:k])
        assert out.trace() == pytest.approx(1, abs=1e-12)
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0, 1))
    def test_dephasing_channel_is_cptp(self, seed, p):
        ch = QuantumChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * PAULI["Z"]), (spin(1),))
        s = MixedState((spin(0), spin(1)), random_density(2, seed))
        out = apply_channel(s, ch)
        assert out.trace() == pytest.approx(1, abs=1e-12)
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_measurement_branches_sum_to_one(self, seed):
        s = MixedState((spin(0), spin(1)), random_density(2, seed))
        probs = outcome_probabilities(s, BELL_BASIS, s.register)
        assert probs.sum() == pytest.approx(1, abs=1e-12)
        assert (probs >= 0).all()


def test_tolerances_are_configurable():
    previous = config.set_tolerances(normalization=0.5)
    try:
        PureState((spin(0),), np.array([1.0, 0.5]))
    finally:
        config.set_tolerances(**previous.__dict__)
    with pytest.raises(ValueError):
        PureState((spin(0),), np.array([1.0, 0.5]))


def test_hadamard_maps_z_to_x_basis():
    s = basis_state((presence(0),), (0,)).density()
    out = apply_unitary(s, HADAMARD, (presence(0),))
    np.testing.assert_allclose(out.matrix, X_BASIS[0], atol=1e-12)


def test_capacity_error_is_a_value_error():
    assert issubclass(CapacityError, ValueError)
