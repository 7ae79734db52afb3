import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinnet import config
from spinnet.analyzers import BsaKind, BsaModel, deterministic_bsa, linear_optics
from spinnet.interface import EmitterParams, LinkParams
from spinnet.qsim import CapacityError, photon
from spinnet.repeater import (
    ParityCode,
    RepeaterConfig,
    RepeaterMode,
    correctable_counts,
    hop_loss,
    hop_success,
    is_correctable,
    parity_encode,
    parity_loss_closed_form,
    parity_loss_enumerated,
    parity_loss_success,
    simulate_one_way,
)

SMALL_CODES = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (1, 3), (3, 1), (2, 4), (4, 2)]


def brute_force_success(n, m, eps):
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=n * m):
        blocks = [pattern[b * m:(b + 1) * m] for b in range(n)]
        if any(sum(b) == 0 for b in blocks) and all(sum(b) < m for b in blocks):
            k = sum(pattern)
            total += eps**k * (1 - eps) ** (n * m - k)
    return total


def erasure_correctable(code, lost):
    """Knill-Laflamme for erasures: the lost photons carry no logical information."""
    nm = code.n_photons
    logical = [parity_encode([1, 0], code).amplitudes, parity_encode([0, 1], code).amplitudes]
    lost_idx = [i for i in range(nm) if lost[i]]
    kept_idx = [i for i in range(nm) if not lost[i]]
    mats = [v.reshape((2,) * nm).transpose(lost_idx + kept_idx).reshape(2 ** len(lost_idx), -1) for v in logical]
    r00 = mats[0] @ mats[0].conj().T
    r11 = mats[1] @ mats[1].conj().T
    r01 = mats[0] @ mats[1].conj().T
    return np.allclose(r00, r11, atol=1e-10) and np.allclose(r01, 0, atol=1e-10)


class TestEncoder:
    def test_two_blocks_of_one(self):
        code = ParityCode(2, 1)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(parity_encode([1, 0], code).amplitudes, [s, 0, 0, s], atol=1e-12)
        np.testing.assert_allclose(parity_encode([0, 1], code).amplitudes, [0, s, s, 0], atol=1e-12)

    @pytest.mark.parametrize("n, m", [(1, 3), (2, 2), (3, 2)])
    def test_plus_state_is_block_ghz_product(self, n, m):
        code = ParityCode(n, m)
        block = np.zeros(2**m)
        block[0] = block[-1] = 1 / np.sqrt(2)
        plus = np.ones(1)
        for _ in range(n):
            plus = np.kron(plus, block)
        encoded = parity_encode(np.array([1, 1]) / np.sqrt(2), code).amplitudes
        np.testing.assert_allclose(encoded, plus, atol=1e-12)

    def test_single_photon_code_is_identity(self):
        np.testing.assert_allclose(parity_encode([0.6, 0.8j], ParityCode(1, 1)).amplitudes, [0.6, 0.8j], atol=1e-12)

    @pytest.mark.parametrize("n, m", [(n, m) for n in range(1, 4) for m in range(1, 4)])
    def test_logical_states_orthonormal(self, n, m):
        code = ParityCode(n, m)
        zero = parity_encode([1, 0], code).amplitudes
        one = parity_encode([0, 1], code).amplitudes
        assert np.vdot(zero, zero).real == pytest.approx(1)
        assert np.vdot(one, one).real == pytest.approx(1)
        assert abs(np.vdot(zero, one)) < 1e-12

    def test_register(self):
        s = parity_encode([1, 0], ParityCode(2, 2))
        assert s.register == tuple(photon(k) for k in range(1, 5))

    def test_capacity_and_input_checks(self):
        cap = config.get_tolerances().max_qubits
        with pytest.raises(CapacityError):
            parity_encode([1, 0], ParityCode(cap + 1, 1))
        with pytest.raises(ValueError):
            parity_encode([1, 0, 0], ParityCode(1, 1))
        with pytest.raises(ValueError):
            ParityCode(0, 2)


class TestDecodability:
    @pytest.mark.parametrize("n, m", SMALL_CODES)
    def test_criterion_is_knill_laflamme(self, n, m):
        code = ParityCode(n, m)
        for lost in itertools.product((False, True), repeat=n * m):
            assert is_correctable(code, lost) == erasure_correctable(code, lost), lost

    def test_counts(self):
        # any two losses in (2, 2) either empty a block or leave no block intact
        assert correctable_counts(ParityCode(2, 2)) == (1, 4, 0, 0, 0)
        assert correctable_counts(ParityCode(2, 3)) == (1, 6, 6, 0, 0, 0, 0)
        assert sum(correctable_counts(ParityCode(1, 3))) == 1

    def test_enumeration_limit(self):
        with pytest.raises(CapacityError):
            correctable_counts(ParityCode(7, 3))


class TestSuccessProbability:
    @pytest.mark.parametrize("n, m", [(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)])
    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.37, 0.8, 1.0])
    def test_matches_brute_force(self, n, m, eps):
        code = ParityCode(n, m)
        expected = brute_force_success(n, m, eps)
        assert parity_loss_enumerated(code, eps) == pytest.approx(expected, abs=1e-12)
        assert parity_loss_closed_form(code, eps) == pytest.approx(expected, abs=1e-12)

    def test_known_value(self):
        assert parity_loss_success(ParityCode(2, 2), 0.1) == pytest.approx(0.9477, abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 5))
    @pytest.mark.parametrize("m", range(1, 5))
    def test_closed_form_exact_in_fractions(self, n, m):
        code = ParityCode(n, m)
        for eps in (Fraction(1, 7), Fraction(1, 2), Fraction(5, 6)):
            assert parity_loss_enumerated(code, eps) == parity_loss_closed_form(code, eps)

    def test_large_code_uses_closed_form(self):
        code = ParityCode(6, 6)
        assert parity_loss_success(code, 0.5) == pytest.approx(0.08328449075634126, rel=1e-12)
        assert parity_loss_success(code, 0.4) == pytest.approx(0.24406679522034236, rel=1e-12)

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            parity_loss_closed_form(ParityCode(2, 2), 1.5)
        with pytest.raises(ValueError):
            parity_loss_enumerated(ParityCode(2, 2), -0.1)

    @settings(max_examples=50)
    @given(st.integers(1, 8), st.integers(1, 8), st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_loss(self, n, m, e1, e2):
        code = ParityCode(n, m)
        lo, hi = sorted((e1, e2))
        assert parity_loss_closed_form(code, hi) <= parity_loss_closed_form(code, lo) + 1e-12

    @settings(max_examples=50)
    @given(st.integers(1, 10), st.integers(1, 10), st.floats(0, 1))
    def test_is_probability(self, n, m, e):
        assert -1e-12 <= parity_loss_closed_form(ParityCode(n, m), e) <= 1 + 1e-12


def one_way(total_km, n_links, **kw):
    return RepeaterConfig.uniform(total_km, n_links, mode=RepeaterMode.ONE_WAY, **kw)


class TestOneWay:
    def test_lossless_chain_runs_at_source_rate(self):
        cfg = one_way(0, 5, bsa=deterministic_bsa(), attempt_rate=2e6)
        res = simulate_one_way(cfg, ParityCode(3, 3))
        assert res.rate_hz == pytest.approx(2e6)
        assert res.fidelity == 1.0

    def test_composition(self):
        cfg = one_way(30, 3, bsa=linear_optics(30), emitter=EmitterParams.waveguide(1.0, eta_out=0.9))
        code = ParityCode(3, 2)
        eps = 1 - 10 ** (-0.2) * 0.9
        assert hop_loss(cfg) == pytest.approx(eps)
        per_hop = parity_loss_closed_form(code, eps) * 0.96875**6
        assert hop_success(cfg, code) == pytest.approx(per_hop)
        res = simulate_one_way(cfg, code)
        assert res.rate_hz == pytest.approx(1e6 * per_hop**3)
        assert res.herald_statistics["latency_s"] == pytest.approx(3 * 10 / 2e5)

    def test_single_hop_ten_percent_loss(self):
        link = LinkParams(0, attenuation_db_per_km=0.0)
        cfg = one_way(1, 1, link=link, emitter=EmitterParams.waveguide(1.0, eta_out=0.9), bsa=linear_optics(30))
        res = simulate_one_way(cfg, ParityCode(2, 2))
        assert res.rate_hz / cfg.attempt_rate == pytest.approx(brute_force_success(2, 2, 0.1) * 0.96875**4, rel=1e-12)

    def test_fidelity_from_misidentification(self):
        m = BsaModel(BsaKind.ACTIVE_TWO_SPIN, emitter=EmitterParams.waveguide(1.0), pulse_width_sigma_omega=1e8)
        res = simulate_one_way(one_way(20, 2, bsa=m), ParityCode(2, 2))
        assert res.fidelity == pytest.approx((1 - 0.1**4) ** 8)

    def test_requires_one_way_mode(self):
        with pytest.raises(ValueError):
            simulate_one_way(RepeaterConfig.uniform(20, 2), ParityCode(2, 2))

    @pytest.mark.parametrize("code", [(4, 4), (6, 6)])
    def test_spacing_has_interior_optimum(self, code):
        # fixed 64 km, rate delivered per station built
        spacings = [0.5, 1, 2, 4, 8]
        per_station = []
        for s in spacings:
            cfg = one_way(64, int(64 / s), bsa=deterministic_bsa())
            per_station.append(simulate_one_way(cfg, ParityCode(*code)).rate_hz / cfg.n_links)
        best = int(np.argmax(per_station))
        assert 0 < best < len(spacings) - 1
        assert spacings[best] in (1, 2)

    def test_link_constants_respected(self):
        cfg = one_way(20, 2, link=LinkParams(0, attenuation_db_per_km=0.0), bsa=deterministic_bsa())
        assert hop_loss(cfg) == pytest.approx(0.0)
