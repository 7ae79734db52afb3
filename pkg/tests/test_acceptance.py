"""One test per acceptance criterion; each prints a PASS/FAIL line with its numbers."""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from spinnet import interface
from spinnet.analyzers import BsaKind, BsaModel, bench_bsa, deterministic_bsa, linear_optics, qnd_branches
from spinnet.cli import main
from spinnet.cluster import EmissionConfig, emit_1d_cluster, emit_ghz, stabilizer_report
from spinnet.interface import EmitterParams
from spinnet.qsim import PureState, apply_channel, basis_state, bell_state, fidelity, photon, presence, spin, werner_from_fidelity
from spinnet.repeater import (
    ParityCode,
    RepeaterConfig,
    RepeaterMode,
    entanglement_swap,
    parity_loss_closed_form,
    parity_loss_enumerated,
    purify,
    simulate_one_way,
    simulate_two_way,
)

from oracles import purify_oracle, swap_oracle

pytestmark = pytest.mark.acceptance


def report(number, name, ok, detail):
    print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {name} ({detail})")
    assert ok, detail


def phi_fidelity(rho):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return float(np.real(phi @ rho @ phi))


def test_criterion_01_reflection_limits():
    r = interface.reflection_coefficient
    uncoupled = all(r(c, False) == -1.0 for c in (0.0, 0.3, 1.0, 50.0, 1e6))
    strong = all(r(c, True) > 0.98 for c in (50.0, 100.0, 1e3, 1e6))
    exact = abs(r(1.0, True) - 0.6) <= 1e-12
    report(1, "reflection limits", uncoupled and strong and exact, f"r(C=1, s) = {r(1.0, True)!r}, r(C=50, s) = {r(50.0, True):.6f}")


def test_criterion_02_cz_error_scaling():
    start = time.perf_counter()
    plus = np.array([1, 1]) / np.sqrt(2)
    st = PureState((photon(0), spin(1)), np.kron(plus, plus)).density()
    target = PureState((photon(0), spin(1)), np.diag([1, -1, 1, 1]) @ np.kron(plus, plus))
    cs = np.array([10.0, 1e2, 1e3, 1e4])
    infidelity = []
    for c in cs:
        ch = interface.spin_photon_cz_channel(EmitterParams.cavity(c), photon(0), spin(1))
        infidelity.append(1 - fidelity(apply_channel(st, ch), target))
    slope = np.polyfit(np.log10(cs), np.log10(infidelity), 1)[0]
    elapsed = time.perf_counter() - start
    report(2, "CZ infidelity ~ 1/C", abs(slope + 1) <= 0.15 and elapsed < 1, f"slope {slope:.4f}, {elapsed:.3f} s")


def test_criterion_03_deterministic_bsa_doubles_rate():
    start = time.perf_counter()
    trials = 100_000
    rates = {}
    for name, bsa in (("deterministic", deterministic_bsa()), ("linear", linear_optics())):
        cfg = RepeaterConfig.uniform(20, 1, bsa=bsa)
        rates[name] = simulate_two_way(cfg, 2024, trials=trials).rate_hz
    ratio = rates["deterministic"] / rates["linear"]
    elapsed = time.perf_counter() - start
    report(3, "single-link rate ratio", abs(ratio - 2) <= 0.1 and elapsed < 30, f"ratio {ratio:.4f}, {elapsed:.1f} s")


@pytest.mark.parametrize("beta, expected", [(0.6, 0.04), (0.8, 0.36), (0.95, 0.81)])
def test_criterion_04_active_two_spin_success(beta, expected):
    trials = 100_000
    m = BsaModel(BsaKind.ACTIVE_TWO_SPIN, emitter=EmitterParams.waveguide(beta))
    freq = bench_bsa(m, trials, np.random.default_rng([4, int(beta * 100)])).success_frequency
    sigma = math.sqrt(expected * (1 - expected) / trials)
    report(4, f"active two-spin success at beta={beta}", abs(freq - expected) <= 3 * sigma, f"{freq:.5f} vs {expected} +- {3 * sigma:.5f}")


def test_criterion_05_emission_stabilizers_and_herald():
    ideal = EmitterParams.waveguide(1.0)
    worst = 0.0
    for n in range(1, 7):
        for hs in (emit_ghz(EmissionConfig(n, ideal)), emit_1d_cluster(EmissionConfig(n, ideal, intermediate_rotation=True))):
            worst = max(worst, max(abs(m - 1.0) for _, _, m in stabilizer_report(hs)))
    herald = emit_ghz(EmissionConfig(2, EmitterParams.waveguide(0.9))).herald_probability
    report(5, "stabilizers and herald", worst <= 1e-9 and herald == 0.9**2 and abs(herald - 0.81) <= 1e-15,
           f"max stabilizer deviation {worst:.2e}, herald {herald!r}")


def test_criterion_06_swap_and_purify_match_oracle():
    rng = np.random.default_rng(6)
    a, b, c, d = spin(0), spin(1), spin(2), spin(3)
    worst = 0.0
    for f1, f2 in ((0.9, 0.8), (0.75, 0.95), (0.6, 0.6), (0.99, 0.7)):
        p1, p2 = werner_from_fidelity(a, b, f1), werner_from_fidelity(c, d, f2)
        swap_ref = phi_fidelity(swap_oracle(p1.matrix, p2.matrix))
        for _ in range(4):
            out = entanglement_swap(p1, p2, deterministic_bsa(), rng)
            worst = max(worst, abs(fidelity(out, bell_state(a, d)) - swap_ref))
        q1, q2 = werner_from_fidelity(a, b, f1), werner_from_fidelity(c, d, f2)
        purify_ref = phi_fidelity(purify_oracle(q1.matrix, q2.matrix)[1])
        for _ in range(8):
            out = purify(q1, q2, rng)
            if out is not None:
                worst = max(worst, abs(fidelity(out, bell_state(a, b)) - purify_ref))
    report(6, "swap and purify vs 16x16 oracle", worst <= 1e-10, f"max fidelity difference {worst:.2e}")


def test_criterion_07_parity_decoding():
    codes = [(n, m) for n in range(1, 17) for m in range(1, 17) if n * m <= 16]
    eps_values = (Fraction(0), Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(7, 9), Fraction(1))
    exact = all(
        parity_loss_closed_form(ParityCode(n, m), e) == parity_loss_enumerated(ParityCode(n, m), e)
        for n, m in codes
        for e in eps_values
    )
    grid = np.linspace(0, 1, 101)
    monotone, to_one = True, True
    for n, m in codes + [(6, 6), (30, 10)]:
        vals = [parity_loss_closed_form(ParityCode(n, m), e) for e in grid]
        monotone &= all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))
        to_one &= parity_loss_closed_form(ParityCode(n, m), 0.0) == 1 and abs(parity_loss_closed_form(ParityCode(n, m), 1e-9) - 1) < 1e-6
    big = ParityCode(6, 6)
    s4, s5 = parity_loss_closed_form(big, 0.4), parity_loss_closed_form(big, 0.5)
    ok = exact and monotone and to_one and s4 > s5 and s5 < 0.5
    report(7, "parity decoding", ok, f"{len(codes)} codes exact={exact}, (6,6): {s4:.4f} at 0.4, {s5:.4f} at 0.5")


@pytest.mark.parametrize("beta_coh", [0.99, 0.995])
def test_criterion_08_qnd_error(beta_coh):
    trials = 100_000
    # gamma_dp tuned so gamma_1d / (gamma_total + gamma_dp) = beta_coh
    e = EmitterParams(gamma_1d=1e9, gamma_dp=1e9 / beta_coh - 1e9)
    branches = qnd_branches(basis_state((presence(0),), (1,)).density(), presence(0), e)
    present = np.array([b[0] for b in branches])
    probs = np.array([b[1] for b in branches])
    rng = np.random.default_rng([8, int(beta_coh * 1000)])
    picks = rng.choice(len(branches), size=trials, p=probs / probs.sum())
    wrong = float(np.mean(~present[picks]))
    expected = 1 / beta_coh - 1
    rel = abs(wrong - expected) / expected
    report(8, f"QND wrong answers at beta_coh={beta_coh}", rel <= 0.2, f"{wrong:.5f} vs {expected:.5f}, relative {rel:.3f}")


def test_criterion_09_one_way_flat_two_way_grows():
    distances = (100, 200, 400)
    spacing = 2.0
    code = ParityCode(30, 10)
    one_way = []
    for dist in distances:
        cfg = RepeaterConfig.uniform(dist, int(dist / spacing), mode=RepeaterMode.ONE_WAY, bsa=deterministic_bsa())
        one_way.append(simulate_one_way(cfg, code).rate_hz)
    spread = (max(one_way) - min(one_way)) / max(one_way)

    waits = [simulate_two_way(RepeaterConfig.uniform(d, 2), 9, trials=20_000).mean_wait_s for d in distances]
    linear = all(waits[i + 1] / waits[i] >= distances[i + 1] / distances[i] for i in range(2))
    report(9, "one-way flat, two-way wait superlinear", spread <= 1e-3 and linear,
           f"one-way spread {spread:.2e}, two-way waits {[f'{w:.4g}' for w in waits]} s")


def test_criterion_10_cli_determinism(tmp_path, capsys, monkeypatch):
    # (payload, trials); the two-way job spans several worker chunks
    jobs = {
        "repeater-2way": ({"total_distance_km": 200, "n_links": 4, "emitter": {"beta": 1.0, "t_coh": 0.01}}, 5000),
        "repeater-1way": ({"total_distance_km": 100, "n_links": 10, "code": {"n_blocks": 4, "block_size": 4}}, 1),
        "bsa-bench": ({"bsa": {"kind": "cavity-cz"}, "emitter": {"geometry": "cavity", "cooperativity": 20}}, 500),
        "cluster-gen": ({"kind": "cluster", "n_photons": 4}, 1),
    }
    mismatched = []
    for command, (payload, trials) in jobs.items():
        path = tmp_path / f"{command}.json"
        path.write_text(json.dumps(payload))
        outputs = []
        for workers in ("1", "4", "1"):
            monkeypatch.setenv("SPINNET_WORKERS", workers)
            assert main([command, str(path), "--seed", "31", "--trials", str(trials), "--format", "json"]) == 0
            outputs.append(capsys.readouterr().out.encode())
        if len(set(outputs)) != 1:
            mismatched.append(command)
    report(10, "byte-identical reruns", not mismatched, f"mismatched: {mismatched or 'none'}")
