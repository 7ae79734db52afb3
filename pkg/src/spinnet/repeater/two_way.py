"""Nested two-way repeater Monte-Carlo.

Time runs in integer ticks of one link attempt (``link length / signal speed``).  Links are
generated in parallel; a finished segment dephases while its partner is still working.
A swap joining ``2^j`` links is announced after ``2^(j-1)`` ticks (middle to the ends) and
a failed swap restarts both halves.  Purification is entanglement pumping at link level:
each round generates a fresh pair, purifies, and spends one tick on the classical reply.

The heralded link is built once as a density matrix.  Trials then evolve its Bell-diagonal
weights with :mod:`.bell_diagonal`, which is exact for this family.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import interface
from ..analyzers import bsa_error_prob, bsa_success_prob
from ..qsim import spin
from . import bell_diagonal as bd
from .config import MaxAttemptsExceeded, RepeaterConfig, RepeaterMode, SimResult
from .elementary import attempt_time, heralded_link_state, link_success_probability, sample_attempts

CHUNK_SIZE = 2048
WORKERS_ENV = "SPINNET_WORKERS"


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == "":
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass
class _Counters:
    attempts: int = 0
    links: int = 0
    swap_failures: int = 0
    purification_failures: int = 0


class _Plan:
    """Per-config constants shared by all trials."""

    def __init__(self, cfg: RepeaterConfig):
        a, b = spin(0), spin(1)
        self.cfg = cfg
        self.levels = cfg.n_links.bit_length() - 1
        self.link_weights = bd.from_state(heralded_link_state(cfg, (a, b)), a, b)
        self.p_link = link_success_probability(cfg)
        self.p_swap = bsa_success_prob(cfg.bsa)
        self.swap_error = bsa_error_prob(cfg.bsa)
        self.tau = attempt_time(cfg)


class _Trial:
    def __init__(self, plan: _Plan, rng: np.random.Generator):
        self.plan = plan
        self.cfg = plan.cfg
        self.rng = rng
        self.link_weights = plan.link_weights
        self.p_link = plan.p_link
        self.p_swap = plan.p_swap
        self.swap_error = plan.swap_error
        self.count = _Counters()

    def _wait(self, w: bd.Weights, ticks: int) -> bd.Weights:
        if ticks == 0:
            return w
        c = interface.memory_coherence(ticks * self.plan.tau, self.cfg.emitter)
        return bd.dephase(w, c * c)

    def _attempts(self) -> int:
        n = sample_attempts(self.p_link, self.rng, self.cfg.max_attempts)
        self.count.attempts += n
        self.count.links += 1
        return n

    def link(self) -> tuple[int, bd.Weights]:
        t = 0
        while True:
            t += self._attempts()
            w = self.link_weights
            for _ in range(self.cfg.purification_rounds):
                a = self._attempts()
                t += a + 1
                prob, w = bd.purify(self._wait(w, a), self.link_weights)
                if self.rng.random() >= prob:
                    self.count.purification_failures += 1
                    break
                w = self._wait(w, 1)
            else:
                return t, w

    def node(self, level: int) -> tuple[int, bd.Weights]:
        if level == 0:
            return self.link()
        delay = 2 ** (level - 1)
        t = 0
        while True:
            tl, wl = self.node(level - 1)
            tr, wr = self.node(level - 1)
            done = max(tl, tr)
            t += done + delay
            if self.rng.random() < self.p_swap:
                merged = bd.swap(self._wait(wl, done - tl), self._wait(wr, done - tr), self.swap_error)
                return t, self._wait(merged, delay)
            self.count.swap_failures += 1


def _run_chunk(args) -> dict[str, np.ndarray]:
    cfg, root_seed, start, stop = args
    n = stop - start
    out = {
        "ticks": np.empty(n, dtype=np.int64),
        "fidelity": np.empty(n),
        "attempts": np.empty(n, dtype=np.int64),
        "links": np.empty(n, dtype=np.int64),
        "swap_failures": np.empty(n, dtype=np.int64),
        "purification_failures": np.empty(n, dtype=np.int64),
    }
    plan = _Plan(cfg)
    for i in range(n):
        trial = _Trial(plan, np.random.default_rng([root_seed, start + i]))
        ticks, w = trial.node(plan.levels)
        out["ticks"][i] = ticks
        out["fidelity"][i] = w[0]
        out["attempts"][i] = trial.count.attempts
        out["links"][i] = trial.count.links
        out["swap_failures"][i] = trial.count.swap_failures
        out["purification_failures"][i] = trial.count.purification_failures
    return out


def root_seed_from(rng: np.random.Generator | int) -> int:
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(2**63))
    seed = int(rng)
    if seed < 0:
        raise ValueError("seed must be >= 0")
    return seed


def run_trials(
    cfg: RepeaterConfig,
    rng: np.random.Generator | int,
    trials: int,
    workers: int | None = None,
) -> dict[str, np.ndarray]:
    """Per-trial records in trial order; identical for any ``workers``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if cfg.mode is not RepeaterMode.TWO_WAY:
        raise ValueError("simulate_two_way needs a two_way config")
    if link_success_probability(cfg) <= 0:
        raise MaxAttemptsExceeded("link success probability is zero")
    seed = root_seed_from(rng)
    workers = worker_count() if workers is None else workers
    chunks = [(cfg, seed, s, min(s + CHUNK_SIZE, trials)) for s in range(0, trials, CHUNK_SIZE)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def simulate_two_way(
    cfg: RepeaterConfig,
    rng: np.random.Generator | int,
    trials: int = 10_000,
    workers: int | None = None,
) -> SimResult:
    """End-to-end rate, mean fidelity and waiting-time summary over ``trials`` deliveries.

    ``rng`` is either a generator (a root seed is drawn from it) or the root seed itself.
    ``workers`` defaults to the ``SPINNET_WORKERS`` environment variable, else 1.
    """
    rec = run_trials(cfg, rng, trials, workers)
    tau = attempt_time(cfg)
    waits = rec["ticks"] * tau
    total = float(rec["ticks"].sum()) * tau
    stats = {
        "attempt_time_s": tau,
        "link_success_probability": link_success_probability(cfg),
        "wait_std_s": float(waits.std()),
        "wait_p50_s": float(np.percentile(waits, 50)),
        "wait_p90_s": float(np.percentile(waits, 90)),
        "wait_max_s": float(waits.max()),
        "fidelity_std": float(rec["fidelity"].std()),
        "mean_attempts_per_link": float(rec["attempts"].sum() / rec["links"].sum()),
        "swap_failures": int(rec["swap_failures"].sum()),
        "purification_failures": int(rec["purification_failures"].sum()),
    }
    return SimResult(
        rate_hz=trials / total if total > 0 else float("inf"),
        fidelity=float(np.clip(rec["fidelity"].mean(), 0.0, 1.0)),
        mean_wait_s=float(waits.mean()),
        herald_statistics=stats,
        trials=trials,
    )
