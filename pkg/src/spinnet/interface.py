"""Spin-photon interface figures of merit and the scattering channels built from them.

Basis conventions used throughout the package:

* photon polarization qubit: ``|H> = |0>``, ``|V> = |1>``; only ``H`` couples to the emitter
* spin qubit: ``|g> = |0>`` (uncoupled), ``|s> = |1>`` (coupled to the excited level)
* photon presence qubit: ``|vac> = |0>``, ``|1 photon> = |1>``

Two cooperativity conventions exist. ``cooperativity`` uses ``4|g|^2 / (kappa * gamma)``.
``reflection_coefficient`` takes the single-sided-cavity convention ``|g|^2 / (gamma * kappa)``,
which is four times smaller, so ``4 * C_reflection == C``.  The channel constructors do the
conversion; callers passing a raw number to ``reflection_coefficient`` must pick the
convention themselves.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qsim import QuantumChannel, QubitLabel

H, V = 0, 1
G, S = 0, 1


class Geometry(enum.Enum):
    WAVEGUIDE = "waveguide"
    CAVITY = "cavity"


@dataclass(frozen=True)
class EmitterParams:
    """Figures of merit of one spin-photon interface (rates in 1/s, ``g`` in rad/s)."""

    gamma_rad: float = 0.0
    gamma_nonrad: float = 0.0
    gamma_dp: float = 0.0
    gamma_1d: float = 0.0
    g: float = 0.0
    kappa: float = 0.0
    t_coh: float = math.inf
    delta_omega: float = 0.0
    eta_in: float = 1.0
    eta_out: float = 1.0
    geometry: Geometry = Geometry.WAVEGUIDE

    def __post_init__(self):
        if isinstance(self.geometry, str):
            object.__setattr__(self, "geometry", Geometry(self.geometry))
        for name in ("gamma_rad", "gamma_nonrad", "gamma_dp", "gamma_1d", "kappa", "delta_omega"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        for name in ("eta_in", "eta_out"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if not self.t_coh > 0:
            raise ValueError(f"t_coh must be > 0, got {self.t_coh!r}")

    @classmethod
    def waveguide(cls, beta: float, gamma_total: float = 1e9, **kw) -> "EmitterParams":
        """Waveguide emitter with the given beta factor; the rest of the decay is radiative."""
        if not 0 <= beta <= 1:
            raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
        return cls(gamma_1d=beta * gamma_total, gamma_rad=(1 - beta) * gamma_total,
                   geometry=Geometry.WAVEGUIDE, **kw)

    @classmethod
    def cavity(cls, cooperativity: float, gamma: float = 1e9, kappa: float = 1e11, **kw) -> "EmitterParams":
        """Cavity emitter with ``C = 4 g^2 / (kappa gamma)``; all free-space decay is radiative."""
        if cooperativity < 0:
            raise ValueError("cooperativity must be >= 0")
        g = math.sqrt(cooperativity * kappa * gamma / 4)
        return cls(gamma_rad=gamma, g=g, kappa=kappa, geometry=Geometry.CAVITY, **kw)


@dataclass(frozen=True)
class LinkParams:
    length_km: float
    attenuation_db_per_km: float = 0.2
    signal_speed_km_per_s: float = 2e5

    def __post_init__(self):
        if not self.length_km >= 0:
            raise ValueError(f"length_km must be >= 0, got {self.length_km!r}")
        if not self.attenuation_db_per_km >= 0:
            raise ValueError("attenuation_db_per_km must be >= 0")
        if not self.signal_speed_km_per_s > 0:
            raise ValueError("signal_speed_km_per_s must be > 0")

    @property
    def signal_time(self) -> float:
        """One-way propagation time over the link, in seconds."""
        return self.length_km / self.signal_speed_km_per_s

    def scaled(self, length_km: float) -> "LinkParams":
        return LinkParams(length_km, self.attenuation_db_per_km, self.signal_speed_km_per_s)


def _require(p: EmitterParams, geometry: Geometry, what: str) -> None:
    if p.geometry is not geometry:
        raise ValueError(f"{what} is defined for {geometry.value} emitters, got {p.geometry.value}")


def total_decay(p: EmitterParams) -> float:
    return p.gamma_1d + p.gamma_rad + p.gamma_nonrad


def beta(p: EmitterParams) -> float:
    _require(p, Geometry.WAVEGUIDE, "beta")
    total = total_decay(p)
    if total <= 0:
        raise ZeroDivisionError("total decay rate is zero")
    return p.gamma_1d / total


def beta_coh(p: EmitterParams) -> float:
    _require(p, Geometry.WAVEGUIDE, "beta_coh")
    total = total_decay(p) + p.gamma_dp
    if total <= 0:
        raise ZeroDivisionError("total decay rate is zero")
    return p.gamma_1d / total


def cooperativity(p: EmitterParams, coherent: bool = False) -> float:
    _require(p, Geometry.CAVITY, "cooperativity")
    denom = p.kappa * (p.gamma_rad + p.gamma_nonrad + (p.gamma_dp if coherent else 0.0))
    if denom <= 0:
        raise ZeroDivisionError("cooperativity denominator is zero")
    return 4 * abs(p.g) ** 2 / denom


def cavity_decay_fraction(c: float) -> float:
    if c < 0:
        raise ValueError("cooperativity must be >= 0")
    if math.isinf(c):
        return 1.0
    return c / (1 + c)


def efficiency(p: EmitterParams, coherent: bool = False) -> float:
    """Probability of emission into the guided mode: beta for waveguides, C/(1+C) for cavities."""
    if p.geometry is Geometry.WAVEGUIDE:
        return beta_coh(p) if coherent else beta(p)
    return cavity_decay_fraction(cooperativity(p, coherent))


def effective_cooperativity(p: EmitterParams, coherent: bool = False) -> float:
    """Cooperativity ``C = 4 g^2 / (kappa gamma)``; waveguides map through ``beta = C / (1 + C)``."""
    if p.geometry is Geometry.CAVITY:
        return cooperativity(p, coherent)
    b = beta_coh(p) if coherent else beta(p)
    return math.inf if b >= 1 else b / (1 - b)


def reflection_coefficient(c: float, spin_in_s: bool) -> float:
    """Amplitude reflection of a resonant photon off a single-sided cavity.

    ``c`` is ``|g|^2 / (gamma * kappa)``; the coupled level gives ``(-1 + 4c) / (1 + 4c)``,
    the uncoupled level a bare-mirror ``-1``.
    """
    if c < 0:
        raise ValueError("cooperativity must be >= 0")
    if not spin_in_s:
        return -1.0
    if math.isinf(c):
        return 1.0
    return (-1 + 4 * c) / (1 + 4 * c)


def scattering_dephasing_probability(p: EmitterParams) -> float:
    """Chance that pure dephasing scrambles the phase of a scattering event."""
    if p.gamma_dp == 0:
        return 0.0
    if p.geometry is Geometry.WAVEGUIDE:
        emitted = total_decay(p)
    else:
        # Purcell-enhanced decay: free-space rate times (1 + C)
        emitted = (p.gamma_rad + p.gamma_nonrad) * (1 + cooperativity(p))
    return p.gamma_dp / (p.gamma_dp + emitted)


def cz_channel(
    c_reflection: float,
    photon: QubitLabel,
    spin: QubitLabel,
    presence: QubitLabel | None = None,
    p_dephase: float = 0.0,
) -> QuantumChannel:
    """Spin-photon controlled-phase from one reflection, with loss and dephasing branches.

    Coherent part: ``diag(1, 1, 1, -r)`` in the ``(Vg, Vs, Hg, Hs)`` ordering, i.e. the
    ``H s`` amplitude picks up ``-r``.  The missing ``1 - r^2`` weight of that amplitude is a
    lost photon (spontaneous emission back to ``|s>``).  When ``presence`` is given the loss
    flips it to vacuum and the whole map only acts on the one-photon subspace, so loss is
    heralded; otherwise the loss branch stays on the polarization/spin pair.
    """
    r = reflection_coefficient(c_reflection, True)
    coherent = np.diag([1, -r, 1, 1]).astype(complex)  # order: Hg, Hs, Vg, Vs
    hs = np.zeros((4, 4), dtype=complex)
    hs[1, 1] = 1
    loss_amp = math.sqrt(max(0.0, 1 - r * r))
    z_spin = np.kron(np.eye(2), np.diag([1, -1])).astype(complex)

    if presence is None:
        ops = [coherent]
        if loss_amp > 0:
            ops.append(loss_amp * hs)
        dephase = z_spin
        acts_on = (photon, spin)
    else:
        p0 = np.diag([1, 0]).astype(complex)
        p1 = np.diag([0, 1]).astype(complex)
        lower = np.array([[0, 1], [0, 0]], dtype=complex)
        ops = [np.kron(np.eye(4), p0) + np.kron(coherent, p1)]
        if loss_amp > 0:
            ops.append(loss_amp * np.kron(hs, lower))
        dephase = np.kron(z_spin, p1) + np.kron(np.eye(4), p0)
        acts_on = (photon, spin, presence)

    if p_dephase > 0:
        ops = [math.sqrt(1 - p_dephase) * k for k in ops] + [math.sqrt(p_dephase) * dephase @ k for k in ops]
    return QuantumChannel(tuple(ops), acts_on)


def spin_photon_cz_channel(
    p: EmitterParams,
    photon: QubitLabel,
    spin: QubitLabel,
    presence: QubitLabel | None = None,
) -> QuantumChannel:
    c_eff = effective_cooperativity(p)
    return cz_channel(c_eff / 4, photon, spin, presence, scattering_dephasing_probability(p))


def ideal_cz(photon: QubitLabel, spin: QubitLabel) -> QuantumChannel:
    return cz_channel(math.inf, photon, spin)


def fiber_transmissivity(link: LinkParams) -> float:
    return 10 ** (-link.attenuation_db_per_km * link.length_km / 10)


def phase_damping_channel(coherence: float, qubit: QubitLabel) -> QuantumChannel:
    """Multiplies the off-diagonal element of ``qubit`` by ``coherence``."""
    if not 0 <= coherence <= 1:
        raise ValueError("coherence factor must lie in [0, 1]")
    return QuantumChannel(
        (math.sqrt((1 + coherence) / 2) * np.eye(2), math.sqrt((1 - coherence) / 2) * np.diag([1, -1])),
        (qubit,),
    )


def memory_coherence(t_wait: float, p: EmitterParams) -> float:
    if t_wait < 0:
        raise ValueError("t_wait must be >= 0")
    if math.isinf(p.t_coh) or t_wait == 0:
        return 1.0
    return math.exp(-t_wait / p.t_coh)


def memory_dephasing_channel(t_wait: float, p: EmitterParams, qubit: QubitLabel) -> QuantumChannel:
    return phase_damping_channel(memory_coherence(t_wait, p), qubit)


def photon_loss_channel(transmissivity: float, qubit: QubitLabel) -> QuantumChannel:
    """Amplitude loss on a presence qubit."""
    if not 0 <= transmissivity <= 1:
        raise ValueError("transmissivity must lie in [0, 1]")
    return QuantumChannel(
        (
            np.array([[1, 0], [0, math.sqrt(transmissivity)]]),
            np.array([[0, math.sqrt(1 - transmissivity)], [0, 0]]),
        ),
        (qubit,),
    )
