"""Configuration and result records for repeater runs."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ..analyzers import BsaModel, linear_optics
from ..interface import EmitterParams, LinkParams


class RepeaterMode(enum.Enum):
    TWO_WAY = "two_way"
    ONE_WAY = "one_way"


class MaxAttemptsExceeded(RuntimeError):
    """Link generation did not herald within the attempt budget."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class RepeaterConfig:
    """A chain of ``n_links`` identical links covering ``total_distance_km``.

    ``attempt_rate`` is the local repetition rate of the source (1/s).  It sets the
    one-way rate; two-way attempts are paced by the signaling time of a link instead.
    """

    total_distance_km: float
    n_links: int
    link: LinkParams
    emitter: EmitterParams = field(default_factory=lambda: EmitterParams.waveguide(1.0))
    bsa: BsaModel = field(default_factory=linear_optics)
    attempt_rate: float = 1e6
    purification_rounds: int = 0
    mode: RepeaterMode = RepeaterMode.TWO_WAY
    max_attempts: int = 10**9

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", RepeaterMode(self.mode))
        if not isinstance(self.n_links, int) or self.n_links < 1:
            raise ValueError(f"n_links must be an integer >= 1, got {self.n_links!r}")
        if self.mode is RepeaterMode.TWO_WAY and not is_power_of_two(self.n_links):
            raise ValueError(f"n_links must be a power of two for nested swapping, got {self.n_links}")
        if not self.total_distance_km >= 0:
            raise ValueError("total_distance_km must be >= 0")
        if not math.isclose(self.n_links * self.link.length_km, self.total_distance_km, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(
                f"n_links * link.length_km = {self.n_links * self.link.length_km} "
                f"does not match total_distance_km = {self.total_distance_km}"
            )
        if not self.attempt_rate > 0:
            raise ValueError("attempt_rate must be > 0")
        if self.purification_rounds < 0:
            raise ValueError("purification_rounds must be >= 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    @classmethod
    def uniform(cls, total_distance_km: float, n_links: int, link: LinkParams | None = None, **kw) -> "RepeaterConfig":
        """Split ``total_distance_km`` evenly; ``link`` only supplies fiber constants."""
        base = link if link is not None else LinkParams(0.0)
        return cls(total_distance_km, n_links, base.scaled(total_distance_km / n_links), **kw)


@dataclass(frozen=True)
class ParityCode:
    """``n_blocks`` blocks of ``block_size`` photons each."""

    n_blocks: int
    block_size: int

    def __post_init__(self):
        if self.n_blocks < 1 or self.block_size < 1:
            raise ValueError("n_blocks and block_size must be >= 1")

    @property
    def n_photons(self) -> int:
        return self.n_blocks * self.block_size


@dataclass(frozen=True)
class SimResult:
    rate_hz: float
    fidelity: float
    mean_wait_s: float
    herald_statistics: dict = field(default_factory=dict)
    trials: int = 1

    def __post_init__(self):
        if not self.rate_hz >= 0:
            raise ValueError("rate_hz must be >= 0")
        if not -1e-9 <= self.fidelity <= 1 + 1e-9:
            raise ValueError("fidelity must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
