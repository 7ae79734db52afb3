"""JSON run-configuration schema and its conversion to domain objects.

Field names follow the figure-of-merit symbols (``gamma_rad``, ``gamma_1d``, ``kappa``...).
Unknown keys are rejected everywhere.  ``validate_config`` returns either a
:class:`RunConfig` or a list of ``field.path: message`` diagnostics.
"""
from __future__ import annotations

import copy
import json
import math
from typing import Any, ClassVar, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .analyzers import BsaKind, BsaModel, ModelConstants
from .cluster import EmissionConfig
from .interface import EmitterParams, LinkParams
from .repeater import ParityCode, RepeaterConfig, RepeaterMode
from .repeater.config import is_power_of_two

COMMANDS = ("interface-report", "bsa-bench", "cluster-gen", "repeater-2way", "repeater-1way", "sweep")
SWEEPABLE = COMMANDS[:-1]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class EmitterSpec(_Strict):
    """Either explicit rates, or the ``beta`` / ``cooperativity`` shorthand."""

    geometry: Literal["waveguide", "cavity"] = "waveguide"
    gamma_rad: Optional[float] = Field(None, ge=0)
    gamma_nonrad: float = Field(0.0, ge=0)
    gamma_dp: float = Field(0.0, ge=0)
    gamma_1d: Optional[float] = Field(None, ge=0)
    g: Optional[float] = None
    kappa: Optional[float] = Field(None, ge=0)
    t_coh: Optional[float] = Field(None, gt=0, description="seconds; null means no memory decay")
    delta_omega: float = Field(0.0, ge=0)
    eta_in: float = Field(1.0, ge=0, le=1)
    eta_out: float = Field(1.0, ge=0, le=1)
    beta: Optional[float] = Field(None, ge=0, le=1)
    cooperativity: Optional[float] = Field(None, ge=0)
    gamma_total: float = Field(1e9, gt=0)

    @model_validator(mode="after")
    def _shorthand(self):
        if self.beta is not None:
            if self.geometry != "waveguide":
                raise ValueError("beta shorthand needs geometry 'waveguide'")
            if self.gamma_1d is not None or self.gamma_rad is not None:
                raise ValueError("give either beta or gamma_1d/gamma_rad, not both")
        if self.cooperativity is not None:
            if self.geometry != "cavity":
                raise ValueError("cooperativity shorthand needs geometry 'cavity'")
            if self.g is not None:
                raise ValueError("give either cooperativity or g, not both")
        return self

    def build(self) -> EmitterParams:
        extra = dict(
            gamma_nonrad=self.gamma_nonrad,
            gamma_dp=self.gamma_dp,
            t_coh=math.inf if self.t_coh is None else self.t_coh,
            delta_omega=self.delta_omega,
            eta_in=self.eta_in,
            eta_out=self.eta_out,
        )
        if self.beta is not None:
            return EmitterParams.waveguide(self.beta, self.gamma_total, **extra)
        if self.cooperativity is not None:
            kw = {} if self.kappa is None else {"kappa": self.kappa}
            if self.gamma_rad is not None:
                kw["gamma"] = self.gamma_rad
            return EmitterParams.cavity(self.cooperativity, **kw, **extra)
        return EmitterParams(
            gamma_rad=self.gamma_rad or 0.0,
            gamma_1d=self.gamma_1d or 0.0,
            g=self.g or 0.0,
            kappa=self.kappa or 0.0,
            geometry=self.geometry,
            **extra,
        )


class ConstantsSpec(_Strict):
    cavity_failure: float = Field(1.0, ge=0)
    sfg_failure: float = Field(1.0, ge=0)
    pulse_distortion: float = Field(1.0, ge=0)
    asymmetric_loss: float = Field(1.0, ge=0)
    active_spectral: float = Field(1.0, ge=0)
    inhomogeneous_coupling: float = Field(1.0, ge=0)


class BsaSpec(_Strict):
    kind: Literal[tuple(k.value for k in BsaKind)] = "linear-optics"
    aux_photons: int = Field(0, ge=0)
    concatenations: int = Field(1, ge=1)
    n_emitters: int = Field(1, ge=1)
    pulse_width_sigma_omega: float = Field(0.0, ge=0)
    delta_gamma_1d: float = Field(0.0, ge=0)
    emitter: Optional[EmitterSpec] = None
    constants: ConstantsSpec = ConstantsSpec()

    def build(self, default_emitter: EmitterParams | None = None) -> BsaModel:
        if self.emitter is not None:
            emitter = self.emitter.build()
        elif default_emitter is not None:
            emitter = default_emitter
        else:
            emitter = EmitterParams.waveguide(1.0)
        return BsaModel(
            kind=BsaKind(self.kind),
            aux_photons=self.aux_photons,
            concatenations=self.concatenations,
            n_emitters=self.n_emitters,
            pulse_width_sigma_omega=self.pulse_width_sigma_omega,
            delta_gamma_1d=self.delta_gamma_1d,
            emitter=emitter,
            constants=ModelConstants(**self.constants.model_dump()),
        )


class FiberSpec(_Strict):
    attenuation_db_per_km: float = Field(0.2, ge=0)
    signal_speed_km_per_s: float = Field(2e5, gt=0)


class InterfaceReportPayload(_Strict):
    emitter: EmitterSpec


class BsaBenchPayload(_Strict):
    bsa: BsaSpec
    emitter: Optional[EmitterSpec] = None
    bell_state: Literal["phi+", "phi-", "psi+", "psi-"] = "phi+"


class ClusterGenPayload(_Strict):
    kind: Literal["ghz", "cluster"] = "ghz"
    n_photons: int = Field(..., ge=1)
    emitter: EmitterSpec = EmitterSpec(beta=1.0)
    cycle_time: float = Field(1e-9, gt=0)

    def build(self) -> EmissionConfig:
        return EmissionConfig(self.n_photons, self.emitter.build(), self.cycle_time, self.kind == "cluster")


class _RepeaterPayload(_Strict):
    total_distance_km: float = Field(..., ge=0)
    n_links: int = Field(..., ge=1)
    fiber: FiberSpec = FiberSpec()
    emitter: EmitterSpec = EmitterSpec(beta=1.0)
    bsa: BsaSpec = BsaSpec()
    attempt_rate: float = Field(1e6, gt=0)
    purification_rounds: int = Field(0, ge=0)
    max_attempts: int = Field(10**9, ge=1)

    mode: ClassVar[RepeaterMode] = RepeaterMode.TWO_WAY

    def build(self) -> RepeaterConfig:
        emitter = self.emitter.build()
        link = LinkParams(self.total_distance_km / self.n_links, **self.fiber.model_dump())
        return RepeaterConfig(
            total_distance_km=self.total_distance_km,
            n_links=self.n_links,
            link=link,
            emitter=emitter,
            bsa=self.bsa.build(emitter),
            attempt_rate=self.attempt_rate,
            purification_rounds=self.purification_rounds,
            mode=self.mode,
            max_attempts=self.max_attempts,
        )


class TwoWayPayload(_RepeaterPayload):
    @field_validator("n_links")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if not is_power_of_two(v):
            raise ValueError(f"n_links must be a power of two for nested swapping, got {v}")
        return v


class CodeSpec(_Strict):
    n_blocks: int = Field(..., ge=1)
    block_size: int = Field(..., ge=1)

    def build(self) -> ParityCode:
        return ParityCode(self.n_blocks, self.block_size)


class OneWayPayload(_RepeaterPayload):
    code: CodeSpec
    mode: ClassVar[RepeaterMode] = RepeaterMode.ONE_WAY


PAYLOADS: dict[str, type[_Strict]] = {
    "interface-report": InterfaceReportPayload,
    "bsa-bench": BsaBenchPayload,
    "cluster-gen": ClusterGenPayload,
    "repeater-2way": TwoWayPayload,
    "repeater-1way": OneWayPayload,
}

Payload = Union[InterfaceReportPayload, BsaBenchPayload, ClusterGenPayload, TwoWayPayload, OneWayPayload]


class SweepSpec(_Strict):
    target: Literal[SWEEPABLE]
    axis: str = Field(..., min_length=1, description="dotted path into the payload, e.g. emitter.beta")
    values: list[Any] = Field(..., min_length=1)


class RunConfig(_Strict):
    command: Literal[COMMANDS]
    seed: int = Field(0, ge=0, lt=2**64)
    trials: int = Field(1000, ge=1)
    output_path: Optional[str] = None
    output_format: Literal["csv", "json"] = "csv"
    sweep: Optional[SweepSpec] = None
    payload: dict[str, Any]

    @model_validator(mode="after")
    def _sweep_matches_command(self):
        if self.command == "sweep" and self.sweep is None:
            raise ValueError("command 'sweep' needs a 'sweep' section")
        if self.command != "sweep" and self.sweep is not None:
            raise ValueError("a 'sweep' section is only allowed with command 'sweep'")
        return self

    @property
    def target(self) -> str:
        return self.sweep.target if self.sweep is not None else self.command


class ConfigError(ValueError):
    """Validation failure carrying ``field.path: message`` diagnostics."""

    def __init__(self, diagnostics: list[str]):
        super().__init__("\n".join(diagnostics))
        self.diagnostics = diagnostics


def _diagnostics(err: ValidationError, prefix: tuple = ()) -> list[str]:
    out = []
    for e in err.errors():
        path = ".".join(str(p) for p in prefix + tuple(e["loc"])) or "<root>"
        out.append(f"{path}: {e['msg']}")
    return out


def _check_axis(model: type[BaseModel], axis: str) -> None:
    current: Any = model
    for part in axis.split("."):
        fields = getattr(current, "model_fields", None)
        if fields is None or part not in fields:
            raise ConfigError([f"sweep.axis: unknown parameter '{axis}'"])
        ann = fields[part].annotation
        args = getattr(ann, "__args__", ())
        nested = [a for a in (ann, *args) if isinstance(a, type) and issubclass(a, BaseModel)]
        current = nested[0] if nested else None
    if current is not None:
        raise ConfigError([f"sweep.axis: '{axis}' names a section, not a parameter"])


def set_path(payload: dict, axis: str, value: Any) -> dict:
    out = copy.deepcopy(payload)
    node = out
    parts = axis.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError([f"payload.{axis}: cannot set a value below a non-object"])
    node[parts[-1]] = value
    return out


def parse_payload(command: str, payload: dict, prefix: tuple = ("payload",)) -> Payload:
    """Validate ``payload`` against the command's schema and its physical constraints."""
    model = PAYLOADS[command]
    try:
        parsed = model.model_validate(payload)
    except ValidationError as err:
        raise ConfigError(_diagnostics(err, prefix)) from None
    try:
        _build(parsed)
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError([f"{'.'.join(prefix)}: {err}"]) from None
    return parsed


def _build(p: Payload):
    if isinstance(p, InterfaceReportPayload):
        return p.emitter.build()
    if isinstance(p, BsaBenchPayload):
        return p.bsa.build(p.emitter.build() if p.emitter else None)
    if isinstance(p, OneWayPayload):
        return p.build(), p.code.build()
    return p.build()


def expand(cfg: RunConfig) -> list[tuple[Any, Payload]]:
    """``(sweep value, parsed payload)`` per row; a single ``(None, payload)`` without a sweep."""
    if cfg.sweep is None:
        return [(None, parse_payload(cfg.command, cfg.payload))]
    _check_axis(PAYLOADS[cfg.sweep.target], cfg.sweep.axis)
    rows = []
    for i, v in enumerate(cfg.sweep.values):
        payload = set_path(cfg.payload, cfg.sweep.axis, v)
        rows.append((v, parse_payload(cfg.sweep.target, payload, ("sweep", "values", str(i)))))
    return rows


def validate_config(raw: str | dict) -> RunConfig:
    """Parse and fully check a run configuration; raises :class:`ConfigError`."""
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as err:
            raise ConfigError([f"<root>: invalid JSON ({err.msg} at line {err.lineno} column {err.colno})"]) from None
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as err:
        raise ConfigError(_diagnostics(err)) from None
    expand(cfg)
    return cfg


def dump_config(cfg: RunConfig) -> dict:
    """Normalized configuration with every default filled in.

    A sweep payload stays as given, since it may be incomplete until the axis is set.
    """
    out = cfg.model_dump(mode="json")
    if cfg.sweep is None:
        out["payload"] = parse_payload(cfg.command, cfg.payload).model_dump(mode="json")
    return out
