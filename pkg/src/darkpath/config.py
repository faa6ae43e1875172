"""Run configuration: strict parsing of JSON/YAML config files.

A config file is a mapping of sections; every key has a default, so the empty
file (or no file at all) is a valid configuration.  Unknown sections or keys
raise :class:`ConfigError` before any output is written, which the CLI maps
to exit code 2.

Sections and defaults::

    protocol:                 # what to run
      kind: qst               # qst | pair_esg | all_esg
      n_qubits: 3
      source: 1
      target: 3               # ignored by all_esg
      amplitude: null         # null -> use the minimal-time optimum
      duration: null          # null -> minimal time for the coupling cap
      g_max: 1.0              # coupling cap, dimensionless mode only
      theta: null             # override the protocol's rotation angle
    run:
      mode: dimensionless     # dimensionless | transmon
      model: effective        # effective | full (transmon mode only)
      steps: null             # integrator steps; null -> per-mode default
      jobs: 1                 # parallel workers for scans and sweeps
    noise:                    # dimensionless mode only; rates in units of g_max
      uniform: null           # shorthand: same rate on all four channels
      decay_qubit: 0.0
      dephase_qubit: 0.0
      decay_bus: 0.0
      dephase_bus: 0.0
    error:
      epsilon: 0.0            # relative amplitude miscalibration
      delta: 0.0              # static qubit-level shift, units of g_max
    transmon:
      omega_mhz: 17.0
      detuning_mhz: 800.0
      modulation_mhz: null    # null -> resonant with the detuning
      gamma_khz: 5.0
      target_coupling_mhz: null   # null -> the drive's invertible maximum
      saturate: false         # clip an over-cap request instead of raising
    optimize:
      kinds: [qst, pair_esg, all_esg]
      a_min: 0.3
      a_max: 1.2
      count: 41
    scan:
      kind: x_error           # x_error | z_error | decoherence
      a_min: 0.3
      a_max: 1.2
      a_count: 41
      x_min: null             # null -> per-kind default range
      x_max: null
      x_count: 41
      mode: uniform           # decoherence only: uniform | bus-fixed
    sweep:
      n_min: 3
      n_max: 10
      physical: true
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import transmon
from .model import NoiseModel
from .pulse_design import ProtocolKind


class ConfigError(ValueError):
    """A config file failed validation; nothing has been written."""


_PROTOCOL_KINDS = tuple(k.value for k in ProtocolKind)


def _reject_unknown(section: str, data: dict, known: tuple[str, ...]):
    for key in data:
        if key not in known:
            raise ConfigError(
                f"unknown key {key!r} in section {section!r} "
                f"(known keys: {', '.join(known)})"
            )


def _build(cls, section: str, data):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    names = tuple(f.name for f in dataclasses.fields(cls))
    _reject_unknown(section, data, names)
    try:
        return cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section {section!r}: {exc}") from exc


def _require_number(section: str, name: str, value, allow_none=False):
    if value is None:
        if allow_none:
            return None
        raise ConfigError(f"{section}.{name} must be a number")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{name} must be finite")
    return float(value)


def _require_int(section: str, name: str, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{name} must be >= {minimum}")
    return value


def _require_choice(section: str, name: str, value, choices):
    if value not in choices:
        raise ConfigError(
            f"{section}.{name} must be one of {', '.join(choices)}, got {value!r}"
        )
    return value


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str = "qst"
    n_qubits: int = 3
    source: int = 1
    target: int = 3
    amplitude: float | None = None
    duration: float | None = None
    g_max: float = 1.0
    theta: float | None = None

    def __post_init__(self):
        _require_choice("protocol", "kind", self.kind, _PROTOCOL_KINDS)
        _require_int("protocol", "n_qubits", self.n_qubits, minimum=2)
        _require_int("protocol", "source", self.source, minimum=1)
        _require_int("protocol", "target", self.target, minimum=1)
        for name in ("amplitude", "duration", "theta"):
            object.__setattr__(
                self,
                name,
                _require_number("protocol", name, getattr(self, name), allow_none=True),
            )
        object.__setattr__(
            self, "g_max", _require_number("protocol", "g_max", self.g_max)
        )
        if self.g_max <= 0.0:
            raise ConfigError("protocol.g_max must be > 0")


@dataclass(frozen=True)
class RunOptions:
    mode: str = "dimensionless"
    model: str = "effective"
    steps: int | None = None
    jobs: int = 1

    def __post_init__(self):
        _require_choice("run", "mode", self.mode, ("dimensionless", "transmon"))
        _require_choice("run", "model", self.model, ("effective", "full"))
        if self.steps is not None:
            _require_int("run", "steps", self.steps, minimum=100)
        if not isinstance(self.jobs, int) or isinstance(self.jobs, bool):
            raise ConfigError("run.jobs must be an integer")
        if self.jobs == 0:
            raise ConfigError("run.jobs must be nonzero (-1 means all cores)")


@dataclass(frozen=True)
class NoiseConfig:
    uniform: float | None = None
    decay_qubit: float = 0.0
    dephase_qubit: float = 0.0
    decay_bus: float = 0.0
    dephase_bus: float = 0.0

    def __post_init__(self):
        channels = ("decay_qubit", "dephase_qubit", "decay_bus", "dephase_bus")
        for name in channels:
            value = _require_number("noise", name, getattr(self, name))
            if value < 0.0:
                raise ConfigError(f"noise.{name} must be >= 0")
            object.__setattr__(self, name, value)
        if self.uniform is not None:
            rate = _require_number("noise", "uniform", self.uniform)
            if rate < 0.0:
                raise ConfigError("noise.uniform must be >= 0")
            if any(getattr(self, name) != 0.0 for name in channels):
                raise ConfigError(
                    "noise.uniform excludes the per-channel rate keys"
                )
            object.__setattr__(self, "uniform", rate)

    def to_noise_model(self) -> NoiseModel:
        if self.uniform is not None:
            return NoiseModel.uniform(self.uniform)
        return NoiseModel(
            decay_qubit=self.decay_qubit,
            dephase_qubit=self.dephase_qubit,
            decay_bus=self.decay_bus,
            dephase_bus=self.dephase_bus,
        )


@dataclass(frozen=True)
class ErrorConfig:
    epsilon: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "epsilon", _require_number("error", "epsilon", self.epsilon)
        )
        object.__setattr__(
            self, "delta", _require_number("error", "delta", self.delta)
        )


@dataclass(frozen=True)
class TransmonConfig:
    omega_mhz: float = 17.0
    detuning_mhz: float = 800.0
    modulation_mhz: float | None = None
    gamma_khz: float = 5.0
    target_coupling_mhz: float | None = None
    saturate: bool = False

    def __post_init__(self):
        for name in ("omega_mhz", "detuning_mhz", "gamma_khz"):
            object.__setattr__(
                self, name, _require_number("transmon", name, getattr(self, name))
            )
        for name in ("modulation_mhz", "target_coupling_mhz"):
            object.__setattr__(
                self,
                name,
                _require_number("transmon", name, getattr(self, name), allow_none=True),
            )
        if not isinstance(self.saturate, bool):
            raise ConfigError("transmon.saturate must be a boolean")

    def to_params(self) -> transmon.TransmonParams:
        return transmon.TransmonParams.from_mhz(
            omega_mhz=self.omega_mhz,
            detuning_mhz=self.detuning_mhz,
            modulation_mhz=self.modulation_mhz,
            gamma_khz=self.gamma_khz,
        )

    def coupling_cap(self, params: transmon.TransmonParams) -> float:
        """Coupling cap in rad/ns: the configured target or the drive maximum."""
        if self.target_coupling_mhz is None:
            return params.feasible_coupling
        cap = 2.0 * math.pi * self.target_coupling_mhz * 1e-3
        if cap <= 0.0:
            raise ConfigError("transmon.target_coupling_mhz must be > 0")
        return cap


@dataclass(frozen=True)
class OptimizeConfig:
    kinds: tuple[str, ...] = _PROTOCOL_KINDS
    a_min: float = 0.3
    a_max: float = 1.2
    count: int = 41

    def __post_init__(self):
        kinds = self.kinds
        if isinstance(kinds, str):
            kinds = (kinds,)
        if not isinstance(kinds, (list, tuple)) or not kinds:
            raise ConfigError("optimize.kinds must be a non-empty list")
        for kind in kinds:
            _require_choice("optimize", "kinds", kind, _PROTOCOL_KINDS)
        if len(set(kinds)) != len(kinds):
            raise ConfigError("optimize.kinds must not repeat")
        object.__setattr__(self, "kinds", tuple(kinds))
        object.__setattr__(self, "a_min", _require_number("optimize", "a_min", self.a_min))
        object.__setattr__(self, "a_max", _require_number("optimize", "a_max", self.a_max))
        if not 0.0 < self.a_min < self.a_max:
            raise ConfigError("optimize needs 0 < a_min < a_max")
        _require_int("optimize", "count", self.count, minimum=2)


_SCAN_KINDS = ("x_error", "z_error", "decoherence")


@dataclass(frozen=True)
class ScanConfig:
    kind: str = "x_error"
    a_min: float = 0.3
    a_max: float = 1.2
    a_count: int = 41
    x_min: float | None = None
    x_max: float | None = None
    x_count: int = 41
    mode: str = "uniform"

    def __post_init__(self):
        _require_choice("scan", "kind", self.kind, _SCAN_KINDS)
        _require_choice("scan", "mode", self.mode, ("uniform", "bus-fixed"))
        object.__setattr__(self, "a_min", _require_number("scan", "a_min", self.a_min))
        object.__setattr__(self, "a_max", _require_number("scan", "a_max", self.a_max))
        if not 0.0 < self.a_min <= self.a_max:
            raise ConfigError("scan needs 0 < a_min <= a_max")
        _require_int("scan", "a_count", self.a_count, minimum=1)
        _require_int("scan", "x_count", self.x_count, minimum=1)
        for name in ("x_min", "x_max"):
            object.__setattr__(
                self, name, _require_number("scan", name, getattr(self, name), allow_none=True)
            )
        if (self.x_min is None) != (self.x_max is None):
            raise ConfigError("scan.x_min and scan.x_max must be set together")
        if self.x_min is not None and self.x_min > self.x_max:
            raise ConfigError("scan needs x_min <= x_max")

    def x_range(self, g_max: float) -> tuple[float, float]:
        """The swept range, defaulted per scan kind when not configured."""
        if self.x_min is not None:
            return self.x_min, self.x_max
        if self.kind == "x_error":
            return -0.1, 0.1
        if self.kind == "z_error":
            return -0.1 * g_max, 0.1 * g_max
        return 0.0, 1e-3 * g_max


@dataclass(frozen=True)
class SweepConfig:
    n_min: int = 3
    n_max: int = 10
    physical: bool = True

    def __post_init__(self):
        _require_int("sweep", "n_min", self.n_min, minimum=3)
        _require_int("sweep", "n_max", self.n_max, minimum=self.n_min)
        if not isinstance(self.physical, bool):
            raise ConfigError("sweep.physical must be a boolean")


@dataclass(frozen=True)
class RunConfig:
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    run: RunOptions = field(default_factory=RunOptions)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    error: ErrorConfig = field(default_factory=ErrorConfig)
    transmon: TransmonConfig = field(default_factory=TransmonConfig)
    optimize: OptimizeConfig = field(default_factory=OptimizeConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    @classmethod
    def from_dict(cls, data: dict | None) -> "RunConfig":
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping of sections")
        sections = {
            "protocol": ProtocolConfig,
            "run": RunOptions,
            "noise": NoiseConfig,
            "error": ErrorConfig,
            "transmon": TransmonConfig,
            "optimize": OptimizeConfig,
            "scan": ScanConfig,
            "sweep": SweepConfig,
        }
        _reject_unknown("<root>", data, tuple(sections))
        built = {
            name: _build(section_cls, name, data.get(name))
            for name, section_cls in sections.items()
        }
        return cls(**built)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
        suffix = path.suffix.lower()
        if suffix == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        elif suffix in (".yaml", ".yml"):
            try:
                data = yaml.safe_load(text)
            except yaml.YAMLError as exc:
                raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
        else:
            raise ConfigError(
                f"config file must end in .json, .yaml, or .yml, got {path.name!r}"
            )
        return cls.from_dict(data)

    def resolved(self) -> dict:
        """All sections with defaults filled in, for metadata sidecars."""
        out = dataclasses.asdict(self)
        out["optimize"]["kinds"] = list(out["optimize"]["kinds"])
        return out
