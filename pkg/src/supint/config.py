"""Run configuration: a single JSON document validated at load time."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .core import PhasePoint, SystemParams
from .dynamics import SCHEMES
from .errors import ValidationError

__all__ = [
    "ConfigError",
    "SystemConfig",
    "StateConfig",
    "IntegratorConfig",
    "VerificationConfig",
    "GeometryConfig",
    "OutputConfig",
    "RunConfig",
    "load_config",
    "parse_config",
    "dump_config",
]


class ConfigError(ValidationError):
    pass


@dataclass
class SystemConfig:
    n: int = 2
    kappa: float = 1.0
    omega_sq: float = 1.0
    b: list[float] = field(default_factory=lambda: [1.0, 1.0])


@dataclass
class StateConfig:
    q: list[float] = field(default_factory=lambda: [1.0, 1.0])
    p: list[float] = field(default_factory=lambda: [1.0, -1.0])


@dataclass
class IntegratorConfig:
    scheme: str = "implicit-midpoint"
    step: float = 1e-3
    t_final: float = 10.0


@dataclass
class VerificationConfig:
    seed: int = 42
    samples: int = 100
    rank_states: int = 20
    bracket_tol: float = 1e-9
    rank_tol: float = 1e-8
    identity_tol: float = 1e-12
    drift_tol: float = 1e-8
    closed_form_tol: float = 1e-6
    # test hook: name of an integral (e.g. "I_1") to corrupt by adding q_1
    corrupt_integral: str | None = None


@dataclass
class GeometryConfig:
    radii: list[float] = field(default_factory=lambda: [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
    K: float = 1.0


@dataclass
class OutputConfig:
    directory: str = "."
    trajectory_csv: str = "trajectory.csv"
    drift_json: str = "drift_report.json"
    verify_json: str = "verify_report.json"
    closed_form_csv: str = "closed_form.csv"
    comparison_json: str = "closed_form_comparison.json"
    geometry_json: str = "geometry.json"


@dataclass
class RunConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    initial_state: StateConfig = field(default_factory=StateConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def params(self) -> SystemParams:
        s = self.system
        return SystemParams(s.n, s.kappa, s.omega_sq, tuple(s.b))

    def state(self) -> PhasePoint:
        return PhasePoint(self.initial_state.q, self.initial_state.p)

    def to_dict(self) -> dict:
        return asdict(self)


_SECTION_TYPES = {
    "system": SystemConfig,
    "initial_state": StateConfig,
    "integrator": IntegratorConfig,
    "verification": VerificationConfig,
    "geometry": GeometryConfig,
    "outputs": OutputConfig,
}


class _Locator:
    """Maps dotted key paths to 1-based line numbers in the source text."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def line(self, path: str) -> int | None:
        pos = 0
        for key in path.split("."):
            found = self.text.find(f'"{key}"', pos)
            if found < 0:
                return None
            pos = found
        return self.text.count("\n", 0, pos) + 1

    def error(self, path: str, message: str) -> ConfigError:
        line = self.line(path)
        where = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{where}: {path}: {message}")


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(value: Any, default: Any, path: str, loc: _Locator) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise loc.error(path, f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if not (isinstance(value, int) and not isinstance(value, bool)):
            raise loc.error(path, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if not _is_number(value):
            raise loc.error(path, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, list):
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            raise loc.error(path, f"expected a list of numbers, got {value!r}")
        return [float(v) for v in value]
    if isinstance(default, str) or default is None:
        if value is not None and not isinstance(value, str):
            raise loc.error(path, f"expected a string, got {value!r}")
        return value
    raise loc.error(path, "unsupported value")


def _build_section(name: str, raw: Any, loc: _Locator):
    cls = _SECTION_TYPES[name]
    if not isinstance(raw, dict):
        raise loc.error(name, "expected an object")
    defaults = cls()
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise loc.error(f"{name}.{key}", f"unknown key (expected one of {sorted(known)})")
    values = {}
    for f in fields(cls):
        default = getattr(defaults, f.name)
        if f.name in raw:
            values[f.name] = _coerce(raw[f.name], default, f"{name}.{f.name}", loc)
        else:
            values[f.name] = default
    return cls(**values)


def _validate(cfg: RunConfig, loc: _Locator) -> None:
    sy = cfg.system
    if sy.n < 1:
        raise loc.error("system.n", f"n must be >= 1, got {sy.n}")
    if not sy.kappa > 0:
        raise loc.error("system.kappa", f"kappa must be > 0, got {sy.kappa}")
    if not sy.omega_sq >= 0:
        raise loc.error("system.omega_sq", f"omega_sq must be >= 0, got {sy.omega_sq}")
    if len(sy.b) != sy.n:
        raise loc.error("system.b", f"b must have length n={sy.n}, got {len(sy.b)}")
    if any(not v >= 0 for v in sy.b):
        raise loc.error("system.b", f"every b_j must be >= 0, got {sy.b}")
    try:
        params = cfg.params()
    except ValidationError as exc:
        raise loc.error("system", str(exc)) from None
    st = cfg.initial_state
    if len(st.q) != params.n or len(st.p) != params.n:
        raise loc.error("initial_state.q", f"q and p must have length n={params.n}")
    try:
        cfg.state().validate(params)
    except ValidationError as exc:
        raise loc.error("initial_state.q", str(exc)) from None
    it = cfg.integrator
    if it.scheme not in SCHEMES:
        raise loc.error("integrator.scheme", f"must be one of {list(SCHEMES)}")
    if not it.step > 0:
        raise loc.error("integrator.step", f"must be > 0, got {it.step}")
    if not it.t_final >= 0:
        raise loc.error("integrator.t_final", f"must be >= 0, got {it.t_final}")
    ver = cfg.verification
    if ver.seed < 0 or ver.seed >= 2**64:
        raise loc.error("verification.seed", "must be an unsigned 64-bit integer")
    if ver.samples < 1 or ver.rank_states < 1:
        raise loc.error("verification.samples", "sample counts must be >= 1")
    for name in ("bracket_tol", "rank_tol", "identity_tol", "drift_tol", "closed_form_tol"):
        if not getattr(ver, name) > 0:
            raise loc.error(f"verification.{name}", "must be > 0")
    if any(r < 0 for r in cfg.geometry.radii):
        raise loc.error("geometry.radii", "radii must be >= 0")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a JSON configuration document."""
    loc = _Locator(text, source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}:1: top level must be an object")
    for key in raw:
        if key not in _SECTION_TYPES:
            raise loc.error(key, f"unknown section (expected one of {sorted(_SECTION_TYPES)})")
    sections = {name: _build_section(name, raw[name], loc) for name in _SECTION_TYPES if name in raw}
    cfg = RunConfig(**sections)
    _validate(cfg, loc)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path))


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"
