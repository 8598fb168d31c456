"""Flat ``section.key=value`` run configuration: parsing, validation and serialization."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .lattice_oracle import ConfigInvalid, LatticeConfig
from .model import FIELDS, ModelParams, ModelValidationError

__all__ = [
    "ConfigError",
    "ConfigSyntaxError",
    "InvariantViolation",
    "RunConfig",
    "TypeMismatch",
    "UnknownKey",
    "parse_config",
    "serialize",
]


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(key)
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{' at '.join(where)}: {message}" if where else message)


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class InvariantViolation(ConfigError):
    pass


_LATTICE_TYPES = {
    "n_sites": int,
    "dx": float,
    "smear_sigma": float,
    "dt": float,
    "t_final": float,
    "window": "pair",
    "sample_dt": float,
    "profile_times": int,
    "profile_span": float,
    "plateau_tol": float,
}
_OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    lattice: LatticeConfig | None = None
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] = ()
    output_format: str = "csv"
    output_path: str | None = None
    output_series: str | None = None
    quad_tol: float = 1e-10
    fit_rms: float = 0.15


def _float(key, text, line):
    try:
        return float(text)
    except ValueError:
        raise TypeMismatch(f"{text!r} is not a number", key, line) from None


def _int(key, text, line):
    try:
        return int(text)
    except ValueError:
        raise TypeMismatch(f"{text!r} is not an integer", key, line) from None


def _floats(key, text, line):
    parts = [t.strip() for t in text.split(",") if t.strip()]
    if not parts:
        raise TypeMismatch("empty list", key, line)
    return tuple(_float(key, t, line) for t in parts)


def _opt(text):
    return None if text.lower() in ("none", "") else text


def parse_config(text: str) -> RunConfig:
    """Parse and validate; every error names the offending key and line."""
    model: dict = {}
    model_lines: dict = {}
    lattice: dict = {}
    lattice_lines: list[int] = []
    top: dict = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigSyntaxError(f"expected section.key=value, got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if "." not in key:
            raise ConfigSyntaxError(f"key {key!r} lacks a section prefix", key, lineno)
        if key in seen:
            raise ConfigSyntaxError(f"duplicate key (first on line {seen[key]})", key, lineno)
        seen[key] = lineno
        section, name = key.split(".", 1)
        if section == "model":
            if name not in FIELDS:
                raise UnknownKey("unknown key", key, lineno)
            v = _opt(value) if name == "lambda_th" else value
            model[name] = None if v is None else _float(key, v, lineno)
            model_lines[name] = lineno
        elif section == "lattice":
            kind = _LATTICE_TYPES.get(name)
            if kind is None:
                raise UnknownKey("unknown key", key, lineno)
            if kind == "pair":
                pair = _floats(key, value, lineno)
                if len(pair) != 2:
                    raise TypeMismatch("window needs two numbers t_lo,t_hi", key, lineno)
                lattice[name] = pair
            elif name == "smear_sigma":
                v = _opt(value)
                lattice[name] = None if v is None else _float(key, v, lineno)
            else:
                lattice[name] = (_int if kind is int else _float)(key, value, lineno)
            lattice_lines.append(lineno)
        elif key == "sweep.axis":
            if value not in FIELDS:
                raise InvariantViolation(f"sweep axis {value!r} is not a model parameter", key, lineno)
            top["sweep_axis"] = value
        elif key == "sweep.values":
            top["sweep_values"] = _floats(key, value, lineno)
        elif key == "output.format":
            if value not in _OUTPUT_FORMATS:
                raise TypeMismatch(f"format must be one of {_OUTPUT_FORMATS}", key, lineno)
            top["output_format"] = value
        elif key == "output.path":
            top["output_path"] = _opt(value)
        elif key == "output.series":
            top["output_series"] = _opt(value)
        elif key == "tolerances.quad_tol":
            top["quad_tol"] = _float(key, value, lineno)
        elif key == "tolerances.fit_rms":
            top["fit_rms"] = _float(key, value, lineno)
        else:
            raise UnknownKey("unknown key", key, lineno)

    try:
        params = ModelParams(**model)
    except ModelValidationError as exc:
        v = exc.violations[0]
        raise InvariantViolation(str(exc), f"model.{v.field}", model_lines.get(v.field)) from exc
    lat = None
    if lattice:
        try:
            lat = LatticeConfig(**lattice)
        except ConfigInvalid as exc:
            raise InvariantViolation(str(exc), "lattice", min(lattice_lines)) from exc
    if ("sweep_axis" in top) != ("sweep_values" in top):
        raise InvariantViolation("sweep.axis and sweep.values must be given together", "sweep")
    return RunConfig(model=params, lattice=lat, **top)


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config` (floats are written with ``repr`` so they round-trip)."""
    lines = [f"model.{k}={_fmt(getattr(cfg.model, k))}" for k in FIELDS]
    if cfg.lattice is not None:
        lines += [f"lattice.{f.name}={_fmt(getattr(cfg.lattice, f.name))}" for f in fields(LatticeConfig)]
    if cfg.sweep_axis is not None:
        lines.append(f"sweep.axis={cfg.sweep_axis}")
        lines.append(f"sweep.values={_fmt(cfg.sweep_values)}")
    lines.append(f"output.format={cfg.output_format}")
    if cfg.output_path is not None:
        lines.append(f"output.path={cfg.output_path}")
    if cfg.output_series is not None:
        lines.append(f"output.series={cfg.output_series}")
    lines.append(f"tolerances.quad_tol={_fmt(cfg.quad_tol)}")
    lines.append(f"tolerances.fit_rms={_fmt(cfg.fit_rms)}")
    return "\n".join(lines) + "\n"
