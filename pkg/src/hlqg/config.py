"""Run configuration: an INI file with five sections, resolved into a RunConfig."""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

from .slpoly import Conventions


@dataclass(frozen=True)
class Symbolic:
    s: str = "1"  # exact rational used when a symbolic check is specialized
    specialize: bool = False
    n_random: int = 20
    seed: int = 0

    @property
    def s_value(self) -> Fraction | None:
        return Fraction(self.s) if self.specialize else None


@dataclass(frozen=True)
class Numeric:
    s: float = 1.0
    N: int = 16
    P: int = 8
    lam: float = 2.0
    c: complex = 1.0
    seed: int = 0


@dataclass(frozen=True)
class Quadrature:
    R: float = 0.0  # 0 means choose the radius from the tail bound
    n_r: int = 80
    n_theta: int = 64


@dataclass(frozen=True)
class Tolerances:
    exact: float = 1e-10
    truncation: float = 1e-3
    heat: float = 1e-3
    weyl: float = 1e-8
    shift: float = 1e-3
    sumt: float = 1e-6
    asa1: float = 1e-4
    kernel: float = 1e-4
    zcalc: float = 1e-10
    l2u: float = 1e-5


@dataclass(frozen=True)
class ConventionToggles:
    l_sign: int = -1
    r_sign: int = -1
    l_slot: str = "conj"
    r_slot: str = "conj"
    group_law_sign: int = 1

    def conventions(self) -> Conventions:
        return Conventions(self.l_sign, self.r_sign, self.l_slot, self.r_slot)


@dataclass(frozen=True)
class RunConfig:
    symbolic: Symbolic = field(default_factory=Symbolic)
    numeric: Numeric = field(default_factory=Numeric)
    quadrature: Quadrature = field(default_factory=Quadrature)
    tolerances: Tolerances = field(default_factory=Tolerances)
    conventions: ConventionToggles = field(default_factory=ConventionToggles)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["numeric"]["c"] = _cstr(self.numeric.c)
        return out

    def with_section(self, name: str, **kw) -> "RunConfig":
        return replace(self, **{name: replace(getattr(self, name), **kw)})


_TYPES = {
    "symbolic": Symbolic,
    "numeric": Numeric,
    "quadrature": Quadrature,
    "tolerances": Tolerances,
    "conventions": ConventionToggles,
}


class ConfigError(ValueError):
    pass


def _cstr(c: complex) -> str:
    c = complex(c)
    return str(c.real) if c.imag == 0 else str(c).strip("()")


def _convert(kind, raw: str, key: str):
    try:
        if kind is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is complex:
            return complex(raw.replace(" ", "").replace("i", "j"))
        if kind is str:
            if key == "s":
                Fraction(raw)  # validate
            return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    raise ConfigError(f"unsupported field type for {key}")


_PY_TYPES = {"int": int, "float": float, "str": str, "bool": bool, "complex": complex}


def _section(cls, items: dict, name: str):
    known = {f.name: f for f in fields(cls)}
    kw = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"unknown key [{name}] {key}")
        kind = _PY_TYPES[known[key].type]
        kw[key] = _convert(kind, raw, key)
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keep key case (N, P, R)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    kw = {}
    for name in cp.sections():
        if name not in _TYPES:
            raise ConfigError(f"unknown section [{name}]")
        kw[name] = _section(_TYPES[name], dict(cp[name]), name)
    cfg = RunConfig(**kw)
    try:
        cfg.conventions.conventions()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.conventions.group_law_sign not in (1, -1):
        raise ConfigError("group_law_sign must be +1 or -1")
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text())


def dump_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    for name, sect in cfg.as_dict().items():
        cp[name] = {k: str(v) for k, v in sect.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
