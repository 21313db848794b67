"""JSON run configuration.

A configuration has the top-level objects ``system``, ``sink``,
``reservoir`` and ``run`` (plus an optional free-text ``description``).
Keys are the field names of the corresponding specs; unknown keys are
rejected.  All frequencies are in units of omega0, times in 1/omega0.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, fields
from pathlib import Path

from .model import (RunConfig, SinkSpec, SpecError, StateIndex, SystemSpec, check_dimension,
                    validate_spec)
from .spectral import PseudomodeModel, SpectralDensity, SpectralError, extract_pseudomodes

SECTIONS = ("system", "sink", "reservoir", "run")
RESERVOIR_KEYS = {"lorentzian": {"kind", "omega_c", "gamma"}, "sum": {"kind", "terms"}}

RECIPES_DIR = Path(__file__).with_name("recipes")


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        self.source = source
        self.line = line
        self.message = message
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ReservoirSpec:
    """Lorentzian (``gamma = 0`` allowed as the lossless limit) or a sum."""

    kind: str = "lorentzian"
    omega_c: float = 1.02
    gamma: float = 0.1
    terms: tuple = ()

    def density(self) -> SpectralDensity:
        if self.kind == "lorentzian":
            return SpectralDensity.lorentzian(self.omega_c, self.gamma)
        return SpectralDensity.sum_of_lorentzians(self.terms)

    def pseudomodes(self) -> PseudomodeModel:
        if self.kind == "lorentzian" and self.gamma == 0:
            return PseudomodeModel.lossless(self.omega_c)
        return extract_pseudomodes(self.density())

    def to_dict(self) -> dict:
        if self.kind == "lorentzian":
            return {"kind": "lorentzian", "omega_c": self.omega_c, "gamma": self.gamma}
        return {"kind": "sum", "terms": [list(t) for t in self.terms]}


@dataclass(frozen=True)
class Config:
    system: SystemSpec
    sink: SinkSpec
    reservoir: ReservoirSpec
    run: RunConfig
    description: str = ""

    @property
    def index(self) -> StateIndex:
        return StateIndex.for_spec(self.system, self.reservoir.pseudomodes().n_modes)

    def to_dict(self) -> dict:
        sysd = {f.name: getattr(self.system, f.name) for f in fields(SystemSpec)}
        sysd["omega_big"] = list(sysd["omega_big"])
        return {
            "description": self.description,
            "system": sysd,
            "sink": {f.name: getattr(self.sink, f.name) for f in fields(SinkSpec)},
            "reservoir": self.reservoir.to_dict(),
            "run": {f.name: getattr(self.run, f.name) for f in fields(RunConfig)},
        }


def _locate(text: str | None, section: str, key: str | None = None) -> int | None:
    """1-based line of ``"key"`` inside ``"section"`` in the raw JSON text."""
    if not text:
        return None
    m = re.search(rf'"{re.escape(section)}"\s*:', text)
    if not m:
        return None
    pos = m.start()
    if key is not None:
        k = re.compile(rf'"{re.escape(key)}"\s*:').search(text, m.end())
        if k:
            pos = k.start()
    return text.count("\n", 0, pos) + 1


def _fields(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def _build(cls, section: str, data, text, source):
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object", source, _locate(text, section))
    unknown = sorted(set(data) - _fields(cls))
    if unknown:
        raise ConfigError(f"unknown key {section}.{unknown[0]}", source, _locate(text, section, unknown[0]))
    try:
        return cls(**data)
    except (TypeError, SpecError) as exc:
        raise ConfigError(f"invalid {section}: {exc}", source, _locate(text, section)) from None


def config_from_dict(raw: dict, text: str | None = None, source: str = "<config>") -> Config:
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", source, 1)
    unknown = sorted(set(raw) - set(SECTIONS) - {"description"})
    if unknown:
        raise ConfigError(f"unknown top-level key {unknown[0]!r}", source, _locate(text, unknown[0]))
    missing = [s for s in ("system", "reservoir", "run") if s not in raw]
    if missing:
        raise ConfigError(f"missing section {missing[0]!r}", source, 1)

    system = _build(SystemSpec, "system", raw["system"], text, source)
    sink = _build(SinkSpec, "sink", raw.get("sink", {}), text, source)
    run = _build(RunConfig, "run", raw["run"], text, source)

    res = raw["reservoir"]
    if not isinstance(res, dict) or res.get("kind") not in RESERVOIR_KEYS:
        raise ConfigError('reservoir.kind must be "lorentzian" or "sum"', source,
                          _locate(text, "reservoir", "kind"))
    allowed = RESERVOIR_KEYS[res["kind"]]
    extra = sorted(set(res) - allowed)
    if extra:
        raise ConfigError(f"unknown key reservoir.{extra[0]}", source, _locate(text, "reservoir", extra[0]))
    lacking = sorted(allowed - set(res))
    if lacking:
        raise ConfigError(f"missing key reservoir.{lacking[0]}", source, _locate(text, "reservoir"))
    if res["kind"] == "lorentzian":
        reservoir = ReservoirSpec("lorentzian", float(res["omega_c"]), float(res["gamma"]))
        if reservoir.gamma < 0:
            raise ConfigError("reservoir.gamma must be >= 0", source, _locate(text, "reservoir", "gamma"))
    else:
        reservoir = ReservoirSpec("sum", terms=tuple(tuple(float(x) for x in t) for t in res["terms"]))

    report = validate_spec(system, sink)
    if report:
        key = {"r_index out of range": "r_index", "omega_big length mismatch": "omega_big",
               "attach_site out of range": "attach_site"}.get(report[0])
        sec = "sink" if key == "attach_site" else "system"
        raise ConfigError("; ".join(report), source, _locate(text, sec, key))
    if run.initial_site < 1 or run.initial_site > system.chain_len:
        raise ConfigError("run.initial_site out of range", source, _locate(text, "run", "initial_site"))
    try:
        pm = reservoir.pseudomodes()
    except (SpectralError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid reservoir: {exc}", source, _locate(text, "reservoir")) from None
    try:
        check_dimension(StateIndex.for_spec(system, pm.n_modes).dim)
    except SpecError as exc:
        raise ConfigError(str(exc), source, _locate(text, "system", "n_chains")) from None
    return Config(system, sink, reservoir, run, str(raw.get("description", "")))


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``section.key=value`` assignments (values parsed as JSON)."""
    raw = copy.deepcopy(raw)
    for item in overrides or ():
        path, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value", "--set")
        set_path(raw, path.strip(), parse_value(value.strip()))
    return raw


def set_path(raw: dict, path: str, value) -> None:
    parts = path.split(".")
    if len(parts) != 2 or parts[0] not in SECTIONS:
        raise ConfigError(f"cannot resolve parameter path {path!r}; use section.key", "--set")
    raw.setdefault(parts[0], {})[parts[1]] = value


def resolve_path(name: str | Path) -> Path:
    """A file path, or the name of a shipped recipe such as ``fig3``."""
    p = Path(name)
    if p.exists():
        return p
    recipe = RECIPES_DIR / (p.name if p.suffix == ".json" else p.name + ".json")
    if recipe.exists():
        return recipe
    return p


def read_raw(path) -> tuple[dict, str, str]:
    path = resolve_path(path)
    source = str(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON parse error: {exc.msg} (column {exc.colno})", source, exc.lineno) from None
    return raw, text, source


def load_config(path, overrides=()) -> Config:
    raw, text, source = read_raw(path)
    raw = apply_overrides(raw, overrides)
    return config_from_dict(raw, text, source)
