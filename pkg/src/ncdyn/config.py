"""Strict INI-style scenario configuration.

A scenario file has a ``[scenario]`` section naming the ``kind`` and one
section named after that kind holding its parameters::

    [scenario]
    kind = kinetic
    seed = 7

    [kinetic]
    band_width = 20
    coupling_sq = 0.1

Unknown sections and keys are rejected; every value is type-checked and
range-checked. Omitted parameters take the documented defaults.
"""
from __future__ import annotations

import configparser
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

KINDS = ("classical", "kinetic", "markovian", "oracle", "compare", "algebra")
SEED_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Invalid scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Param:
    type: type
    default: Any
    check: Optional[Callable[[Any], bool]] = None
    rule: str = ""
    choices: tuple = ()


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _finite(x):
    return math.isfinite(x)


POS = dict(check=_pos, rule="> 0")
NONNEG = dict(check=_nonneg, rule=">= 0")

_BAND = {
    "omega0": Param(float, 1.0),
    "band_center": Param(float, 1.0),
    "band_width": Param(float, 20.0, **POS),
    "coupling_sq": Param(float, 0.1, **NONNEG),
    "n_modes": Param(int, 200, check=lambda x: x >= 1, rule=">= 1"),
    "occupation": Param(float, 0.2, **NONNEG),
    "profile": Param(str, "flat", choices=("flat", "bose")),
    "temperature": Param(float, 1.0, **POS),
    "n0": Param(float, 1.0, **NONNEG),
}

SCHEMA: dict[str, dict[str, Param]] = {
    "classical": {
        "system": Param(str, "damped_oscillator", choices=("damped_oscillator", "harmonic", "free_particle")),
        "mass": Param(float, 1.0, **POS),
        "stiffness": Param(float, 1.0, **NONNEG),
        "damping": Param(float, 0.2, **NONNEG),
        "q1": Param(float, 1.0),
        "v1": Param(float, 0.0),
        "q2": Param(float, 1.0),
        "v2": Param(float, 0.0),
        "t_initial": Param(float, 0.0),
        "t_final": Param(float, 1.0),
        "dt": Param(float, 1e-3, **POS),
        "picture": Param(str, "lagrangian", choices=("lagrangian", "hamiltonian")),
        "bound": Param(float, 1e8, **POS),
    },
    "kinetic": {
        **_BAND,
        "t_i": Param(float, 0.0),
        "t_final": Param(float, 100.0, **POS),
        "dt": Param(float, 1e-2, **POS),
        "fit_t_min": Param(float, None),
        "fit_t_max": Param(float, None),
    },
    "markovian": {
        "n0": Param(float, 1.0, **NONNEG),
        "n_eq": Param(float, 0.2, **NONNEG),
        "kappa": Param(float, 0.05, **POS),
        "t_final": Param(float, 50.0, **POS),
        "dt": Param(float, 1e-2, **POS),
    },
    "oracle": {
        **_BAND,
        "n_modes": Param(int, 60, check=lambda x: x >= 2, rule=">= 2"),
        "t_final": Param(float, 9.0, **POS),
        "dt": Param(float, 1e-2, **POS),
    },
    "compare": {
        **_BAND,
        "n_modes": Param(int, 60, check=lambda x: x >= 2, rule=">= 2"),
        "t_final": Param(float, None),
        "dt": Param(float, 5e-3, **POS),
        "t_min": Param(float, 0.0, **NONNEG),
    },
    "algebra": {
        "n_max": Param(int, 40, check=lambda x: 1 <= x <= 80, rule="in [1, 80]"),
        "omega": Param(float, 1.0),
        "n": Param(float, 0.5, **NONNEG),
        "ndot": Param(float, 0.3),
        "gamma": Param(float, 0.0),
        "sweeps": Param(int, 20, check=_nonneg, rule=">= 0"),
        "word_length": Param(int, 4, check=lambda x: 1 <= x <= 8, rule="in [1, 8]"),
    },
}


@dataclass
class ScenarioConfig:
    kind: str
    params: dict[str, Any]
    seed: int = 0
    output: Optional[str] = None
    source: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Parameters as written to ``report.json``; :func:`from_echo` inverts this."""
        return {"kind": self.kind, "seed": self.seed, self.kind: dict(self.params)}


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if key is not None and current == section:
            k = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if k == key:
                return i
    return None


def _coerce(kind: str, key: str, raw: Any, p: Param, line=None):
    if p.type is str:
        val = str(raw).strip()
        if p.choices and val not in p.choices:
            raise ConfigError(f"[{kind}] {key} must be one of {', '.join(p.choices)}; got {val!r}", line, key)
        return val
    if p.type is int:
        if isinstance(raw, bool):
            raise ConfigError(f"[{kind}] {key} must be an integer", line, key)
        try:
            val = int(str(raw).strip(), 10) if isinstance(raw, str) else int(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"[{kind}] {key} must be an integer; got {raw!r}", line, key) from None
        if isinstance(raw, float) and raw != val:
            raise ConfigError(f"[{kind}] {key} must be an integer; got {raw!r}", line, key)
    else:
        try:
            val = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"[{kind}] {key} must be a number; got {raw!r}", line, key) from None
        if not math.isfinite(val):
            raise ConfigError(f"[{kind}] {key} must be finite", line, key)
    if p.check is not None and not p.check(val):
        raise ConfigError(f"[{kind}] {key} must be {p.rule}; got {val!r}", line, key)
    return val


def _resolve(kind: str, given: dict[str, Any], line_of=lambda key: None) -> dict[str, Any]:
    schema = SCHEMA[kind]
    for key in given:
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} in [{kind}]", line_of(key), key)
    params = {}
    for key, p in schema.items():
        if key in given and given[key] is not None:
            params[key] = _coerce(kind, key, given[key], p, line_of(key))
        else:
            params[key] = p.default
    _cross_checks(kind, params)
    return params


def _cross_checks(kind: str, p: dict):
    if kind == "classical":
        if p["t_final"] <= p["t_initial"]:
            raise ConfigError("[classical] t_final must exceed t_initial", key="t_final")
        if p["system"] == "damped_oscillator" and p["damping"] ** 2 >= 4 * p["mass"] * p["stiffness"]:
            raise ConfigError("[classical] damped_oscillator must be underdamped (c^2 < 4 m k)", key="damping")
    if kind == "kinetic":
        if p["t_final"] <= p["t_i"]:
            raise ConfigError("[kinetic] t_final must exceed t_i", key="t_final")
        lo, hi = p["fit_t_min"], p["fit_t_max"]
        if lo is not None and hi is not None and hi <= lo:
            raise ConfigError("[kinetic] fit_t_max must exceed fit_t_min", key="fit_t_max")
    if kind == "compare" and p["t_final"] is not None and p["t_final"] <= 0:
        raise ConfigError("[compare] t_final must be > 0", key="t_final")


def _check_seed(seed: Any, line=None) -> int:
    try:
        val = int(str(seed).strip(), 10)
    except ValueError:
        raise ConfigError(f"seed must be an unsigned 64-bit integer; got {seed!r}", line, "seed") from None
    if not 0 <= val <= SEED_MAX:
        raise ConfigError(f"seed must be in [0, 2^64 - 1]; got {val}", line, "seed")
    return val


def parse_text(text: str, source: Optional[str] = None) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, strict=True, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source or "<string>")
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed configuration: {exc.message if hasattr(exc, 'message') else exc}", line) from None

    if not cp.has_section("scenario"):
        raise ConfigError("missing [scenario] section")
    head = dict(cp.items("scenario"))
    for key in head:
        if key not in ("kind", "seed", "output"):
            raise ConfigError(f"unknown key {key!r} in [scenario]", _line_of(text, "scenario", key), key)
    kind = head.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigError(
            f"[scenario] kind must be one of {', '.join(KINDS)}; got {kind!r}",
            _line_of(text, "scenario", "kind"),
            "kind",
        )
    for sec in cp.sections():
        if sec not in ("scenario", kind):
            raise ConfigError(f"unexpected section [{sec}] for kind {kind!r}", _line_of(text, sec), sec)
    seed = _check_seed(head.get("seed", "0"), _line_of(text, "scenario", "seed"))
    given = dict(cp.items(kind)) if cp.has_section(kind) else {}
    params = _resolve(kind, given, lambda key: _line_of(text, kind, key))
    return ScenarioConfig(kind, params, seed, head.get("output"), source)


def load(path) -> ScenarioConfig:
    """Load a ``.cfg`` scenario, or a ``report.json`` whose echoed parameters re-create a run."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    if path.suffix == ".json":
        try:
            blob = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return from_echo(blob.get("parameters", blob), source=str(path))
    return parse_text(text, source=str(path))


def from_echo(blob: dict, source: Optional[str] = None) -> ScenarioConfig:
    kind = blob.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"echoed parameters name unknown kind {kind!r}")
    unknown = set(blob) - {"kind", "seed", kind}
    if unknown:
        raise ConfigError(f"unknown keys in echoed parameters: {sorted(unknown)}")
    seed = _check_seed(blob.get("seed", 0))
    return ScenarioConfig(kind, _resolve(kind, blob.get(kind, {})), seed, None, source)
