"""Run configuration: a flat ``key = value`` text file, overridable from the
command line, with named presets for the coupling-threshold scenarios."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .core import DEFAULT_A_SPLIT, DEFAULT_BETA, ValidationError

FORMATS = ("json", "csv", "text")


@dataclass
class RunConfig:
    alpha: float = DEFAULT_BETA
    # a number, or "e0" for the ground-state binding energy of the potential
    lambda_cut: str = "1"
    a_split: float = DEFAULT_A_SPLIT
    beta: float = DEFAULT_BETA
    z_charge: float = 1.0
    # None: 60 Bohr radii of the Coulomb problem
    r_max: Optional[float] = None
    n_points: int = 4000
    quad_order: int = 64
    angular_order: int = 8
    inner_method: str = "closed"
    potential_file: str = ""
    sweep_lambda: str = ""
    lambda_over_m: str = "0.5,1,2,5,10"
    z_list: str = "1,2,3,4"
    quick: bool = False
    format: str = "text"
    output: str = ""

    def validate(self):
        if self.format not in FORMATS:
            raise ValidationError("format", f"must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if self.inner_method not in ("closed", "quadrature"):
            raise ValidationError("inner_method", f"must be 'closed' or 'quadrature', got {self.inner_method!r}")
        if self.lambda_cut != "e0":
            try:
                float(self.lambda_cut)
            except ValueError:
                raise ValidationError("lambda_cut", f"must be a number or 'e0', got {self.lambda_cut!r}") from None
        return self

    def resolve_lambda(self, e0) -> float:
        return float(e0) if self.lambda_cut == "e0" else float(self.lambda_cut)

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps())

    def updated(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes).validate()


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(name, text, lineno=None):
    kind = _TYPES[name]
    where = f"line {lineno}: " if lineno is not None else ""
    text = text.strip()
    try:
        if kind == "Optional[float]":
            return None if text == "" else float(text)
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "bool":
            if text.lower() in ("true", "yes", "1"):
                return True
            if text.lower() in ("false", "no", "0"):
                return False
            raise ValueError(text)
    except ValueError:
        raise ValidationError(name, f"{where}cannot parse {text!r} as {kind}") from None
    return text


def loads(text, base: Optional[RunConfig] = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError("config", f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ValidationError(key, f"line {lineno}: unknown configuration key")
        values[key] = _parse_value(key, value, lineno)
    return dataclasses.replace(base or RunConfig(), **values).validate()


def load(path, base: Optional[RunConfig] = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError("config", f"cannot read {path}: {exc.strerror}") from None
    return loads(text, base)


# Threshold scenarios: label, charge, cutoff, splitting, quoted bound
@dataclass(frozen=True)
class Scenario:
    name: str
    z_charge: float
    lambda_cut: str
    a_split: float
    quotes: tuple  # (quantity, quoted text, quoted value as a function of e0)


SCENARIOS = {
    "small-cutoff": Scenario("small-cutoff", 1.0, "e0", 1e-3,
                             (("alpha_max", "1/(45 pi)", lambda e0: 1 / (45 * 3.141592653589793)),)),
    "unit-cutoff": Scenario("unit-cutoff", 1.0, "1", 0.25,
                            (("schwarz_term", "1/200", lambda e0: 1 / 200),
                             ("rc_term", "e0/21", lambda e0: e0 / 21))),
    "unit-cutoff-z2": Scenario("unit-cutoff-z2", 2.0, "1", 0.25,
                               (("rc_term", "1/(4*10^5)", lambda e0: 1 / 4e5),)),
}

PRESETS = {
    "small-cutoff": ("small-cutoff",),
    "unit-cutoff": ("unit-cutoff",),
    "unit-cutoff-z2": ("unit-cutoff-z2",),
    # the three scenarios together
    "paper-5.3": ("small-cutoff", "unit-cutoff", "unit-cutoff-z2"),
}


def preset_scenarios(name):
    if name not in PRESETS:
        raise ValidationError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return [SCENARIOS[s] for s in PRESETS[name]]
