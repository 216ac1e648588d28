"""Flat ``key = value`` configuration files.

Lines starting with ``#`` (or trailing ``# ...``) are comments. Bath options
use dotted keys such as ``bath.gamma``. A file containing ``axis`` describes
a sweep; otherwise it describes a single cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic_cycle import CycleParams
from .errors import ValidationError
from .pt_params import epsilon_from_mu

SWEEP_AXES = ("mu", "sigma", "omega2", "beta")

_FLOAT_KEYS = {
    "omega1": "omega1",
    "omega2": "omega2",
    "beta": "beta",
    "sigma": "sigma",
    "tol": "tol",
    "bath.gamma": "gamma",
    "bath.theta": "collision_theta",
    "bath.dt": "integrator_dt",
    "bath.tol": "convergence_tol",
}
_INT_KEYS = {
    "fock_dim": "fock_dim",
    "bath.max_collisions": "max_collisions",
    "bath.max_steps": "max_steps",
}
_STR_KEYS = {
    "backend": "backend",
    "mode": "measurement_mode",
    "bath.method": "bath_method",
}
_BOOL_KEYS = {"include_const_shift": "include_const_shift"}
_PT_KEYS = ("epsilon", "mu")
_SWEEP_KEYS = ("axis", "start", "stop", "points")

KNOWN_KEYS = frozenset(
    [*_FLOAT_KEYS, *_INT_KEYS, *_STR_KEYS, *_BOOL_KEYS, *_PT_KEYS, *_SWEEP_KEYS]
)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    points: int
    fixed: CycleParams = field(default_factory=CycleParams)

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValidationError(f"axis must be one of {', '.join(SWEEP_AXES)}, got {self.axis!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise ValidationError(f"sweep needs start < stop, got {self.start!r} >= {self.stop!r}")
        if int(self.points) < 2:
            raise ValidationError(f"points must be >= 2, got {self.points!r}")
        if self.axis == "mu" and self.start < 1:
            raise ValidationError("mu must be ≥ 1")
        if self.axis != "mu" and self.start <= 0:
            raise ValidationError(f"{self.axis} must be > 0")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))

    def point(self, value: float) -> CycleParams:
        return self.fixed.replace(**{self.axis: float(value)})


def parse_pairs(text: str, source: str = "<config>") -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValidationError(f"{source}:{lineno}: empty key")
        if key in pairs:
            raise ValidationError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _number(key, value, kind):
    try:
        return kind(value)
    except ValueError:
        raise ValidationError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None


def _bool(key, value):
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"{key}: expected a boolean, got {value!r}")


def params_from_pairs(pairs: dict[str, str]) -> CycleParams | SweepSpec:
    unknown = sorted(set(pairs) - KNOWN_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    if "epsilon" in pairs and "mu" in pairs:
        raise ValidationError("give either epsilon or mu, not both")

    kwargs = {}
    for key, attr in _FLOAT_KEYS.items():
        if key in pairs:
            kwargs[attr] = _number(key, pairs[key], float)
    for key, attr in _INT_KEYS.items():
        if key in pairs:
            kwargs[attr] = _number(key, pairs[key], int)
    for key, attr in _STR_KEYS.items():
        if key in pairs:
            kwargs[attr] = pairs[key].lower()
    for key, attr in _BOOL_KEYS.items():
        if key in pairs:
            kwargs[attr] = _bool(key, pairs[key])
    if "epsilon" in pairs:
        kwargs["epsilon"] = _number("epsilon", pairs["epsilon"], float)
    if "mu" in pairs:
        kwargs["epsilon"] = epsilon_from_mu(_number("mu", pairs["mu"], float))
    try:
        params = CycleParams(**kwargs)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(str(exc)) from None

    sweep_keys = [k for k in _SWEEP_KEYS if k in pairs]
    if not sweep_keys:
        return params
    missing = [k for k in _SWEEP_KEYS if k not in pairs]
    if missing:
        raise ValidationError(f"sweep config is missing: {', '.join(missing)}")
    return SweepSpec(
        axis=pairs["axis"],
        start=_number("start", pairs["start"], float),
        stop=_number("stop", pairs["stop"], float),
        points=_number("points", pairs["points"], int),
        fixed=params,
    )


def parse_config(path, overrides: dict[str, str] | None = None) -> CycleParams | SweepSpec:
    """Read a config file; ``overrides`` replace file entries key by key."""
    pairs = parse_pairs(Path(path).read_text(), str(path)) if path is not None else {}
    if overrides:
        for key in ("epsilon", "mu"):
            if key in overrides:
                pairs.pop("mu" if key == "epsilon" else "epsilon", None)
        pairs.update(overrides)
    return params_from_pairs(pairs)
