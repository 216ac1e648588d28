"""Closed-form thermodynamics of the measurement-fuelled single-bath cycle.

Stroke energies (hbar = 1, mu from the bath's PT strength)::

    u0 = (omega1 mu / 2) coth(beta omega1 mu / 2)    thermal state at omega1
    u1 = (omega2 / omega1) u0                         after the quasi-static ramp
    u2 = s u1                                         after the position measurement
    u3 = s u0                                         after the ramp back

with the measurement factor ``s = 1/sqrt(2 pi sigma^2)``. This is the
"paper" bookkeeping. The "channel" variant replaces stroke 2 by the
trace-preserving dephasing map, which adds ``mu^2/(8 sigma^2)`` to u1.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import RegimeError, ValidationError
from .pt_params import epsilon_from_mu, mu_from_epsilon

REGIME_DEADBAND = 1e-12
SQRT_2PI = math.sqrt(2.0 * math.pi)


class Mode(str, enum.Enum):
    PAPER = "paper"
    CHANNEL = "channel"


class Backend(str, enum.Enum):
    ANALYTIC = "analytic"
    FOCK = "fock"
    GAUSSIAN = "gaussian"


class Regime(str, enum.Enum):
    ENGINE = "Engine"
    REFRIGERATOR = "Refrigerator"
    OTHER = "Other"


@dataclass(frozen=True)
class CycleParams:
    """Full configuration of one cycle evaluation.

    ``fock_dim=None`` starts the Fock backend at 128 levels and doubles up to
    1024 on truncation failure; an explicit value pins the dimension.
    """

    omega1: float = 1.0
    omega2: float = 2.0
    beta: float = 0.2
    epsilon: float = 0.0
    sigma: float = 0.1
    measurement_mode: Mode = Mode.PAPER
    backend: Backend = Backend.ANALYTIC
    fock_dim: Optional[int] = None
    tol: float = 1e-10
    include_const_shift: bool = False
    # fourth-stroke bath
    gamma: float = 1.0
    bath_method: str = "lindblad"
    collision_theta: float = 0.2
    max_collisions: int = 10_000
    integrator_dt: Optional[float] = None
    convergence_tol: float = 1e-8
    max_steps: int = 2_000_000

    def __post_init__(self):
        object.__setattr__(self, "measurement_mode", Mode(self.measurement_mode))
        object.__setattr__(self, "backend", Backend(self.backend))
        for name in ("omega1", "omega2", "beta", "sigma", "tol", "gamma", "convergence_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be > 0, got {value!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.fock_dim is not None and int(self.fock_dim) < 2:
            raise ValidationError(f"fock_dim must be >= 2, got {self.fock_dim!r}")
        if self.bath_method not in ("lindblad", "collisional"):
            raise ValidationError(
                f"bath_method must be 'lindblad' or 'collisional', got {self.bath_method!r}"
            )
        if not 0 < self.collision_theta <= math.pi / 2:
            raise ValidationError(
                f"collision_theta must be in (0, pi/2], got {self.collision_theta!r}"
            )
        if self.integrator_dt is not None and not self.integrator_dt > 0:
            raise ValidationError(f"integrator_dt must be > 0, got {self.integrator_dt!r}")
        if self.max_collisions < 1 or self.max_steps < 1:
            raise ValidationError("max_collisions and max_steps must be >= 1")

    @classmethod
    def with_mu(cls, mu: float, **kwargs) -> "CycleParams":
        return cls(epsilon=epsilon_from_mu(mu), **kwargs)

    @property
    def mu(self) -> float:
        return mu_from_epsilon(self.epsilon)

    def replace(self, **changes) -> "CycleParams":
        if "mu" in changes:
            changes["epsilon"] = epsilon_from_mu(changes.pop("mu"))
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ThermoReport:
    u0: float
    u1: float
    u2: float
    u3: float
    w_net: float
    q2: float
    q4: float
    regime: Regime
    merit: float
    first_law_residual: float
    u4: float = float("nan")
    backend: Backend = Backend.ANALYTIC
    mode: Mode = Mode.PAPER
    fock_dim: Optional[int] = None
    bath_steps: int = 0
    closure: float = 0.0

    @property
    def w1(self) -> float:
        return self.u1 - self.u0

    @property
    def w3(self) -> float:
        return self.u3 - self.u2

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["regime"] = self.regime.value
        out["backend"] = self.backend.value
        out["mode"] = self.mode.value
        return out


def coth(x: float) -> float:
    """coth for x > 0 without cancellation near 0 or overflow for large x."""
    if x > _kernels.COTH_SATURATION:
        return 1.0
    return 1.0 + 2.0 / math.expm1(2.0 * x)


def measurement_factor(sigma: float) -> float:
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma!r}")
    if math.isinf(sigma):
        return 0.0
    return 1.0 / (sigma * SQRT_2PI)


def sigma_switch() -> float:
    """Measurement width at which every energy flow of the cycle vanishes."""
    return 1.0 / SQRT_2PI


def _bath_factor(p: CycleParams) -> float:
    mu = p.mu
    return 0.5 * mu * coth(0.5 * p.beta * p.omega1 * mu)


def internal_energies(p: CycleParams) -> tuple[float, float, float, float]:
    u0 = p.omega1 * _bath_factor(p)
    u1 = p.omega2 * _bath_factor(p)
    s = measurement_factor(p.sigma)
    return u0, u1, s * u1, s * u0


def net_work(p: CycleParams) -> float:
    s = measurement_factor(p.sigma)
    return _bath_factor(p) * (1.0 - s) * (p.omega2 - p.omega1)


def heat_measurement(p: CycleParams) -> float:
    s = measurement_factor(p.sigma)
    return -_bath_factor(p) * (1.0 - s) * p.omega2


def heat_bath(p: CycleParams) -> float:
    s = measurement_factor(p.sigma)
    return _bath_factor(p) * (1.0 - s) * p.omega1


def classify_regime(w_net: float, q2: float, q4: float) -> Regime:
    band = REGIME_DEADBAND
    if w_net < -band and q2 > band and q4 < -band:
        return Regime.ENGINE
    if w_net > band and q2 < -band and q4 > band:
        return Regime.REFRIGERATOR
    return Regime.OTHER


def regime(p: CycleParams) -> Regime:
    return classify_regime(net_work(p), heat_measurement(p), heat_bath(p))


def efficiency(p: CycleParams) -> float:
    if regime(p) is not Regime.ENGINE:
        raise RegimeError(f"efficiency is defined only for an engine, regime is {regime(p).value}")
    return 1.0 - p.omega1 / p.omega2


def cop(p: CycleParams) -> float:
    if regime(p) is not Regime.REFRIGERATOR:
        raise RegimeError(
            f"COP is defined only for a refrigerator, regime is {regime(p).value}"
        )
    return p.omega1 / (p.omega2 - p.omega1)


def merit_from_flows(regime_: Regime, w_net: float, q2: float, q4: float) -> float:
    """Efficiency for an engine, COP for a refrigerator, NaN otherwise."""
    if regime_ is Regime.ENGINE:
        return -w_net / q2
    if regime_ is Regime.REFRIGERATOR:
        return q4 / w_net
    return float("nan")


def channel_heat(sigma: float, mu: float) -> float:
    """Energy deposited by the non-selective position measurement: mu^2 <dp^2>/2."""
    return mu * mu / (8.0 * sigma * sigma)


def channel_energies(p: CycleParams) -> tuple[float, float, float, float]:
    u0 = p.omega1 * _bath_factor(p)
    u1 = p.omega2 * _bath_factor(p)
    u2 = u1 + channel_heat(p.sigma, p.mu)
    return u0, u1, u2, (p.omega1 / p.omega2) * u2


def report_from_energies(
    energies, u4: float, *, formula_merit=None, **meta
) -> ThermoReport:
    """Assemble a report from stroke energies; u4 closes the cycle."""
    u0, u1, u2, u3 = energies
    w_net = (u1 - u0) + (u3 - u2)
    q2 = u2 - u1
    q4 = u4 - u3
    reg = classify_regime(w_net, q2, q4)
    merit = formula_merit if formula_merit is not None else merit_from_flows(reg, w_net, q2, q4)
    return ThermoReport(
        u0=u0, u1=u1, u2=u2, u3=u3, u4=u4,
        w_net=w_net, q2=q2, q4=q4,
        regime=reg, merit=merit,
        first_law_residual=w_net + q2 + q4,
        **meta,
    )


def analytic_report(p: CycleParams) -> ThermoReport:
    """Closed-form report. Paper mode uses the closed-form flows directly."""
    shift = (p.omega1 * p.epsilon, p.omega2 * p.epsilon) if p.include_const_shift else (0.0, 0.0)
    if p.measurement_mode is Mode.CHANNEL:
        u0, u1, u2, u3 = channel_energies(p)
        energies = (u0 + shift[0], u1 + shift[1], u2 + shift[1], u3 + shift[0])
        return report_from_energies(
            energies, energies[0], backend=Backend.ANALYTIC, mode=Mode.CHANNEL
        )
    u0, u1, u2, u3 = internal_energies(p)
    w_net, q2, q4 = net_work(p), heat_measurement(p), heat_bath(p)
    reg = classify_regime(w_net, q2, q4)
    if reg is Regime.ENGINE:
        merit = efficiency(p)
    elif reg is Regime.REFRIGERATOR:
        merit = cop(p)
    else:
        merit = float("nan")
    return ThermoReport(
        u0=u0 + shift[0], u1=u1 + shift[1], u2=u2 + shift[1], u3=u3 + shift[0],
        u4=u0 + shift[0],
        w_net=w_net, q2=q2, q4=q4,
        regime=reg, merit=merit,
        first_law_residual=w_net + q2 + q4,
        backend=Backend.ANALYTIC, mode=Mode.PAPER,
    )


def analytic_grid(omega1, omega2, beta, mu, sigma) -> np.ndarray:
    """Paper-mode (w_net, q2, q4) over broadcast parameter arrays, shape (..., 3)."""
    arrays = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (omega1, omega2, beta, mu, sigma))
    )
    shape = arrays[0].shape
    flat = [np.ascontiguousarray(a.reshape(-1)) for a in arrays]
    return _kernels.cycle_grid(*flat).reshape(shape + (3,))
