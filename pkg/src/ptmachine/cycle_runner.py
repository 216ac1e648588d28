"""Four-stroke cycle execution and bookkeeping for every backend.

Stroke order: (1) ramp omega1 -> omega2, (2) position measurement at omega2,
(3) ramp omega2 -> omega1, (4) full thermalization at omega1.

Paper mode follows the unnormalised measurement bookkeeping (stroke-2 energy
scaled by 1/sqrt(2 pi sigma^2)); the post-measurement state is never built,
so stroke 4 relaxes the physically carried pre-measurement state. Channel
mode applies the trace-preserving measurement map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import analytic_cycle as ac
from . import fock_engine as fe
from . import gaussian_engine as ge
from .analytic_cycle import Backend, CycleParams, Mode, Regime, ThermoReport
from .bath_models import BathConfig, thermalize
from .errors import FirstLawError, NumericError, TruncationError

ANALYTIC_FIRST_LAW = 1e-12
NUMERIC_FIRST_LAW = 1e-6


@dataclass(frozen=True)
class ComparisonReport:
    paper: ThermoReport
    channel: ThermoReport

    @property
    def q2_paper(self) -> float:
        return self.paper.q2

    @property
    def q2_channel(self) -> float:
        return self.channel.q2

    @property
    def delta_w_net(self) -> float:
        return self.channel.w_net - self.paper.w_net

    @property
    def delta_q2(self) -> float:
        return self.channel.q2 - self.paper.q2

    @property
    def delta_regime(self) -> bool:
        return self.paper.regime is not self.channel.regime

    def as_dict(self) -> dict:
        return {
            "q2_paper": self.q2_paper,
            "q2_channel": self.q2_channel,
            "delta_q2": self.delta_q2,
            "delta_w_net": self.delta_w_net,
            "regime_paper": self.paper.regime.value,
            "regime_channel": self.channel.regime.value,
            "regime_divergence": self.delta_regime,
            "paper": self.paper.as_dict(),
            "channel": self.channel.as_dict(),
        }


def _shift(p: CycleParams, omega: float) -> float:
    return omega * p.epsilon if p.include_const_shift else 0.0


def _paper_measurement(p: CycleParams, u1: float, u_back: float):
    """Stroke-2/3 energies in paper bookkeeping; the constant shift is never scaled."""
    s1, s2 = _shift(p, p.omega2), _shift(p, p.omega1)
    u2 = fe.paper_mode_energy_scale(u1 - s1, p.sigma) + s1
    u3 = fe.paper_mode_energy_scale(u_back - s2, p.sigma) + s2
    return u2, u3


def _run_fock(p: CycleParams, dim: int) -> ThermoReport:
    mu, w1, w2 = p.mu, p.omega1, p.omega2
    kw = dict(mu=mu, epsilon=p.epsilon, include_shift=p.include_const_shift)
    cfg = BathConfig.from_params(p)
    try:
        rho0 = fe.thermal_state(dim, p.beta, w1, mu, p.tol)
    except NumericError as exc:
        raise exc.with_stroke(1)
    u0 = fe.energy(rho0, w1, **kw)
    u1 = fe.adiabatic_rescale_energy(rho0, w1, w2, **kw)

    if p.measurement_mode is Mode.PAPER:
        carried = rho0
        u_back = fe.adiabatic_rescale_energy(rho0, w2, w1, **kw)
        u2, u3 = _paper_measurement(p, u1, u_back)
    else:
        try:
            carried = fe.measurement_channel(rho0, p.sigma, w2, mu, p.tol)
        except NumericError as exc:
            raise exc.with_stroke(2)
        u2 = fe.energy(carried, w2, **kw)
        u3 = fe.adiabatic_rescale_energy(carried, w2, w1, **kw)

    try:
        rho4, steps = thermalize(carried, w1, cfg, p.bath_method, mu)
    except NumericError as exc:
        raise exc.with_stroke(4)
    u4 = fe.energy(rho4, w1, **kw)
    return ac.report_from_energies(
        (u0, u1, u2, u3), u4,
        backend=Backend.FOCK, mode=p.measurement_mode, fock_dim=dim,
        bath_steps=steps, closure=fe.trace_distance(rho4, rho0),
    )


def _run_gaussian(p: CycleParams) -> ThermoReport:
    mu, w1, w2 = p.mu, p.omega1, p.omega2
    kw = dict(mu=mu, include_shift=p.include_const_shift, epsilon=p.epsilon)
    cfg = BathConfig.from_params(p)
    g0 = ge.thermal_gaussian(p.beta, w1, mu)
    u0 = ge.gaussian_energy(g0, w1, **kw)
    g1 = ge.adiabatic_map(g0, w1, w2)
    u1 = ge.gaussian_energy(g1, w2, **kw)

    if p.measurement_mode is Mode.PAPER:
        carried = g1
        u_back = ge.gaussian_energy(ge.adiabatic_map(g1, w2, w1), w1, **kw)
        u2, u3 = _paper_measurement(p, u1, u_back)
    else:
        carried = ge.gaussian_measurement_update(g1, p.sigma)
        u2 = ge.gaussian_energy(carried, w2, **kw)
        u3 = ge.gaussian_energy(ge.adiabatic_map(carried, w2, w1), w1, **kw)

    g3 = ge.adiabatic_map(carried, w2, w1)
    try:
        g4, steps = thermalize(g3, w1, cfg, p.bath_method, mu)
    except NumericError as exc:
        raise exc.with_stroke(4)
    u4 = ge.gaussian_energy(g4, w1, **kw)
    return ac.report_from_energies(
        (u0, u1, u2, u3), u4,
        backend=Backend.GAUSSIAN, mode=p.measurement_mode,
        bath_steps=steps, closure=ge.moment_distance(g4, g0),
    )


def run_cycle(p: CycleParams) -> ThermoReport:
    """Run all four strokes with the configured backend and measurement mode."""
    if p.backend is Backend.ANALYTIC:
        return ac.analytic_report(p)
    if p.backend is Backend.GAUSSIAN:
        return _run_gaussian(p)
    if p.fock_dim is not None:
        return _run_fock(p, int(p.fock_dim))
    dim = fe.DEFAULT_DIM
    while True:
        try:
            return _run_fock(p, dim)
        except TruncationError:
            if dim >= fe.MAX_DIM:
                raise
            dim *= 2


def compare_modes(p: CycleParams) -> ComparisonReport:
    """Run the cycle in paper and channel measurement modes with the same backend."""
    return ComparisonReport(
        paper=run_cycle(p.replace(measurement_mode=Mode.PAPER)),
        channel=run_cycle(p.replace(measurement_mode=Mode.CHANNEL)),
    )


def first_law_check(report: ThermoReport, bound: float | None = None) -> float:
    """Return W_net + Q2 + Q4; raise FirstLawError if it exceeds the backend bound.

    The analytic bound is relative to max(1, |Q2|).
    """
    residual = report.w_net + report.q2 + report.q4
    if bound is None:
        if report.backend is Backend.ANALYTIC:
            bound = ANALYTIC_FIRST_LAW * max(1.0, abs(report.q2))
        else:
            bound = NUMERIC_FIRST_LAW
    if not math.isfinite(residual) or abs(residual) >= bound:
        raise FirstLawError(f"first-law residual {residual:.3e} exceeds {bound:.1e}")
    return residual


def stroke_occupancies(report: ThermoReport, p: CycleParams) -> tuple[float, ...]:
    """Mean excitation number implied by each stroke energy (shift-free energies)."""
    mu = p.mu
    freqs = (p.omega1, p.omega2, p.omega2, p.omega1)
    energies = (report.u0, report.u1, report.u2, report.u3)
    return tuple(
        (u - _shift(p, w)) / (w * mu) - 0.5 for u, w in zip(energies, freqs)
    )


__all__ = [
    "ComparisonReport",
    "Regime",
    "compare_modes",
    "first_law_check",
    "run_cycle",
    "stroke_occupancies",
]
