"""Covariance-matrix backend for a single bosonic mode.

Moments are taken in the physical quadratures of the current Hamiltonian
``h = mu^2 p^2/2 + omega^2 q^2/2``, ordered (q, p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic_cycle import coth
from .errors import ValidationError

UNCERTAINTY_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(2)
        cov = np.array(self.cov, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValidationError("Gaussian moments must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(1.0, np.abs(cov).max()):
            raise ValidationError("covariance matrix must be symmetric")
        cov[1, 0] = cov[0, 1]
        if np.linalg.det(cov) < 0.25 - UNCERTAINTY_SLACK * max(1.0, np.abs(cov).max() ** 2):
            raise ValidationError(f"covariance violates the uncertainty relation: det={np.linalg.det(cov)!r}")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    def second_moments(self) -> np.ndarray:
        """<{r_i, r_j}>/2 including the displacement."""
        return self.cov + np.outer(self.mean, self.mean)


def thermal_cov(beta: float, omega: float, mu: float = 1.0) -> np.ndarray:
    c = coth(0.5 * beta * omega * mu)
    return np.diag([0.5 * mu / omega * c, 0.5 * omega / mu * c])


def thermal_gaussian(beta: float, omega: float, mu: float = 1.0) -> GaussianState:
    if not (beta > 0 and omega > 0 and mu >= 1):
        raise ValidationError("thermal_gaussian needs beta > 0, omega > 0, mu >= 1")
    return GaussianState(np.zeros(2), thermal_cov(beta, omega, mu))


def occupancy_cov(occupancy: float, omega: float, mu: float = 1.0) -> np.ndarray:
    """Thermal covariance parameterised by its mean occupancy N."""
    c = 2.0 * occupancy + 1.0
    return np.diag([0.5 * mu / omega * c, 0.5 * omega / mu * c])


def gaussian_measurement_update(state: GaussianState, sigma: float) -> GaussianState:
    # non-selective position measurement: only <p^2> grows
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma!r}")
    cov = state.cov.copy()
    cov[1, 1] += 0.25 / (sigma * sigma)
    return GaussianState(state.mean, cov)


def adiabatic_map(state: GaussianState, omega_from: float, omega_to: float) -> GaussianState:
    """Quasi-static frequency change: q -> q sqrt(w_from/w_to), p -> p sqrt(w_to/w_from)."""
    if not (omega_from > 0 and omega_to > 0):
        raise ValidationError("frequencies must be > 0")
    r = math.sqrt(omega_from / omega_to)
    s = np.diag([r, 1.0 / r])
    return GaussianState(s @ state.mean, s @ state.cov @ s)


def collision_update(state: GaussianState, ancilla: GaussianState, theta: float) -> GaussianState:
    """One beam-splitter collision with a fresh ancilla, which is then discarded."""
    if not 0 < theta <= math.pi / 2:
        raise ValidationError(f"theta must be in (0, pi/2], got {theta!r}")
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    mean = math.cos(theta) * state.mean + math.sin(theta) * ancilla.mean
    return GaussianState(mean, c2 * state.cov + s2 * ancilla.cov)


def gaussian_energy(state: GaussianState, omega: float, mu: float = 1.0, include_shift: bool = False, epsilon: float = 0.0) -> float:
    m = state.second_moments()
    value = 0.5 * (mu * mu * m[1, 1] + omega * omega * m[0, 0])
    if include_shift:
        value += omega * epsilon
    return float(value)


def gaussian_occupancy(state: GaussianState, omega: float, mu: float = 1.0) -> float:
    """<a^dagger a> for the ladder operator of h at this frequency."""
    return gaussian_energy(state, omega, mu) / (omega * mu) - 0.5


def moment_distance(a: GaussianState, b: GaussianState) -> float:
    return float(max(np.max(np.abs(a.mean - b.mean)), np.max(np.abs(a.cov - b.cov))))
