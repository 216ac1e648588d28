"""PT-symmetric bath parameterisation.

The bath ancillas carry the non-Hermitian oscillator

    H_PT = p^2/2 + omega^2 q^2/2 + 2 i omega eps p q

whose Hermitian partner under the Dyson map exp[(eps/omega) p^2] is

    h = mu^2 p^2/2 + omega^2 q^2/2 + omega eps,    mu = sqrt(1 + 4 eps^2).

Units: hbar = m = k_B = 1.
"""
import math
import warnings
from dataclasses import dataclass

from .errors import ValidationError

OCCUPANCY_EXPONENT_MAX = 700.0


class OccupancyUnderflowWarning(RuntimeWarning):
    """beta*omega*mu is so large that the thermal occupancy was flushed to zero."""


@dataclass(frozen=True)
class PTParams:
    epsilon: float
    mu: float
    dyson_coeff: float

    @classmethod
    def from_epsilon(cls, epsilon: float, omega: float = 1.0) -> "PTParams":
        return cls(epsilon, mu_from_epsilon(epsilon), dyson_coefficient(epsilon, omega))

    @classmethod
    def from_mu(cls, mu: float, omega: float = 1.0) -> "PTParams":
        return cls.from_epsilon(epsilon_from_mu(mu), omega)


@dataclass(frozen=True)
class HermitianCounterpart:
    p2_coeff: float
    q2_coeff: float
    const_shift: float


def mu_from_epsilon(epsilon: float) -> float:
    if not epsilon >= 0:
        raise ValidationError(f"epsilon must be >= 0, got {epsilon}")
    return math.sqrt(1.0 + 4.0 * epsilon * epsilon)


def epsilon_from_mu(mu: float) -> float:
    if not mu >= 1:
        raise ValidationError("mu must be ≥ 1")
    return 0.5 * math.sqrt(mu * mu - 1.0)


def dyson_coefficient(epsilon: float, omega: float) -> float:
    """Coefficient of p^2 in the Dyson-map exponent."""
    if not omega > 0:
        raise ValidationError(f"omega must be > 0, got {omega}")
    return epsilon / omega


def effective_beta(beta: float, mu: float) -> float:
    if not beta > 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    if not mu >= 1:
        raise ValidationError("mu must be ≥ 1")
    return mu * beta


def thermal_occupancy(beta: float, omega: float, mu: float = 1.0) -> float:
    """Bose occupancy 1/(exp(beta*omega*mu) - 1) of a bath ancilla.

    Exponents above 700 return 0.0 and emit :class:`OccupancyUnderflowWarning`.
    """
    if not beta > 0:
        raise ValidationError(f"beta must be > 0, got {beta}")
    if not omega > 0:
        raise ValidationError(f"omega must be > 0, got {omega}")
    if not mu >= 1:
        raise ValidationError("mu must be ≥ 1")
    x = beta * omega * mu
    if x > OCCUPANCY_EXPONENT_MAX:
        warnings.warn(
            f"thermal occupancy underflow at beta*omega*mu = {x:g}",
            OccupancyUnderflowWarning,
            stacklevel=2,
        )
        return 0.0
    return 1.0 / math.expm1(x)


def hermitian_counterpart(epsilon: float, omega: float) -> HermitianCounterpart:
    if not omega > 0:
        raise ValidationError(f"omega must be > 0, got {omega}")
    mu = mu_from_epsilon(epsilon)
    return HermitianCounterpart(0.5 * mu * mu, 0.5 * omega * omega, omega * epsilon)


def counterpart_level(n: int, epsilon: float, omega: float) -> float:
    """n-th eigenvalue of h: omega*mu*(n + 1/2) + omega*eps."""
    return omega * mu_from_epsilon(epsilon) * (n + 0.5) + omega * epsilon
