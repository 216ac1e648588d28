"""Fourth stroke: relaxation of the working oscillator to the PT bath's thermal state.

Two routes are provided, each for both state representations:

* ``lindblad``: d rho/dt = -i[H, rho] + g(N+1) D[a] rho + g N D[a^dagger] rho,
  with D[o] rho = o rho o^dagger - {o^dagger o, rho}/2. Fock states are
  integrated with fixed-step RK4; Gaussian moments use the exact propagator
  of their linear equations.
* ``collisional``: repeated beam-splitter collisions with fresh thermal
  ancillas at occupancy N, each discarded afterwards.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import ConvergenceError, StabilityError, ValidationError
from .fock_engine import FockDensity, trace_distance
from .gaussian_engine import GaussianState, occupancy_cov
from .pt_params import thermal_occupancy

RK4_STABILITY = 2.5  # real-axis RK4 limit is ~2.785
ANCILLA_TAIL = 1e-14
ANCILLA_MAX_DIM = 64
KRAUS_PRUNE = 1e-20
MASK_ELEMENTS_MAX = 2 ** 24


@dataclass(frozen=True)
class BathConfig:
    gamma: float = 1.0
    occupancy: float = 0.0
    collision_theta: float = 0.2
    max_collisions: int = 10_000
    integrator_dt: Optional[float] = None
    convergence_tol: float = 1e-8
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValidationError(f"gamma must be > 0, got {self.gamma!r}")
        if not self.occupancy >= 0:
            raise ValidationError(f"occupancy must be >= 0, got {self.occupancy!r}")
        if not 0 < self.collision_theta <= math.pi / 2:
            raise ValidationError(f"collision_theta must be in (0, pi/2], got {self.collision_theta!r}")
        if self.integrator_dt is None:
            object.__setattr__(self, "integrator_dt", 0.01 / (self.gamma * (self.occupancy + 1.0)))

    @classmethod
    def from_params(cls, p) -> "BathConfig":
        """Bath seen by the working oscillator at omega1 (occupancy from beta, omega1, mu)."""
        return cls(
            gamma=p.gamma,
            occupancy=thermal_occupancy(p.beta, p.omega1, p.mu),
            collision_theta=p.collision_theta,
            max_collisions=p.max_collisions,
            integrator_dt=p.integrator_dt,
            convergence_tol=p.convergence_tol,
            max_steps=p.max_steps,
        )

    @property
    def rate_down(self) -> float:
        return self.gamma * (self.occupancy + 1.0)

    @property
    def rate_up(self) -> float:
        return self.gamma * self.occupancy


def _as_matrix(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, FockDensity) else np.asarray(rho, dtype=complex)
    return np.ascontiguousarray(m, dtype=complex)


def truncated_thermal(dim: int, occupancy: float) -> np.ndarray:
    """Fixed point of the truncated dissipator: geometric populations with ratio N/(N+1)."""
    if occupancy == 0:
        pops = np.zeros(dim)
        pops[0] = 1.0
    else:
        pops = np.exp(np.arange(dim) * math.log(occupancy / (occupancy + 1.0)))
        pops /= pops.sum()
    return np.diag(pops).astype(complex)


def lindblad_rhs(rho, omega: float, cfg: BathConfig, mu: float = 1.0, hamiltonian: bool = True) -> np.ndarray:
    freq = omega * mu if hamiltonian else 0.0
    return _kernels.lindblad_rhs(_as_matrix(rho), cfg.rate_down, cfg.rate_up, freq)


def stable_dt(cfg: BathConfig, dim: int) -> float:
    """Largest RK4 step that is stable for the dissipator's fastest decay mode."""
    # Gershgorin: hopping terms match the diagonal decay, doubling the bound
    fastest = 2.0 * cfg.gamma * (2.0 * cfg.occupancy + 1.0) * dim
    return min(cfg.integrator_dt, RK4_STABILITY / fastest)


def rk4_step(rho, omega: float, cfg: BathConfig, dt: float, mu: float = 1.0, hamiltonian: bool = True) -> FockDensity:
    if dt > 0.1 / cfg.rate_down:
        raise ValidationError(f"dt={dt!r} exceeds 0.1/(gamma (N+1)) = {0.1 / cfg.rate_down!r}")
    out = _rk4(_as_matrix(rho), omega * mu if hamiltonian else 0.0, cfg, dt, 1)
    return FockDensity(out)


def _rk4(m, freq, cfg, dt, nsteps):
    out, status = _kernels.rk4_lindblad(m, cfg.rate_down, cfg.rate_up, freq, dt, nsteps)
    if status == _kernels.STATUS_TRACE:
        raise StabilityError("trace drift above 1e-12 in a single RK4 step")
    if status == _kernels.STATUS_POSITIVITY:
        raise StabilityError("RK4 step produced a population below -1e-8")
    return out


def _converged(m, target, tol):
    diff = m - target
    fro = float(np.sqrt(np.sum(np.abs(diff) ** 2)))
    # 0.5*||A||_F <= trace distance <= 0.5*sqrt(d)*||A||_F
    if 0.5 * fro >= tol:
        return False, 0.5 * fro
    if 0.5 * math.sqrt(m.shape[0]) * fro < tol:
        return True, 0.5 * fro
    dist = trace_distance(m, target)
    return dist < tol, dist


def _free_rotation(m, phase_rate, t):
    n = np.arange(m.shape[0])
    return m * np.exp(-1j * phase_rate * t * (n[:, None] - n[None, :]))


def _thermalize_fock_lindblad(rho: FockDensity, omega, cfg, mu):
    m = _as_matrix(rho)
    target = truncated_thermal(rho.dim, cfg.occupancy)
    dt = stable_dt(cfg, rho.dim)
    chunk = max(1, int(round(0.25 / (cfg.gamma * dt))))
    steps = 0
    # H commutes with the thermal dissipator, so integrate in the rotating
    # frame and restore the free phases exactly at the end.
    done, _ = _converged(m, target, cfg.convergence_tol)
    while not done:
        if steps >= cfg.max_steps:
            raise ConvergenceError(
                f"Lindblad relaxation not converged after {steps} steps "
                f"(tol={cfg.convergence_tol:g})"
            )
        n = min(chunk, cfg.max_steps - steps)
        m = _rk4(m, 0.0, cfg, dt, n)
        steps += n
        done, _ = _converged(m, target, cfg.convergence_tol)
    m = _free_rotation(m, omega * mu, steps * dt)
    return FockDensity(0.5 * (m + m.conj().T)), steps


def ancilla_dim(occupancy: float) -> int:
    if occupancy == 0:
        return 1
    r = occupancy / (occupancy + 1.0)
    return int(min(ANCILLA_MAX_DIM, max(2, math.ceil(math.log(ANCILLA_TAIL) / math.log(r)))))


@functools.lru_cache(maxsize=16)
def collision_kraus(dim: int, occupancy: float, theta: float):
    """Banded Kraus decomposition of one collision with a thermal ancilla.

    The beam splitter exp[theta (a b^dagger - a^dagger b)] conserves the
    total excitation number, so each ancilla transition j -> k shifts the
    system by j - k levels and its Kraus operator is a single diagonal band.
    Returns (shifts, bands, weights) with ``bands[t, n]`` the amplitude for
    system level n.
    """
    da = ancilla_dim(occupancy)
    if occupancy == 0:
        tau = np.ones(1)
    else:
        r = occupancy / (occupancy + 1.0)
        tau = r ** np.arange(da)
        tau /= tau.sum()

    sectors = {}
    for total in range(dim + da - 1):
        lo, hi = max(0, total - (da - 1)), min(dim - 1, total)
        size = hi - lo + 1
        gen = np.zeros((size, size))
        for n in range(lo + 1, hi + 1):
            amp = theta * math.sqrt(n) * math.sqrt(total - n + 1)
            gen[n - 1 - lo, n - lo] = amp
            gen[n - lo, n - 1 - lo] = -amp
        sectors[total] = (lo, scipy.linalg.expm(gen))

    shifts, bands, weights = [], [], []
    for j in range(da):
        for k in range(da):
            delta = j - k
            band = np.zeros(dim, dtype=complex)
            for n in range(dim):
                out = n + delta
                if not 0 <= out < dim:
                    continue
                lo, u = sectors[n + j]
                hi = lo + u.shape[0] - 1
                if lo <= out <= hi:
                    band[n] = u[out - lo, n - lo]
            if tau[j] * np.max(np.abs(band)) ** 2 < KRAUS_PRUNE:
                continue
            shifts.append(delta)
            bands.append(band)
            weights.append(tau[j])
    shifts = np.array(shifts, dtype=np.int64)
    bands = np.array(bands, dtype=complex)
    weights = np.array(weights, dtype=float)
    for arr in (shifts, bands, weights):
        arr.setflags(write=False)
    return shifts, bands, weights


@functools.lru_cache(maxsize=8)
def collision_masks(dim: int, occupancy: float, theta: float):
    """Kraus bands sharing a shift merged into one elementwise mask per shift.

    For shift delta the collision adds (rho * G)[i, j] to element
    (i + delta, j + delta) with G = sum_t w_t c_t c_t^dagger.
    """
    shifts, bands, weights = collision_kraus(dim, occupancy, theta)
    uniq = np.unique(shifts)
    masks = np.zeros((uniq.size, dim, dim), dtype=complex)
    for idx, delta in enumerate(uniq):
        for t in np.flatnonzero(shifts == delta):
            masks[idx] += weights[t] * np.outer(bands[t], bands[t].conj())
    uniq = uniq.astype(np.int64)
    uniq.setflags(write=False)
    masks.setflags(write=False)
    return uniq, masks


def _collision_step_fn(dim, cfg):
    key = (dim, float(cfg.occupancy), float(cfg.collision_theta))
    shifts, bands, weights = collision_kraus(*key)
    if np.unique(shifts).size * dim * dim <= MASK_ELEMENTS_MAX:
        ushifts, masks = collision_masks(*key)
        return lambda m: _kernels.shifted_masks(m, ushifts, masks)
    return lambda m: _kernels.kraus_bands(m, shifts, bands, weights)


def collision_channel(rho, cfg: BathConfig) -> np.ndarray:
    """One collision with a fresh thermal ancilla, ancilla traced out."""
    m = _as_matrix(rho)
    return _collision_step_fn(m.shape[0], cfg)(m)


def _thermalize_fock_collisional(rho: FockDensity, cfg):
    m = _as_matrix(rho)
    target = truncated_thermal(rho.dim, cfg.occupancy)
    step = _collision_step_fn(rho.dim, cfg)
    steps = 0
    done, _ = _converged(m, target, cfg.convergence_tol)
    while not done:
        if steps >= cfg.max_collisions:
            raise ConvergenceError(
                f"collisional relaxation not converged after {steps} collisions "
                f"(tol={cfg.convergence_tol:g})"
            )
        m = step(m)
        steps += 1
        done, _ = _converged(m, target, cfg.convergence_tol)
    return FockDensity(0.5 * (m + m.conj().T)), steps


def gaussian_lindblad_rhs(mean, cov, omega, cfg: BathConfig, mu=1.0):
    """Moment equations of the thermal master equation for h = mu^2 p^2/2 + omega^2 q^2/2."""
    drift = np.array([[0.0, mu * mu], [-omega * omega, 0.0]])
    v_th = occupancy_cov(cfg.occupancy, omega, mu)
    dmean = drift @ mean - 0.5 * cfg.gamma * mean
    dcov = drift @ cov + cov @ drift.T - cfg.gamma * (cov - v_th)
    return dmean, dcov


def _moment_gap(mean, cov, target_cov):
    return max(float(np.max(np.abs(mean))), float(np.max(np.abs(cov - target_cov))))


def _thermalize_gaussian_lindblad(state: GaussianState, omega, cfg, mu):
    """Exact step propagator of the moment equations.

    With B = A - gamma/2 and the thermal covariance stationary under A,
    V(t) = V_th + e^{Bt} (V0 - V_th) e^{B^T t} and m(t) = e^{Bt} m0.
    """
    v_th = occupancy_cov(cfg.occupancy, omega, mu)
    dt = min(cfg.integrator_dt, 0.1 / (omega * mu))
    drift = np.array([[0.0, mu * mu], [-omega * omega, 0.0]]) - 0.5 * cfg.gamma * np.eye(2)
    phi = scipy.linalg.expm(drift * dt)
    mean, dev = state.mean.copy(), state.cov - v_th
    steps = 0
    while _moment_gap(mean, dev + v_th, v_th) >= cfg.convergence_tol:
        if steps >= cfg.max_steps:
            raise ConvergenceError(f"Gaussian Lindblad relaxation not converged after {steps} steps")
        mean = phi @ mean
        dev = phi @ dev @ phi.T
        steps += 1
    cov = v_th + 0.5 * (dev + dev.T)
    return GaussianState(mean, cov), steps


def _thermalize_gaussian_collisional(state: GaussianState, omega, cfg, mu):
    v_anc = occupancy_cov(cfg.occupancy, omega, mu)
    c, s = math.cos(cfg.collision_theta), math.sin(cfg.collision_theta)
    mean, cov = state.mean.copy(), state.cov.copy()
    steps = 0
    while _moment_gap(mean, cov, v_anc) >= cfg.convergence_tol:
        if steps >= cfg.max_collisions:
            raise ConvergenceError(f"collisional relaxation not converged after {steps} collisions")
        mean = c * mean
        cov = c * c * cov + s * s * v_anc
        steps += 1
    return GaussianState(mean, cov), steps


def thermalize(state, omega: float, cfg: BathConfig, method: str = "lindblad", mu: float = 1.0):
    """Relax ``state`` until it is within ``cfg.convergence_tol`` of the bath's thermal state.

    Fock states use trace distance, Gaussian states the largest moment
    deviation. Returns ``(final_state, steps)``.
    """
    if method not in ("lindblad", "collisional"):
        raise ValidationError(f"unknown thermalization method {method!r}")
    if isinstance(state, GaussianState):
        if method == "lindblad":
            return _thermalize_gaussian_lindblad(state, omega, cfg, mu)
        return _thermalize_gaussian_collisional(state, omega, cfg, mu)
    if not isinstance(state, FockDensity):
        state = FockDensity(state)
    if method == "lindblad":
        return _thermalize_fock_lindblad(state, omega, cfg, mu)
    return _thermalize_fock_collisional(state, cfg)
