"""Truncated Fock-space numerics for the working oscillator.

The working substance at frequency ``omega`` is the Hermitian partner
``h = mu^2 p^2/2 + omega^2 q^2/2`` whose number basis diagonalises it with
levels ``omega*mu*(n + 1/2)``. Density matrices are always expressed in the
number basis of the *current* Hamiltonian, so a quasi-static frequency ramp
leaves the matrix untouched.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import TruncationError, ValidationError

FockOperator = np.ndarray

DEFAULT_DIM = 128
MAX_DIM = 1024
HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-10
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Density matrix on the first ``dim`` number states (read-only)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValidationError(f"density matrix must be square with dim >= 2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("density matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @functools.cached_property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def populations(self) -> np.ndarray:
        return np.diagonal(self.matrix).real

    def check(self, trace_tol: float = 1e-8) -> "FockDensity":
        """Raise ValidationError unless Hermitian, positive and unit trace."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
            raise ValidationError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < EIGEN_FLOOR:
            raise ValidationError("density matrix has negative eigenvalues")
        if abs(self.trace - 1.0) > trace_tol:
            raise ValidationError(f"density matrix trace is {self.trace!r}")
        return self


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    if dim < 2:
        raise ValidationError(f"dim must be >= 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def quadrature_ops(dim: int, omega: float, mu: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum of the oscillator with mass 1/mu^2 and frequency omega*mu."""
    a, ad = ladder_ops(dim)
    q = np.sqrt(mu / (2.0 * omega)) * (a + ad)
    p = 1j * np.sqrt(omega / (2.0 * mu)) * (ad - a)
    return q, p


def number_hamiltonian(dim, omega, mu=1.0, epsilon=0.0, include_shift=False) -> np.ndarray:
    levels = omega * mu * (np.arange(dim) + 0.5)
    if include_shift:
        levels = levels + omega * epsilon
    return np.diag(levels).astype(complex)


def energy(rho: FockDensity, omega, mu=1.0, epsilon=0.0, include_shift=False) -> float:
    """Tr[rho H(omega)] using the diagonal form of H (no matrix product needed)."""
    n = np.arange(rho.dim)
    value = omega * mu * float(np.dot(rho.populations, n + 0.5))
    if include_shift:
        value += omega * epsilon * rho.trace
    return value


def expectation(op: np.ndarray, rho: FockDensity, hermitian: bool | None = None):
    """Tr[rho op]. Returns a float when ``op`` is Hermitian."""
    op = np.asarray(op)
    if op.shape != rho.matrix.shape:
        raise ValidationError(f"dimension mismatch: operator {op.shape} vs state {rho.matrix.shape}")
    value = np.einsum("ij,ji->", rho.matrix, op)
    if hermitian is None:
        hermitian = np.allclose(op, op.conj().T, atol=HERMITIAN_TOL, rtol=0.0)
    if hermitian:
        if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
            raise ValidationError(f"Hermitian expectation has imaginary part {value.imag!r}")
        return float(value.real)
    return complex(value)


def trace_distance(rho: FockDensity | np.ndarray, sigma: FockDensity | np.ndarray) -> float:
    a = rho.matrix if isinstance(rho, FockDensity) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, FockDensity) else np.asarray(sigma)
    diff = a - b
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def tail_mass(rho: FockDensity | np.ndarray) -> float:
    """Population held in the top eighth of the truncated space (at least two levels)."""
    m = rho.matrix if isinstance(rho, FockDensity) else np.asarray(rho)
    d = m.shape[0]
    k = max(2, d // 8)
    return float(np.diagonal(m)[d - k:].real.sum())


def thermal_state(dim: int, beta: float, omega: float, mu: float = 1.0, tol: float = 1e-10) -> FockDensity:
    """Gibbs state with populations proportional to exp(-beta*omega*mu*n).

    Raises TruncationError when the geometric tail beyond ``dim`` carries
    ``tol`` or more probability.
    """
    if dim < 2:
        raise ValidationError(f"dim must be >= 2, got {dim}")
    x = beta * omega * mu
    # exact tail beyond the cutoff of the untruncated geometric distribution
    tail = float(np.exp(-x * dim))
    if tail >= tol:
        raise TruncationError(
            f"thermal tail mass {tail:.3e} beyond dim={dim} exceeds tol={tol:g} "
            f"(beta*omega*mu={x:g})"
        )
    logp = -x * np.arange(dim)
    pops = np.exp(logp - logp.max())
    pops /= pops.sum()
    return FockDensity(np.diag(pops).astype(complex))


@functools.lru_cache(maxsize=32)
def position_basis(dim: int, omega: float, mu: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of the truncated position operator (cached, read-only)."""
    q, _ = quadrature_ops(dim, omega, mu)
    x, v = np.linalg.eigh(q.real)
    x.setflags(write=False)
    v.setflags(write=False)
    return x, v


def measurement_channel(rho: FockDensity, sigma: float, omega: float, mu: float = 1.0, tol: float = 1e-10) -> FockDensity:
    """Non-selective Gaussian position measurement of width sigma.

    In the position eigenbasis the Kraus integral over outcomes multiplies
    element (x, x') by exp[-(x - x')^2 / (8 sigma^2)].
    """
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma!r}")
    if np.isinf(sigma):
        return rho
    x, v = position_basis(rho.dim, float(omega), float(mu))
    rho_x = v.T @ rho.matrix @ v
    out = v @ _kernels.position_decoherence(np.ascontiguousarray(rho_x), x, float(sigma)) @ v.T
    out = 0.5 * (out + out.conj().T)
    tail = tail_mass(out)
    if tail >= tol:
        raise TruncationError(
            f"post-measurement tail mass {tail:.3e} at dim={rho.dim} exceeds tol={tol:g}"
        )
    return FockDensity(out)


def paper_mode_energy_scale(u_pre: float, sigma: float) -> float:
    """Post-measurement energy in the unnormalised bookkeeping: u_pre / sqrt(2 pi sigma^2)."""
    from .analytic_cycle import measurement_factor

    return measurement_factor(sigma) * u_pre


def adiabatic_rescale_energy(rho: FockDensity, omega_from: float, omega_to: float, mu: float = 1.0, epsilon: float = 0.0, include_shift: bool = False) -> float:
    """Energy under H(omega_to) after a quasi-static ramp from omega_from.

    The ramp keeps number-basis populations fixed, so the matrix itself is
    carried over unchanged.
    """
    if not (omega_from > 0 and omega_to > 0):
        raise ValidationError("frequencies must be > 0")
    return energy(rho, omega_to, mu, epsilon, include_shift)


# ---------------------------------------------------------------------------
# PT structure checks (mass-1 quadratures of the bare ancilla)
# ---------------------------------------------------------------------------


def pt_hamiltonian(epsilon: float, omega: float, dim: int) -> np.ndarray:
    q, p = quadrature_ops(dim, omega)
    return p @ p / 2 + omega**2 * (q @ q) / 2 + 2j * omega * epsilon * (p @ q)


def counterpart_hamiltonian(epsilon: float, omega: float, dim: int) -> np.ndarray:
    from .pt_params import hermitian_counterpart

    c = hermitian_counterpart(epsilon, omega)
    q, p = quadrature_ops(dim, omega)
    return c.p2_coeff * (p @ p) + c.q2_coeff * (q @ q) + c.const_shift * np.eye(dim)


def dyson_map(epsilon: float, omega: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """eta = exp[(eps/omega) p^2] and its inverse on the truncated space."""
    _, p = quadrature_ops(dim, omega)
    gen = (epsilon / omega) * (p @ p)
    return scipy.linalg.expm(gen), scipy.linalg.expm(-gen)


def _low_block(m: np.ndarray) -> np.ndarray:
    # truncation pollutes the high-n edge; keep the lowest dim/2 levels
    k = m.shape[0] // 2
    return m[:k, :k]


def verify_similarity(epsilon: float, omega: float, dim: int) -> float:
    """max |eta H_PT eta^-1 - h| on the low-lying (dim/2) x (dim/2) block."""
    if dim < 8:
        raise ValidationError(f"dim must be >= 8, got {dim}")
    eta, eta_inv = dyson_map(epsilon, omega, dim)
    resid = eta @ pt_hamiltonian(epsilon, omega, dim) @ eta_inv - counterpart_hamiltonian(epsilon, omega, dim)
    return float(np.max(np.abs(_low_block(resid))))


def verify_quasi_hermiticity(epsilon: float, omega: float, dim: int) -> float:
    """max |Theta H - H^dagger Theta| on the low block, Theta = eta^dagger eta."""
    if dim < 8:
        raise ValidationError(f"dim must be >= 8, got {dim}")
    eta, _ = dyson_map(epsilon, omega, dim)
    theta = eta.conj().T @ eta
    h = pt_hamiltonian(epsilon, omega, dim)
    return float(np.max(np.abs(_low_block(theta @ h - h.conj().T @ theta))))


def metric_operator(epsilon: float, omega: float, dim: int) -> np.ndarray:
    eta, _ = dyson_map(epsilon, omega, dim)
    return eta.conj().T @ eta


def pt_spectrum(epsilon: float, omega: float, dim: int) -> np.ndarray:
    """Eigenvalues of the truncated H_PT, sorted by real part."""
    ev = np.linalg.eigvals(pt_hamiltonian(epsilon, omega, dim))
    return ev[np.argsort(ev.real)]
