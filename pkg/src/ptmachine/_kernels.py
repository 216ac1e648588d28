"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a loop version compiled by ``numba.njit`` and a
vectorised numpy version. The numpy path is used when numba cannot be
imported or when ``PTMACHINE_DISABLE_NUMBA`` is set to a truthy value before
the package is imported. Both paths are exported under explicit names
(``np_*`` / ``nb_*``) so tests and the benchmark can compare them directly.

Fock matrices are dense complex ``(d, d)`` arrays with row index = ket level.
"""
import math
import os

import numpy as np

DISABLE_NUMBA = os.environ.get("PTMACHINE_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    if DISABLE_NUMBA:
        raise ImportError("disabled by PTMACHINE_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

STATUS_OK = 0
STATUS_TRACE = 1
STATUS_POSITIVITY = 2

TRACE_DRIFT_MAX = 1e-12
POSITIVITY_FLOOR = -1e-8
COTH_SATURATION = 350.0


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def np_coth(x):
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    small = x <= COTH_SATURATION
    out[small] = 1.0 + 2.0 / np.expm1(2.0 * x[small])
    return out


def np_cycle_grid(omega1, omega2, beta, mu, sigma):
    """Paper-mode (w_net, q2, q4) on flat parameter arrays of equal length."""
    s = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    c = np_coth(0.5 * beta * omega1 * mu)
    k = 0.5 * mu * (1.0 - s) * c
    out = np.empty((omega1.shape[0], 3))
    out[:, 0] = k * (omega2 - omega1)
    out[:, 1] = -k * omega2
    out[:, 2] = k * omega1
    return out


def np_lindblad_rhs(rho, g_down, g_up, freq):
    d = rho.shape[0]
    n = np.arange(d, dtype=float)
    sq = np.sqrt(n)
    up_diag = n + 1.0
    up_diag[-1] = 0.0  # truncated a a^dagger
    out = rho * (
        -0.5 * g_down * (n[:, None] + n[None, :])
        - 0.5 * g_up * (up_diag[:, None] + up_diag[None, :])
    )
    if freq != 0.0:
        out += rho * (-1j * freq * (n[:, None] - n[None, :]))
    hop = sq[1:, None] * sq[None, 1:]
    out[:-1, :-1] += g_down * hop * rho[1:, 1:]
    out[1:, 1:] += g_up * hop * rho[:-1, :-1]
    return out


def np_rk4_lindblad(rho, g_down, g_up, freq, dt, nsteps):
    rho = np.array(rho, dtype=complex, copy=True)
    tr_ref = np.trace(rho).real
    for _ in range(nsteps):
        k1 = np_lindblad_rhs(rho, g_down, g_up, freq)
        k2 = np_lindblad_rhs(rho + 0.5 * dt * k1, g_down, g_up, freq)
        k3 = np_lindblad_rhs(rho + 0.5 * dt * k2, g_down, g_up, freq)
        k4 = np_lindblad_rhs(rho + dt * k3, g_down, g_up, freq)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        if abs(tr - tr_ref) > TRACE_DRIFT_MAX * max(1.0, abs(tr_ref)):
            return rho, STATUS_TRACE
        rho *= tr_ref / tr
        if np.diagonal(rho).real.min() < POSITIVITY_FLOOR:
            return rho, STATUS_POSITIVITY
    return rho, STATUS_OK


def np_kraus_bands(rho, shifts, bands, weights):
    """Sum of w_t K_t rho K_t^dagger where K_t|n> = bands[t, n] |n + shifts[t]>."""
    d = rho.shape[0]
    out = np.zeros_like(rho)
    for t in range(shifts.shape[0]):
        delta = int(shifts[t])
        c = bands[t]
        block = (weights[t] * c)[:, None] * rho * np.conj(c)[None, :]
        if delta >= 0:
            out[delta:, delta:] += block[: d - delta, : d - delta]
        else:
            out[: d + delta, : d + delta] += block[-delta:, -delta:]
    return out


def np_shifted_masks(rho, shifts, masks):
    """Sum over t of rho * masks[t], shifted down the diagonal by shifts[t]."""
    d = rho.shape[0]
    out = np.zeros_like(rho)
    for t in range(shifts.shape[0]):
        delta = int(shifts[t])
        block = rho * masks[t]
        if delta >= 0:
            out[delta:, delta:] += block[: d - delta, : d - delta]
        else:
            out[: d + delta, : d + delta] += block[-delta:, -delta:]
    return out


def np_position_decoherence(rho_x, x, sigma):
    diff = x[:, None] - x[None, :]
    return rho_x * np.exp(-(diff * diff) / (8.0 * sigma * sigma))


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_coth_scalar(x):
        if x > COTH_SATURATION:
            return 1.0
        return 1.0 + 2.0 / math.expm1(2.0 * x)

    @njit(cache=True)
    def nb_cycle_grid(omega1, omega2, beta, mu, sigma):
        m = omega1.shape[0]
        out = np.empty((m, 3))
        root = math.sqrt(2.0 * math.pi)
        for i in range(m):
            s = 1.0 / (sigma[i] * root)
            c = _nb_coth_scalar(0.5 * beta[i] * omega1[i] * mu[i])
            k = 0.5 * mu[i] * (1.0 - s) * c
            out[i, 0] = k * (omega2[i] - omega1[i])
            out[i, 1] = -k * omega2[i]
            out[i, 2] = k * omega1[i]
        return out

    @njit(cache=True)
    def _nb_rhs_into(rho, g_down, g_up, freq, sq, out):
        d = rho.shape[0]
        for m in range(d):
            up_m = m + 1.0 if m < d - 1 else 0.0
            for k in range(d):
                up_k = k + 1.0 if k < d - 1 else 0.0
                r = rho[m, k]
                val = r * (
                    -0.5 * g_down * (m + k)
                    - 0.5 * g_up * (up_m + up_k)
                    - 1j * freq * (m - k)
                )
                if m + 1 < d and k + 1 < d:
                    val += g_down * sq[m + 1] * sq[k + 1] * rho[m + 1, k + 1]
                if m >= 1 and k >= 1:
                    val += g_up * sq[m] * sq[k] * rho[m - 1, k - 1]
                out[m, k] = val

    @njit(cache=True)
    def nb_lindblad_rhs(rho, g_down, g_up, freq):
        d = rho.shape[0]
        sq = np.sqrt(np.arange(d) * 1.0)
        out = np.empty_like(rho)
        _nb_rhs_into(rho, g_down, g_up, freq, sq, out)
        return out

    @njit(cache=True)
    def nb_rk4_lindblad(rho, g_down, g_up, freq, dt, nsteps):
        d = rho.shape[0]
        sq = np.sqrt(np.arange(d) * 1.0)
        y = rho.copy()
        tmp = np.empty_like(y)
        k1 = np.empty_like(y)
        k2 = np.empty_like(y)
        k3 = np.empty_like(y)
        k4 = np.empty_like(y)
        tr_ref = 0.0
        for i in range(d):
            tr_ref += y[i, i].real
        for _ in range(nsteps):
            _nb_rhs_into(y, g_down, g_up, freq, sq, k1)
            for i in range(d):
                for j in range(d):
                    tmp[i, j] = y[i, j] + 0.5 * dt * k1[i, j]
            _nb_rhs_into(tmp, g_down, g_up, freq, sq, k2)
            for i in range(d):
                for j in range(d):
                    tmp[i, j] = y[i, j] + 0.5 * dt * k2[i, j]
            _nb_rhs_into(tmp, g_down, g_up, freq, sq, k3)
            for i in range(d):
                for j in range(d):
                    tmp[i, j] = y[i, j] + dt * k3[i, j]
            _nb_rhs_into(tmp, g_down, g_up, freq, sq, k4)
            tr = 0.0
            for i in range(d):
                for j in range(d):
                    y[i, j] += (dt / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                    )
                tr += y[i, i].real
            if abs(tr - tr_ref) > TRACE_DRIFT_MAX * max(1.0, abs(tr_ref)):
                return y, STATUS_TRACE
            scale = tr_ref / tr
            low = 0.0
            for i in range(d):
                for j in range(d):
                    y[i, j] *= scale
                if y[i, i].real < low:
                    low = y[i, i].real
            if low < POSITIVITY_FLOOR:
                return y, STATUS_POSITIVITY
        return y, STATUS_OK

    @njit(cache=True)
    def nb_kraus_bands(rho, shifts, bands, weights):
        d = rho.shape[0]
        out = np.zeros_like(rho)
        for t in range(shifts.shape[0]):
            delta = shifts[t]
            w = weights[t]
            for i in range(d):
                m = i + delta
                if m < 0 or m >= d:
                    continue
                ci = w * bands[t, i]
                if ci == 0.0:
                    continue
                for j in range(d):
                    n = j + delta
                    if n < 0 or n >= d:
                        continue
                    out[m, n] += ci * rho[i, j] * np.conj(bands[t, j])
        return out

    @njit(cache=True)
    def nb_shifted_masks(rho, shifts, masks):
        d = rho.shape[0]
        out = np.zeros_like(rho)
        for t in range(shifts.shape[0]):
            delta = shifts[t]
            lo = max(0, -delta)
            hi = min(d, d - delta)
            for i in range(lo, hi):
                for j in range(lo, hi):
                    out[i + delta, j + delta] += rho[i, j] * masks[t, i, j]
        return out

    @njit(cache=True)
    def nb_position_decoherence(rho_x, x, sigma):
        d = x.shape[0]
        out = np.empty_like(rho_x)
        inv = 1.0 / (8.0 * sigma * sigma)
        for i in range(d):
            for j in range(d):
                diff = x[i] - x[j]
                out[i, j] = rho_x[i, j] * math.exp(-diff * diff * inv)
        return out

else:
    nb_cycle_grid = None
    nb_lindblad_rhs = None
    nb_rk4_lindblad = None
    nb_kraus_bands = None
    nb_shifted_masks = None
    nb_position_decoherence = None


def _pick(nb, np_):
    return nb if HAVE_NUMBA else np_


cycle_grid = _pick(nb_cycle_grid, np_cycle_grid)
lindblad_rhs = _pick(nb_lindblad_rhs, np_lindblad_rhs)
rk4_lindblad = _pick(nb_rk4_lindblad, np_rk4_lindblad)
kraus_bands = _pick(nb_kraus_bands, np_kraus_bands)
shifted_masks = _pick(nb_shifted_masks, np_shifted_masks)
position_decoherence = _pick(nb_position_decoherence, np_position_decoherence)
