"""Fast invariant checks run by ``ptmachine selfcheck``."""
from __future__ import annotations

import numpy as np

from . import analytic_cycle as ac
from . import fock_engine as fe
from . import gaussian_engine as ge
from .analytic_cycle import CycleParams, Regime
from .cycle_runner import run_cycle

REF_POINT = CycleParams.with_mu(10.0, omega1=1.0, omega2=2.0, beta=0.2, sigma=0.1)


def _first_law():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(500):
        p = CycleParams.with_mu(
            rng.uniform(1, 20), omega1=rng.uniform(0.5, 2), omega2=rng.uniform(0.5, 4),
            beta=rng.uniform(0.05, 5), sigma=rng.uniform(0.05, 5),
        )
        r = ac.analytic_report(p)
        worst = max(worst, abs(r.first_law_residual) / max(1.0, abs(r.q2)))
    return worst < 1e-12, f"max relative residual {worst:.2e}"


def _otto_limit():
    r = ac.analytic_report(REF_POINT)
    err = abs(-r.w_net / r.q2 - (1 - REF_POINT.omega1 / REF_POINT.omega2))
    return r.regime is Regime.ENGINE and err < 1e-12, f"engine efficiency error {err:.2e}"


def _switch():
    s = ac.sigma_switch()
    below = ac.regime(REF_POINT.replace(sigma=s * (1 - 1e-6)))
    above = ac.regime(REF_POINT.replace(sigma=s * (1 + 1e-6)))
    ok = below is Regime.ENGINE and above is Regime.REFRIGERATOR
    return ok, f"{below.value} -> {above.value} across sigma_s={s:.7f}"


def _backends():
    ref = run_cycle(REF_POINT)
    worst = 0.0
    for backend in ("fock", "gaussian"):
        r = run_cycle(REF_POINT.replace(backend=backend))
        worst = max(worst, abs(r.w_net - ref.w_net), abs(r.q2 - ref.q2), abs(r.q4 - ref.q4))
    return worst < 1e-6, f"max paper-mode deviation {worst:.2e}"


def _channel():
    rho = fe.thermal_state(128, 1.0, 1.0, 1.0)
    out = fe.measurement_channel(rho, 0.5, 1.0, 1.0)
    _, p = fe.quadrature_ops(128, 1.0, 1.0)
    p2 = p @ p
    dp2 = fe.expectation(p2, out) - fe.expectation(p2, rho)
    g = ge.gaussian_measurement_update(ge.thermal_gaussian(1.0, 1.0), 0.5)
    err = max(abs(dp2 - 1.0), abs(out.trace - 1.0), abs(g.cov[1, 1] - ge.thermal_cov(1.0, 1.0)[1, 1] - 1.0))
    return err < 1e-8, f"max channel error {err:.2e}"


def _pt_structure():
    sim = fe.verify_similarity(0.1, 1.0, 64)
    qh = fe.verify_quasi_hermiticity(0.1, 1.0, 64)
    im = float(np.max(np.abs(fe.pt_spectrum(0.1, 1.0, 64)[:16].imag)))
    return max(sim, qh) < 1e-6 and im < 1e-8, f"similarity {sim:.1e}, quasi-Hermiticity {qh:.1e}, max|Im| {im:.1e}"


CHECKS = {
    "first law": _first_law,
    "Otto limit": _otto_limit,
    "regime switch": _switch,
    "backend equivalence": _backends,
    "measurement channel": _channel,
    "PT structure": _pt_structure,
}


def run_all(echo=print) -> bool:
    passed = True
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        passed &= bool(ok)
        echo(f"{'PASS' if ok else 'FAIL'}  {name:<22} {detail}")
    return passed


if __name__ == "__main__":
    raise SystemExit(0 if run_all() else 3)
