"""Acceptance suite: one test per criterion, each reporting PASS or FAIL.

Run with ``pytest -s tests/test_acceptance.py`` to see the verdict lines as
they happen; they are repeated in the terminal summary either way.
"""
import contextlib
import math
import time

import numpy as np
import pytest

from ptmachine import analytic_cycle as ac
from ptmachine import bath_models as bm
from ptmachine import fock_engine as fe
from ptmachine import gaussian_engine as ge
from ptmachine.analytic_cycle import CycleParams, Mode, Regime
from ptmachine.cycle_runner import run_cycle, stroke_occupancies
from ptmachine.pt_params import thermal_occupancy
from oracles import (
    kraus_quadrature_measurement,
    mp_cycle,
    p_squared,
    propagate_exact,
    random_density,
    trace_norm_distance,
)

VERDICTS = {}

REF_POINT = CycleParams.with_mu(10.0, omega1=1.0, omega2=2.0, beta=0.2, sigma=0.1)


@contextlib.contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException as exc:
        line = f"FAIL criterion {number}: {title} ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        VERDICTS[number] = line
        print("\n" + line)
        raise
    line = f"PASS criterion {number}: {title}"
    VERDICTS[number] = line
    print("\n" + line)


def random_grid(n=10_000, seed=101):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(0.5, 2.0, n),
        rng.uniform(0.5, 4.0, n),
        rng.uniform(0.05, 5.0, n),
        rng.uniform(1.0, 20.0, n),
        rng.uniform(0.05, 5.0, n),
    )


def test_criterion_01_first_law():
    with criterion(1, "first law over a 10^4-point random grid, relative 1e-12"):
        w1, w2, b, mu, s = random_grid()
        worst = 0.0
        for i in range(len(w1)):
            p = CycleParams.with_mu(mu[i], omega1=w1[i], omega2=w2[i], beta=b[i], sigma=s[i])
            r = ac.analytic_report(p)
            scale = max(abs(r.w_net), abs(r.q2), abs(r.q4))
            worst = max(worst, abs(r.w_net + r.q2 + r.q4) / scale)
        flows = ac.analytic_grid(w1, w2, b, mu, s)
        grid_worst = float(np.max(np.abs(flows.sum(axis=-1)) / np.max(np.abs(flows), axis=-1)))
        print(f"  max relative residual: reports {worst:.2e}, vectorised grid {grid_worst:.2e}")
        assert worst < 1e-12
        assert grid_worst < 1e-12


def test_criterion_02_otto_limit():
    with criterion(2, "Otto efficiency and COP at every engine/refrigerator grid point, 1e-12"):
        w1, w2, b, mu, s = random_grid()
        eta_err = cop_err = 0.0
        counts = {Regime.ENGINE: 0, Regime.REFRIGERATOR: 0, Regime.OTHER: 0}
        for i in range(len(w1)):
            p = CycleParams.with_mu(mu[i], omega1=w1[i], omega2=w2[i], beta=b[i], sigma=s[i])
            r = ac.analytic_report(p)
            counts[r.regime] += 1
            if r.regime is Regime.ENGINE:
                eta_err = max(eta_err, abs(-r.w_net / r.q2 - (1 - w1[i] / w2[i])))
            elif r.regime is Regime.REFRIGERATOR:
                cop_err = max(cop_err, abs(r.q4 / r.w_net - w1[i] / (w2[i] - w1[i])))
        print(f"  {counts[Regime.ENGINE]} engine points, max error {eta_err:.2e}")
        print(f"  {counts[Regime.REFRIGERATOR]} refrigerator points, max error {cop_err:.2e}")
        assert counts[Regime.ENGINE] > 100 and counts[Regime.REFRIGERATOR] > 1000
        assert eta_err < 1e-12
        assert cop_err < 1e-12


def test_criterion_03_regime_switch():
    with criterion(3, "engine to refrigerator exactly across sigma_s +- 1e-9"):
        s_switch = ac.sigma_switch()
        assert s_switch == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
        tested = 0
        for omega1, omega2 in ((1.0, 2.0), (0.5, 4.0), (1.9, 2.0)):
            for beta in (0.05, 0.2, 1.0, 5.0):
                for mu in (1.0, 2.0, 10.0, 20.0):
                    p = CycleParams.with_mu(mu, omega1=omega1, omega2=omega2, beta=beta)
                    below = ac.regime(p.replace(sigma=s_switch - 1e-9))
                    above = ac.regime(p.replace(sigma=s_switch + 1e-9))
                    assert below is Regime.ENGINE, (omega1, omega2, beta, mu)
                    assert above is Regime.REFRIGERATOR, (omega1, omega2, beta, mu)
                    tested += 1
        print(f"  {tested} (omega1, omega2, beta, mu) combinations flip at sigma_s = {s_switch!r}")


def test_criterion_04_reference_point():
    with criterion(4, "reference point W=-19.6267, Q2=39.2534, Q4=-19.6267, each +-1e-3"):
        r = ac.analytic_report(REF_POINT)
        ref = mp_cycle(1.0, 2.0, 0.2, 10.0, 0.1)
        print(f"  computed W={r.w_net!r} Q2={r.q2!r} Q4={r.q4!r}")
        print(f"  40-digit reference W={float(ref[4])!r} Q2={float(ref[5])!r} Q4={float(ref[6])!r}")
        for got, want, name in ((r.w_net, -19.6267, "W_net"), (r.q2, 39.2534, "Q2"), (r.q4, -19.6267, "Q4")):
            assert abs(got - want) <= 1e-3, f"{name}={got!r} differs from {want} by {abs(got - want):.2e}"


def test_criterion_05_monotone_in_mu():
    with criterion(5, "Q2 and |W_net| strictly increase over mu in [1, 15]"):
        mus = np.linspace(1.0, 15.0, 100)
        for sigma in (0.1, 0.2):
            flows = ac.analytic_grid(1.0, 2.0, 0.2, mus, sigma)
            assert np.all(np.diff(flows[:, 1]) > 0), sigma
            assert np.all(np.diff(np.abs(flows[:, 0])) > 0), sigma
            reports = [ac.analytic_report(REF_POINT.replace(mu=m, sigma=sigma)) for m in mus]
            assert all(b.q2 > a.q2 for a, b in zip(reports, reports[1:]))
            assert all(abs(b.w_net) > abs(a.w_net) for a, b in zip(reports, reports[1:]))


def test_criterion_06_backend_equivalence():
    with criterion(6, "Fock (dim 128) and Gaussian backends match analytic to 1e-6 in under 60 s"):
        start = time.perf_counter()
        ref = ac.analytic_report(REF_POINT)
        s = ac.measurement_factor(REF_POINT.sigma)
        for p in (REF_POINT.replace(backend="fock", fock_dim=128), REF_POINT.replace(backend="gaussian")):
            r = run_cycle(p)
            assert r.regime is ref.regime
            for name in ("u0", "u1", "u2", "u3", "w_net", "q2", "q4", "merit", "first_law_residual"):
                assert abs(getattr(r, name) - getattr(ref, name)) < 1e-6, (p.backend, name)
            assert abs(r.u3 - s * r.u0) < 1e-6
            print(f"  {p.backend.value}: max deviation "
                  f"{max(abs(getattr(r, k) - getattr(ref, k)) for k in ('u0', 'u1', 'u2', 'u3', 'q4')):.2e}")
        elapsed = time.perf_counter() - start
        print(f"  runtime {elapsed:.1f} s")
        assert elapsed < 60.0


def test_criterion_07_measurement_channel():
    with criterion(7, "measurement channel vs 801-node Kraus quadrature; momentum kick; trace; Q2 >= 0"):
        for beta, omega, mu in ((1.0, 1.0, 1.0), (2.0, 2.0, 2.0)):
            for sigma in (0.1, 0.5, 1.0):
                dim = 512 if sigma < 0.2 else 128
                tol = 1e-8 if sigma < 0.2 else 1e-10
                rho = fe.thermal_state(dim, beta, omega, mu)
                out = fe.measurement_channel(rho, sigma, omega, mu, tol=tol)
                ref = kraus_quadrature_measurement(rho.matrix, sigma, omega, mu, nodes=801)
                dist = trace_norm_distance(out.matrix, ref)
                p2 = p_squared(dim, omega, mu)
                kick = np.trace(p2 @ out.matrix).real - np.trace(p2 @ rho.matrix).real
                heat = fe.energy(out, omega, mu) - fe.energy(rho, omega, mu)
                print(f"  beta={beta} sigma={sigma} d={dim}: trace distance {dist:.1e}, "
                      f"kick error {abs(kick - 1 / (4 * sigma**2)):.1e}, heat {heat:.4g}")
                assert dist < 1e-6
                assert abs(kick - 1 / (4 * sigma**2)) < 1e-6
                assert abs(out.trace - 1.0) < 1e-8
                assert heat >= 0.0

        cases = (("analytic", 0.1, 10.0, 0.2), ("gaussian", 0.1, 10.0, 0.2), ("fock", 1.0, 2.0, 0.2),
                 ("fock", 0.5, 1.0, 1.0), ("gaussian", 5.0, 1.0, 0.2))
        for backend, sigma, mu, beta in cases:
            p = REF_POINT.replace(backend=backend, measurement_mode=Mode.CHANNEL, sigma=sigma, mu=mu, beta=beta)
            assert run_cycle(p).q2 >= 0.0, (backend, sigma, mu, beta)
        w1, w2, b, mu, s = random_grid(2000, seed=7)
        for i in range(len(w1)):
            p = CycleParams.with_mu(mu[i], omega1=w1[i], omega2=w2[i], beta=b[i], sigma=s[i],
                                    measurement_mode="channel")
            assert ac.analytic_report(p).q2 >= 0.0


def test_criterion_08_pt_structure():
    with criterion(8, "PT similarity and quasi-Hermiticity < 1e-6 at dim 64, shrinking from 32; real low spectrum"):
        dims = (32, 48, 64)
        sim = [fe.verify_similarity(0.1, 1.0, d) for d in dims]
        qh = [fe.verify_quasi_hermiticity(0.1, 1.0, d) for d in dims]
        print(f"  similarity {['%.1e' % v for v in sim]}, quasi-Hermiticity {['%.1e' % v for v in qh]}")
        assert sim[-1] < 1e-6 and qh[-1] < 1e-6
        assert all(b < a for a, b in zip(sim, sim[1:]))
        assert all(b < a for a, b in zip(qh, qh[1:]))
        lam = fe.pt_spectrum(0.1, 1.0, 64)[:16]
        print(f"  max |Im| over lowest 16 eigenvalues {np.max(np.abs(lam.imag)):.1e}")
        assert np.max(np.abs(lam.imag)) < 1e-8


def _random_gaussian(rng):
    r = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    sq = rot @ np.diag([np.exp(r), np.exp(-r)]) @ rot.T
    cov = (rng.uniform(0, 3) + 0.5) * sq @ sq.T
    return ge.GaussianState(rng.normal(size=2), cov)


def test_criterion_09_thermalization():
    with criterion(9, "collisional and Lindblad baths reach N(beta, omega1, mu) from 20 random states; RK4 order 4"):
        beta, omega, mu, dim = 0.2, 1.0, 10.0, 40
        target = thermal_occupancy(beta, omega, mu)
        cfg = bm.BathConfig(occupancy=target, convergence_tol=1e-8)
        number = np.arange(dim)
        rng = np.random.default_rng(2024)
        worst_fock = worst_pair = worst_gauss = 0.0
        for _ in range(20):
            rho0 = random_density(dim, rng)
            lind, _ = bm.thermalize(rho0, omega, cfg, "lindblad", mu=mu)
            coll, _ = bm.thermalize(rho0, omega, cfg, "collisional", mu=mu)
            n_lind, n_coll = lind.populations @ number, coll.populations @ number
            worst_fock = max(worst_fock, abs(n_lind - target), abs(n_coll - target))
            worst_pair = max(worst_pair, abs(n_lind - n_coll))

            g0 = _random_gaussian(rng)
            g_lind, _ = bm.thermalize(g0, omega, cfg, "lindblad", mu=mu)
            g_coll, _ = bm.thermalize(g0, omega, cfg, "collisional", mu=mu)
            a, b = ge.gaussian_occupancy(g_lind, omega, mu), ge.gaussian_occupancy(g_coll, omega, mu)
            worst_gauss = max(worst_gauss, abs(a - target), abs(b - target), abs(a - b))
        print(f"  Fock occupancy error {worst_fock:.1e}, method gap {worst_pair:.1e}; Gaussian {worst_gauss:.1e}")
        assert worst_fock < 1e-6 and worst_pair < 1e-6 and worst_gauss < 1e-6

        small = bm.BathConfig(gamma=1.0, occupancy=0.5)
        rho0 = random_density(8, np.random.default_rng(5))
        exact = propagate_exact(rho0, small.rate_down, small.rate_up, 1.0, 1.0)
        errors = []
        for dt in (0.05, 0.025):
            rho = rho0
            for _ in range(round(1.0 / dt)):
                rho = bm.rk4_step(rho, 1.0, small, dt).matrix
            errors.append(np.max(np.abs(rho - exact)))
        ratio = errors[0] / errors[1]
        print(f"  RK4 global error {errors[0]:.2e} -> {errors[1]:.2e}, ratio {ratio:.2f}")
        assert 13.0 <= ratio <= 19.0


def test_criterion_10_effective_temperature():
    with criterion(10, "(beta, mu) and (mu beta, 1) share the bath-occupancy pathway to 1e-12"):
        for beta, mu in ((0.2, 10.0), (0.05, 3.0), (1.0, 1.7), (0.5, 20.0)):
            a = REF_POINT.replace(beta=beta, mu=mu, sigma=0.3)
            b = REF_POINT.replace(beta=mu * beta, mu=1.0, sigma=0.3)
            assert b.mu == 1.0
            n_a = thermal_occupancy(a.beta, a.omega1, a.mu)
            n_b = thermal_occupancy(b.beta, b.omega1, b.mu)
            assert abs(n_a - n_b) <= 1e-12 * max(1.0, n_b)
            assert bm.BathConfig.from_params(a).occupancy == pytest.approx(
                bm.BathConfig.from_params(b).occupancy, rel=1e-12, abs=1e-12)
            pops_a = fe.thermal_state(512, a.beta, a.omega1, a.mu).populations
            pops_b = fe.thermal_state(512, b.beta, b.omega1, b.mu).populations
            assert np.max(np.abs(pops_a - pops_b)) < 1e-12
            g_a = ge.gaussian_occupancy(ge.thermal_gaussian(a.beta, a.omega1, a.mu), a.omega1, a.mu)
            g_b = ge.gaussian_occupancy(ge.thermal_gaussian(b.beta, b.omega1, b.mu), b.omega1, b.mu)
            assert abs(g_a - g_b) <= 1e-12 * max(1.0, g_b)

            for sigma in (0.1, 0.3, 2.0):
                ra = ac.analytic_report(a.replace(sigma=sigma))
                rb = ac.analytic_report(b.replace(sigma=sigma))
                assert ra.regime is rb.regime
                if ra.regime is not Regime.OTHER:
                    assert abs(ra.merit - rb.merit) < 1e-12
                occ_a = stroke_occupancies(ra, a.replace(sigma=sigma))
                occ_b = stroke_occupancies(rb, b.replace(sigma=sigma))
                assert np.max(np.abs(np.subtract(occ_a, occ_b))) <= 1e-12 * max(1.0, max(occ_b))
                for name in ("u0", "u1", "u2", "u3", "w_net", "q2", "q4"):
                    x, y = getattr(ra, name), mu * getattr(rb, name)
                    assert abs(x - y) <= 1e-12 * max(1.0, abs(y)), name
