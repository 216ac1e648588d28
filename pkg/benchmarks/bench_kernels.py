"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--dim 128] [--repeat 5]

Both paths are imported from the same module, so a single run compares them
regardless of PTMACHINE_DISABLE_NUMBA. Results are checked for agreement
before timing.
"""
import argparse
import time

import numpy as np

from ptmachine import _kernels as K
from ptmachine.bath_models import collision_masks
from ptmachine.fock_engine import position_basis


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile on the numba side)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(dim, rng):
    rho = random_density(dim, rng)
    n = 200_000
    grid = [rng.uniform(0.5, 2, n), rng.uniform(0.5, 4, n), rng.uniform(0.05, 5, n),
            rng.uniform(1, 20, n), rng.uniform(0.05, 5, n)]
    shifts, masks = collision_masks(dim, 0.5, 0.2)
    x, _ = position_basis(dim, 1.0)
    x = np.ascontiguousarray(x)
    yield "cycle_grid (2e5 pts)", (K.np_cycle_grid, K.nb_cycle_grid), grid
    yield f"lindblad_rhs d={dim}", (K.np_lindblad_rhs, K.nb_lindblad_rhs), (rho, 1.5, 0.5, 0.0)
    yield f"rk4 x50 d={dim}", (K.np_rk4_lindblad, K.nb_rk4_lindblad), (rho, 1.5, 0.5, 0.0, 1e-3, 50)
    yield f"shifted_masks d={dim}", (K.np_shifted_masks, K.nb_shifted_masks), (rho, shifts, masks)
    yield f"decoherence d={dim}", (K.np_position_decoherence, K.nb_position_decoherence), (rho, x, 0.3)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if K.nb_lindblad_rhs is None:
        raise SystemExit("numba unavailable (or disabled); nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (f_np, f_nb), call in cases(args.dim, rng):
        a, b = f_np(*call), f_nb(*call)
        if isinstance(a, tuple):
            a, b = a[0], b[0]
        np.testing.assert_allclose(b, a, rtol=1e-10, atol=1e-13)
        t_np = best_of(lambda: f_np(*call), args.repeat)
        t_nb = best_of(lambda: f_nb(*call), args.repeat)
        print(f"{name:<24}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
