"""Scales and shapes the oracle-backed tests cannot reach.

Certificate re-verification inside solve() is the checker here: these
instances are too big to enumerate, so the tests assert that a verified
outcome comes back at all, across noise levels, conditioning, and
dimensions.
"""

import numpy as np

from shadowlp import RngStream, smoothed_instance, solve
from shadowlp.oracle import enumerate_feasible_bases, lp_optimum_oracle, region_bounded
from shadowlp.rng import uniform_sphere
from shadowlp.solver import Optimal


def test_large_n_across_noise_levels():
    for t in range(12):
        gen = RngStream(60001, t).generator()
        d, n = 4, 200
        sigma = [1e-4, 0.01, 0.3, 1.0][t % 4]
        dirs = uniform_sphere(gen, d, n)
        si = smoothed_instance(
            gen, dirs * np.sqrt(0.75), np.full(n, 0.5), uniform_sphere(gen, d), sigma
        )
        out, stats, path = solve(gen, si)
        assert out.kind in ("optimal", "infeasible", "unbounded")


def test_near_parallel_row_bundle():
    for t in range(8):
        gen = RngStream(60002, t).generator()
        d, n = 3, 40
        dirs = uniform_sphere(gen, d) + 0.05 * gen.standard_normal((n, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs[n // 2:] = uniform_sphere(gen, d, n - n // 2)
        si = smoothed_instance(
            gen, dirs / np.sqrt(2), np.full(n, 1 / np.sqrt(2)),
            uniform_sphere(gen, d), 0.02,
        )
        out, stats, path = solve(gen, si)
        assert out.kind == "optimal"


def test_dimension_eight():
    for t in range(5):
        gen = RngStream(60003, t).generator()
        d, n = 8, 60
        dirs = uniform_sphere(gen, d, n)
        si = smoothed_instance(
            gen, dirs / np.sqrt(2), np.full(n, 1 / np.sqrt(2)),
            uniform_sphere(gen, d), 0.01,
        )
        out, stats, path = solve(gen, si)
        assert isinstance(out, Optimal)


def test_shrunken_rhs_interpolation():
    # rhs well below 1 makes the t=1 slice much smaller than the unit slice,
    # forcing real interpolation walks; small enough to cross-check
    checked = 0
    t = 0
    while checked < 10:
        sub = 0
        while True:
            gen = RngStream(60004, 100 * t + sub).generator()
            d, n = 3, 16
            bbar = gen.uniform(0.03, 0.12, n)
            dirs = uniform_sphere(gen, d, n)
            si = smoothed_instance(
                gen, dirs * np.sqrt(1 - bbar**2)[:, None] * 0.9, bbar,
                uniform_sphere(gen, d), 0.02,
            )
            bases = enumerate_feasible_bases(si.lp())
            if region_bounded(si.lp(), bases):
                break
            sub += 1
        t += 1
        oracle = lp_optimum_oracle(si.lp(), si.c, bases=bases)
        out, stats, path = solve(gen, si)
        assert out.kind == oracle.kind
        if isinstance(out, Optimal):
            ref = si.c @ oracle.x
            assert abs(si.c @ out.x - ref) <= 1e-7 * (1 + abs(ref))
        checked += 1
