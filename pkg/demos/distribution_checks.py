#!/usr/bin/env python3
"""Sampler sanity: closed-form moments and tails versus Monte Carlo.

The e^{-||x||} distribution has norm moments (k+d-1)!/(d-1)! and tail
Pr[||X|| >= 2 e d ln t] <= t^{-d}; uniform sphere points obey the slab
bound Pr[|theta_1| <= a] <= a sqrt(d e); random rotations land in SO(d).
"""

import math

import numpy as np

from shadowlp import RngStream, exp_ball_sample, random_rotation, uniform_sphere

N = 200_000

print("e^{-||x||} distribution, norm moments vs (k+d-1)!/(d-1)!")
for d in (2, 3, 5):
    norms = np.linalg.norm(exp_ball_sample(RngStream(5, d), d, size=N), axis=1)
    for k in (1, 2, 3):
        expected = math.factorial(k + d - 1) / math.factorial(d - 1)
        got = (norms**k).mean()
        print(f"  d={d} k={k}: sample {got:10.3f}  exact {expected:10.3f}")

d, t = 3, 2.0
norms = np.linalg.norm(exp_ball_sample(RngStream(6, 0), d, size=N), axis=1)
cut = 2 * math.e * d * math.log(t)
print(f"\ntail at d={d}, t={t}: Pr[||X|| >= {cut:.2f}] = "
      f"{(norms >= cut).mean():.2e} <= t^-d = {t**-d:.3f}")

d, alpha = 5, 0.05
pts = uniform_sphere(RngStream(7, 0), d, size=N)
print(f"\nsphere slab at d={d}: Pr[|theta_1| <= {alpha}] = "
      f"{(np.abs(pts[:, 0]) <= alpha).mean():.4f} <= {alpha * math.sqrt(d * math.e):.4f}")

gen = RngStream(8, 0).generator()
worst_orth = 0.0
for _ in range(200):
    r = random_rotation(gen, 4)
    worst_orth = max(worst_orth, float(np.abs(r.T @ r - np.eye(4)).max()))
    assert abs(np.linalg.det(r) - 1.0) < 1e-10
print(f"\n200 random rotations in SO(4): max |R^T R - I| = {worst_orth:.2e}, det = 1")
