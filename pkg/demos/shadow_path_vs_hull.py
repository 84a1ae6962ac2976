#!/usr/bin/env python3
"""The pivot engine against the geometry it is supposed to trace.

Projects a smoothed polytope onto the plane of two objectives, computes the
shadow polygon by brute force, and checks that the engine's basis sequence
is exactly the counterclockwise hull arc between the two optimal vertices.
"""

import numpy as np

from shadowlp import RngStream, smoothed_instance
from shadowlp.analysis import annulus_integral_bound, boundary_integral, exterior_angles
from shadowlp.oracle import (
    enumerate_feasible_bases,
    hull_arc,
    lp_optimum_oracle,
    shadow_polygon_oracle,
)
from shadowlp.rng import uniform_sphere
from shadowlp.simplex import make_basis, run_shadow_path

gen = RngStream(12).generator()
d, n, sigma = 3, 15, 0.05
dirs = uniform_sphere(gen, d, n)
si = smoothed_instance(
    gen, dirs / np.sqrt(2), np.full(n, 1 / np.sqrt(2)), uniform_sphere(gen, d), sigma
)
inst = si.lp()

bases = enumerate_feasible_bases(inst)
print(f"instance: d={d}, n={n}, sigma={sigma}; {len(bases)} feasible bases")

y = gen.standard_normal(d)  # the random start objective
start = make_basis(inst.A, inst.b, lp_optimum_oracle(inst, y, bases=bases).basis_indices)
path, out = run_shadow_path(inst.A, inst.b, y, si.c, start)
print(f"\nengine path from the y-optimal vertex to the c-optimal vertex "
      f"({path.pivots} pivots):")
for indices, lam in zip(path.index_sequence, path.lambdas):
    print(f"  lambda={lam:.4f}  rows {indices}")

poly = shadow_polygon_oracle(inst, si.c, y, bases=bases)
arc = hull_arc(poly, y, si.c)
print(f"\nshadow polygon has {len(poly.points)} vertices; the hull arc between "
      f"the two optima has {len(arc)} of them")
print("arc equals engine path:", arc == path.index_sequence)

angles = exterior_angles(poly.points)
print(f"\nexterior angles sum to {angles.sum():.9f} (2 pi = {2*np.pi:.9f})")
scale = float(np.linalg.norm(poly.points, axis=1).max())
R, r = 2 * scale, scale / 8
val = boundary_integral(poly.points, R, r)
print(f"annulus-clipped boundary integral of 1/|x|: {val:.4f} "
      f"<= {annulus_integral_bound(R, r):.4f} (bound at R/r = {R/r:.0f})")
