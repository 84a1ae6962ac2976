import math

import numpy as np
import pytest

from shadowlp import LPInstance, RngStream
from shadowlp.errors import CertificateInvalid, DimensionTooSmall
from shadowlp.oracle import enumerate_feasible_bases, lp_optimum_oracle
from shadowlp.simplex import make_basis, multipliers
from shadowlp.solver import (
    Infeasible,
    Optimal,
    Phase1Result,
    Phase2Result,
    Unbounded,
    build_unit_lp_prime,
    phase1_solve,
    phase2_solve,
    phase3_solve,
    regular_simplex_directions,
    solve,
    verify_outcome,
)

from helpers import (
    bounded_mixed_instance,
    cube_instance,
    infeasible_instance,
    unbounded_in_c_instance,
)


def test_regular_simplex_directions():
    for d in (3, 4, 6):
        u = regular_simplex_directions(d)
        assert np.allclose(np.linalg.norm(u, axis=1), 1.0)
        assert np.abs(u.sum(axis=0)).max() < 1e-12
        assert np.abs(u[:, d - 1]).max() == 0.0
        gram = u @ u.T
        off = gram[~np.eye(d, dtype=bool)]
        assert np.allclose(off, -1.0 / (d - 1))


def test_build_unit_lp_prime_geometry():
    gen = RngStream(40, 0).generator()
    A = cube_instance().A
    ulp = build_unit_lp_prime(gen, A, sigma=0.0)
    radius = 1.0 / (10.0 * math.sqrt(math.log(3)))
    assert abs(radius - 0.09541) < 5e-5
    # all unperturbed points sit on the plane {e_3 . x = 3}
    assert np.allclose(ulp.s_bar[:, 2], 3.0)
    assert np.allclose(np.linalg.norm(ulp.s_bar - 3.0 * np.eye(3)[2], axis=1), radius)


def test_unperturbed_artificial_start_is_valid():
    from shadowlp.solver import _artificial_start

    gen = RngStream(41, 0).generator()
    A = cube_instance().A
    for _ in range(20):
        ulp = build_unit_lp_prime(gen, A, sigma=0.0)
        start = _artificial_start(ulp)
        assert start is not None
        mu = multipliers(start, ulp.start_objective)
        assert mu.min() >= -1e-9


def test_start_construction_success_rate():
    # d=5, sigma=0.01, rows of norm <= 2: at least 85% of trials produce a
    # feasible, objective-optimal artificial basis
    from shadowlp.rng import uniform_sphere
    from shadowlp.solver import _artificial_start

    gen = RngStream(42, 0).generator()
    d, n, sigma = 5, 20, 0.01
    ok = 0
    trials = 1000
    for _ in range(trials):
        A = 2.0 * uniform_sphere(gen, d, n) * gen.uniform(0.0, 1.0, (n, 1))
        if _artificial_start(build_unit_lp_prime(gen, A, sigma)) is not None:
            ok += 1
    assert ok / trials >= 0.85


def test_dimension_too_small():
    gen = RngStream(43, 0).generator()
    with pytest.raises(DimensionTooSmall):
        build_unit_lp_prime(gen, np.eye(2), 0.01)


def test_phase1_box_matches_unit_oracle():
    gen = RngStream(44, 0).generator()
    A = cube_instance().A
    res = phase1_solve(gen, A, sigma=0.01)
    assert isinstance(res, Phase1Result)
    unit = LPInstance(A, np.ones(6), res.z)
    oracle = lp_optimum_oracle(unit, res.z)
    assert isinstance(oracle, Optimal)
    assert np.allclose(res.basis.x, oracle.x, atol=1e-8)


def test_phase1_handles_zero_row():
    gen = RngStream(45, 0).generator()
    A = np.vstack([cube_instance().A, np.zeros(3)])
    res = phase1_solve(gen, A, sigma=0.01)
    assert isinstance(res, Phase1Result)
    oracle = lp_optimum_oracle(LPInstance(A, np.ones(7), res.z), res.z)
    assert np.allclose(res.basis.x, oracle.x, atol=1e-8)


def test_phase2_all_ones_rhs_returns_unit_basis():
    gen = RngStream(46, 0).generator()
    inst = cube_instance(c=np.array([0.3, -1.0, 0.5]))
    res1 = phase1_solve(gen, inst.A, sigma=0.01)
    res2 = phase2_solve(gen, inst, res1.basis, res1.z)
    assert isinstance(res2, Phase2Result)
    assert res2.basis.indices == res1.basis.indices
    assert res2.pivots == 0


def test_phase2_infeasible_with_farkas():
    gen = RngStream(47, 0).generator()
    # b = -1: 0 is strictly infeasible; oracle confirms by enumeration
    A = cube_instance().A
    inst = LPInstance(A, -np.ones(6), np.array([1.0, 0.0, 0.0]))
    assert isinstance(lp_optimum_oracle(inst, inst.c), Infeasible)
    res1 = phase1_solve(gen, A, sigma=0.01)
    out = phase2_solve(gen, inst, res1.basis, res1.z)
    assert isinstance(out, Infeasible)
    y = out.certificate
    assert y.min() >= 0.0
    assert np.abs(y @ inst.A).max() <= 1e-8 * np.abs(y).sum()
    assert y @ inst.b < -1e-10


def test_phase2_basis_is_z_optimal():
    gen = RngStream(48, 0).generator()
    done = 0
    while done < 30:
        si, bases = bounded_mixed_instance(gen, 3, 12, 0.05)
        inst = si.lp()
        oracle = lp_optimum_oracle(inst, inst.c, bases=bases)
        if not isinstance(oracle, Optimal):
            continue
        res1 = phase1_solve(gen, inst.A, sigma=min(si.sigma, 0.02))
        if isinstance(res1, Unbounded):
            continue
        res2 = phase2_solve(gen, inst, res1.basis, res1.z)
        assert isinstance(res2, Phase2Result)
        z_oracle = lp_optimum_oracle(inst, res1.z, bases=bases)
        assert isinstance(z_oracle, Optimal)
        assert abs(res1.z @ res2.basis.x - res1.z @ z_oracle.x) <= 1e-7 * (
            1 + abs(res1.z @ z_oracle.x)
        )
        done += 1


def test_phase3_parallel_objective_zero_pivots():
    gen = RngStream(49, 0).generator()
    inst = cube_instance()
    res1 = phase1_solve(gen, inst.A, sigma=0.01)
    res2 = phase2_solve(gen, inst, res1.basis, res1.z)
    parallel = LPInstance(inst.A, inst.b, 2.0 * res1.z)
    outcome, paths = phase3_solve(parallel, res2.basis, res1.z)
    assert isinstance(outcome, Optimal)
    assert sum(p.pivots for p in paths) == 0


def test_phase3_antipodal_objective():
    gen = RngStream(50, 0).generator()
    si, bases = bounded_mixed_instance(gen, 3, 14, 0.05)
    inst = si.lp()
    oracle = lp_optimum_oracle(inst, inst.c, bases=bases)
    if not isinstance(oracle, Optimal):
        pytest.skip("drew an infeasible instance")
    res1 = phase1_solve(gen, inst.A, sigma=0.02)
    res2 = phase2_solve(gen, inst, res1.basis, res1.z)
    anti = LPInstance(inst.A, inst.b, -res1.z)
    outcome, paths = phase3_solve(anti, res2.basis, res1.z)
    assert isinstance(outcome, Optimal)
    anti_oracle = lp_optimum_oracle(anti, anti.c, bases=bases)
    assert abs(anti.c @ outcome.x - anti.c @ anti_oracle.x) <= 1e-7 * (
        1 + abs(anti.c @ anti_oracle.x)
    )


def test_solve_box():
    inst = cube_instance(c=np.array([1.0, 0.3, -0.2]))
    out, stats, path = solve(RngStream(51, 0), inst)
    assert isinstance(out, Optimal)
    assert np.allclose(out.x, [1.0, 1.0, -1.0])
    assert stats.pivots_total == stats.pivots_phase1 + stats.pivots_phase2 + stats.pivots_phase3


def test_solve_infeasible_sandwich():
    gen = RngStream(52, 0).generator()
    inst = infeasible_instance(gen, 3, 9)
    assert isinstance(lp_optimum_oracle(inst, inst.c), Infeasible)
    out, stats, path = solve(RngStream(52, 1), inst)
    assert isinstance(out, Infeasible)
    verify_outcome(inst, out)


def test_solve_unbounded_in_c():
    gen = RngStream(53, 0).generator()
    inst = unbounded_in_c_instance(gen, 3, 12)
    out, stats, path = solve(RngStream(53, 1), inst)
    assert isinstance(out, Unbounded)
    ray = out.ray / np.linalg.norm(out.ray)
    assert (inst.A @ ray).max() <= 1e-9
    assert inst.c @ ray > 0


def test_verify_outcome_rejects_bad_certificates():
    inst = cube_instance()
    with pytest.raises(CertificateInvalid):
        verify_outcome(inst, Optimal(basis_indices=(0, 2, 4), x=np.array([2.0, 0.0, 0.0])))
    with pytest.raises(CertificateInvalid):
        verify_outcome(inst, Unbounded(ray=np.array([1.0, 0.0, 0.0])))
    with pytest.raises(CertificateInvalid):
        verify_outcome(inst, Infeasible(certificate=np.ones(6)))
    # a correct optimal certificate passes
    bases = enumerate_feasible_bases(inst)
    oracle = lp_optimum_oracle(inst, inst.c, bases=bases)
    verify_outcome(inst, oracle)


def test_solve_rejects_small_dimension():
    A = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    inst = LPInstance(A, np.ones(4), np.array([1.0, 0.0]))
    with pytest.raises(DimensionTooSmall):
        solve(RngStream(54, 0), inst)


def test_interpolation_slice_matches_unit_region():
    # membership of unit-system-feasible points at t=0 in the lifted system,
    # and of lifted t=0 points in the unit system
    from shadowlp.solver import build_interpolation_lp

    gen = RngStream(55, 0).generator()
    si, _ = bounded_mixed_instance(gen, 3, 14, 0.05)
    inst = si.lp()
    ilp = build_interpolation_lp(inst.A, inst.b)
    checked = 0
    while checked < 100:
        x = gen.uniform(-2.0, 2.0, 3)
        unit_ok = np.all(inst.A @ x <= 1.0)
        lifted_ok = np.all(ilp.A @ np.append(x, 0.0) <= ilp.b)
        assert unit_ok == lifted_ok
        checked += 1


def test_pivot_limit_exceeded():
    from shadowlp.errors import PivotLimitExceeded
    from shadowlp.simplex import run_shadow_path as run

    gen = RngStream(56, 0).generator()
    si, bases = bounded_mixed_instance(gen, 3, 14, 0.05)
    inst = si.lp()
    y = gen.standard_normal(3)
    opt = lp_optimum_oracle(inst, y, bases=bases)
    start = make_basis(inst.A, inst.b, opt.basis_indices)
    ref, _ = run(inst.A, inst.b, y, inst.c, start)
    if ref.pivots < 2:
        pytest.skip("path too short to exercise the cap")
    with pytest.raises(PivotLimitExceeded):
        run(inst.A, inst.b, y, inst.c, start, limit=ref.pivots - 1)


def test_solve_accepts_smoothed_instance():
    gen = RngStream(57, 0).generator()
    si, bases = bounded_mixed_instance(gen, 3, 12, 0.05)
    oracle = lp_optimum_oracle(si.lp(), si.c, bases=bases)
    out, stats, path = solve(RngStream(57, 1), si)  # not just LPInstance
    assert out.kind == oracle.kind
