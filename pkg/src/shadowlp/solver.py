"""Three-phase shadow-vertex LP solver.

Phase 1 solves the unit system max z^T x, Ax <= 1 for a random Gaussian
objective z, starting from a basis of d artificial constraints built around
a randomly rotated simplex; construction or acceptance failures rebuild
with fresh randomness.  Phase 2 lifts to the interpolation system
Ax + (1-b)t <= 1, enters at the phase-1 basis edge, and walks the shadow
path toward maximizing t until an edge crosses the t = 1 slice (whose
tight rows form a z-optimal feasible basis of the input LP) or until the
t-maximum proves the input infeasible, in which case the optimal basis
multipliers convert into a Farkas certificate.  Phase 3 follows the
shadow path from z to the input objective c.

All certificates are re-verified numerically before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import linalg
from .errors import (
    CertificateInvalid,
    CycleDetected,
    DimensionTooSmall,
    NumericalStall,
    PivotLimitExceeded,
    RestartLimitExceeded,
    SingularError,
)
from .rng import as_generator
from .simplex import (
    DEFAULT_PIVOT_LIMIT,
    TOL_DIR,
    TOL_FEAS,
    TOL_OPT,
    Basis,
    Finished,
    ShadowPath,
    UnboundedRay,
    make_basis,
    max_lambda,
    multipliers,
    ratio_test,
    run_shadow_path,
)

DEFAULT_MAX_RESTARTS = 64


# ---------------------------------------------------------------------------
# Outcomes


@dataclass(frozen=True)
class Optimal:
    basis_indices: tuple[int, ...]
    x: np.ndarray

    kind = "optimal"


@dataclass(frozen=True)
class Unbounded:
    ray: np.ndarray
    # False when the ray only certifies an unbounded feasible region rather
    # than unboundedness of the objective (possible for rays surfacing in
    # phases 1-2, whose certifying objective is the random z).
    improves_objective: bool = True

    kind = "unbounded"


@dataclass(frozen=True)
class Infeasible:
    certificate: Optional[np.ndarray]  # y >= 0, y^T A = 0, y^T b < 0

    kind = "infeasible"


SolveOutcome = Union[Optimal, Unbounded, Infeasible]


def verify_outcome(inst, outcome: SolveOutcome, require_improving: bool = True) -> None:
    """Re-check an outcome's certificate against the instance, independently
    of how it was produced.  Raises CertificateInvalid on any violation."""
    A, b, c = inst.A, inst.b, inst.c
    if isinstance(outcome, Optimal):
        resid = (A @ outcome.x - b).max()
        if resid > TOL_FEAS:
            raise CertificateInvalid(f"optimal point infeasible by {resid:.3e}")
        f = linalg.factorize(A[list(outcome.basis_indices)])
        mu = linalg.solve_transpose(f, c)
        if mu.min() < -TOL_OPT * max(1.0, float(np.linalg.norm(c))):
            raise CertificateInvalid(f"optimality multiplier {mu.min():.3e}")
    elif isinstance(outcome, Unbounded):
        norm = float(np.linalg.norm(outcome.ray))
        if norm == 0.0:
            raise CertificateInvalid("zero unbounded ray")
        r = outcome.ray / norm
        row_scale = np.maximum(1.0, np.linalg.norm(A, axis=1))
        bad = (A @ r) / row_scale
        if bad.max() > 1e-9:
            raise CertificateInvalid(f"ray leaves recession cone by {bad.max():.3e}")
        gain = float(c @ r)
        if require_improving and gain <= 0.0:
            raise CertificateInvalid(f"ray does not improve objective (c.r = {gain:.3e})")
    elif isinstance(outcome, Infeasible):
        y = outcome.certificate
        if y is None:
            raise CertificateInvalid("missing Farkas certificate")
        if y.min() < -1e-12:
            raise CertificateInvalid(f"certificate has negative entry {y.min():.3e}")
        y = np.clip(y, 0.0, None)
        l1 = float(np.abs(y).sum())
        if l1 == 0.0:
            raise CertificateInvalid("zero Farkas certificate")
        combo = np.abs(y @ A).max()
        if combo > 1e-8 * l1:
            raise CertificateInvalid(f"y^T A = {combo:.3e} exceeds 1e-8 * ||y||_1")
        if y @ b >= -1e-10:
            raise CertificateInvalid(f"y^T b = {y @ b:.3e} not negative")
    else:
        raise TypeError(f"unknown outcome {outcome!r}")


# ---------------------------------------------------------------------------
# Phase 1: unit system with artificial starting constraints


def regular_simplex_directions(d: int) -> np.ndarray:
    """d unit vectors orthogonal to e_d forming a regular simplex around 0.

    Rows sum to zero, have unit norm, pairwise inner products -1/(d-1), and
    last coordinate exactly 0.
    """
    # e_i - 1/d are the vertices of a regular simplex in the hyperplane 1^perp
    verts = np.eye(d) - np.full((d, d), 1.0 / d)
    q, _ = np.linalg.qr(np.ones((d, 1)), mode="complete")
    coords = verts @ q[:, 1:]  # coordinates in an orthonormal basis of 1^perp
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    out = np.zeros((d, d))
    out[:, : d - 1] = coords
    return out


@dataclass(frozen=True)
class UnitLpPrime:
    """The unit system plus d artificial rows (R s_i)^T x <= 1."""

    A: np.ndarray
    sigma: float
    s_bar: np.ndarray        # (d, d), unperturbed artificial points
    s: np.ndarray            # (d, d), perturbed
    rotation: np.ndarray     # (d, d) member of SO(d)
    z: np.ndarray            # random objective
    combined_A: np.ndarray   # (n + d, d)
    combined_b: np.ndarray   # all ones

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def artificial_indices(self) -> tuple[int, ...]:
        return tuple(range(self.n, self.n + self.d))

    @property
    def start_objective(self) -> np.ndarray:
        return self.rotation[:, self.d - 1]  # R e_d


def build_unit_lp_prime(rng, A: np.ndarray, sigma: float) -> UnitLpPrime:
    """Append d artificial constraints around a rotated simplex.

    The unperturbed points sit on the hyperplane {x : e_d^T x = 3} at
    distance 1/(10*sqrt(ln d)) from 3 e_d, are perturbed with standard
    deviation sigma, and are rotated by a fresh Haar rotation.  The basic
    solution of the artificial rows is feasible and optimal for the rotated
    objective R e_d with constant probability.
    """
    A = np.asarray(A, dtype=float)
    n, d = A.shape
    if d < 3:
        raise DimensionTooSmall(f"artificial basis construction needs d >= 3, got {d}")
    gen = as_generator(rng)
    radius = 1.0 / (10.0 * np.sqrt(np.log(d)))
    s_bar = 3.0 * np.eye(d)[d - 1] + radius * regular_simplex_directions(d)
    s = s_bar + sigma * gen.standard_normal((d, d))
    from .rng import random_rotation  # local import to avoid cycle at module load

    rot = random_rotation(gen, d)
    rows = s @ rot.T  # row i is (R s_i)^T
    z = gen.standard_normal(d)
    combined_A = np.vstack([A, rows])
    combined_b = np.ones(n + d)
    return UnitLpPrime(
        A=A, sigma=float(sigma), s_bar=s_bar, s=s, rotation=rot, z=z,
        combined_A=combined_A, combined_b=combined_b,
    )


@dataclass
class Phase1Result:
    basis: Basis          # basis of the unit system Ax <= 1, optimal for z
    z: np.ndarray
    attempts: int
    pivots: int


def _artificial_start(ulp: UnitLpPrime) -> Optional[Basis]:
    """Basis of the artificial rows, or None when construction failed."""
    try:
        basis = make_basis(ulp.combined_A, ulp.combined_b, ulp.artificial_indices)
    except SingularError:
        return None
    if (ulp.A @ basis.x).max() > 1.0 + TOL_FEAS:
        return None
    mu = multipliers(basis, ulp.start_objective)
    if mu.min() < -TOL_OPT:
        return None
    return basis


def phase1_solve(
    rng,
    A: np.ndarray,
    sigma: float,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
) -> Union[Phase1Result, Unbounded]:
    """Solve max z^T x, Ax <= 1 for a fresh Gaussian z.

    Rebuilds the artificial system with fresh randomness whenever the
    starting basis fails to materialize or the optimum leans on an
    artificial row (the artificial simplex cut off the true optimum).
    An unbounded shadow run propagates immediately: its ray certifies that
    the feasible region of the input system is unbounded.
    """
    gen = as_generator(rng)
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    pivots = 0
    reasons: list[str] = []
    for attempt in range(1, max_restarts + 1):
        ulp = build_unit_lp_prime(gen, A, sigma)
        start = _artificial_start(ulp)
        if start is None:
            reasons.append("start-construction")
            continue
        try:
            path, out = run_shadow_path(
                ulp.combined_A, ulp.combined_b,
                ulp.start_objective, ulp.z, start, limit=pivot_limit,
            )
        except (NumericalStall, CycleDetected) as exc:
            reasons.append(f"engine:{type(exc).__name__}")
            continue
        pivots += path.pivots
        if isinstance(out, UnboundedRay):
            return Unbounded(ray=out.ray, improves_objective=False)
        assert isinstance(out, Finished)
        if any(i >= n for i in out.basis.indices):
            reasons.append("cut-off")
            continue
        basis = make_basis(A, np.ones(n), out.basis.indices)
        return Phase1Result(basis=basis, z=ulp.z, attempts=attempt, pivots=pivots)
    raise RestartLimitExceeded(
        f"phase 1 failed {max_restarts} times; failure reasons: {reasons}"
    )


# ---------------------------------------------------------------------------
# Phase 2: interpolation system


@dataclass(frozen=True)
class InterpolationLp:
    """Lifted system Ax + (1-b)t <= 1; t = 0 slices to the unit system and
    t = 1 slices to the input feasible set."""

    A: np.ndarray       # (n, d+1): [A | 1-b]
    b: np.ndarray       # ones
    input_b: np.ndarray

    @property
    def d_lifted(self) -> int:
        return self.A.shape[1]


def build_interpolation_lp(A: np.ndarray, b: np.ndarray) -> InterpolationLp:
    return InterpolationLp(
        A=np.column_stack([A, 1.0 - b]), b=np.ones(A.shape[0]), input_b=np.asarray(b, float)
    )


@dataclass
class Phase2Result:
    basis: Basis  # basis of the input system, optimal for z
    pivots: int


def _farkas_from_lifted(ilp: InterpolationLp, basis_hat: Basis, n: int) -> np.ndarray:
    mu_hat = multipliers(basis_hat, np.eye(ilp.d_lifted)[-1])
    y = np.zeros(n)
    y[list(basis_hat.indices)] = np.clip(mu_hat, 0.0, None)
    return y


def _crossing_basis(A: np.ndarray, b: np.ndarray, indices, z: np.ndarray) -> Basis:
    """Build the input-system basis for a t=1 crossing edge and verify it."""
    basis = make_basis(A, b, indices)
    resid = (A @ basis.x - b).max()
    if resid > 1e-6:
        raise CertificateInvalid(f"crossing basis infeasible by {resid:.3e}")
    mu = multipliers(basis, z)
    if mu.min() < -1e-6 * max(1.0, float(np.linalg.norm(z))):
        raise CertificateInvalid(f"crossing basis not z-optimal ({mu.min():.3e})")
    return basis


def phase2_solve(
    rng,
    inst,
    unit_basis: Basis,
    z: np.ndarray,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
) -> Union[Phase2Result, Infeasible, Unbounded]:
    """Carry a z-optimal unit-system basis to a z-optimal input-system basis.

    Starts on the interpolation edge tight at the unit basis, then follows
    the combined shadow path toward maximizing t.  Stops at the first edge
    crossing t = 1; if the t-maximum is reached below 1 the input system is
    empty and the optimal multipliers give a Farkas certificate.
    """
    gen = as_generator(rng)
    A, b = inst.A, inst.b
    n, d = A.shape
    ilp = build_interpolation_lp(A, b)
    # one extra coordinate would extend z to a spherically symmetric lifted
    # objective (z, z_ext); the walk below starts at the edge normal
    # (z, w_star) instead, which spans the same plane together with e_{d+1}
    # for every z_ext, so the value itself is never needed and the draw only
    # pins the stream layout
    gen.standard_normal()

    idx = list(unit_basis.indices)
    mu_unit = multipliers(unit_basis, z)
    w_star = float(mu_unit @ (1.0 - b[idx]))
    y_start = np.append(z, w_star)
    y_target = np.zeros(d + 1)
    y_target[d] = 1.0

    # Move along the edge {A_I x + (1-b_I) t = 1} in the +t direction.
    dx = -linalg.solve(unit_basis.factorization, 1.0 - b[idx])
    v = np.append(dx, 1.0)
    p0 = np.append(unit_basis.x, 0.0)
    rates = ilp.A @ v
    slack0 = ilp.b - ilp.A @ p0
    nonbasic = np.ones(n, dtype=bool)
    nonbasic[idx] = False
    blocking = nonbasic & (rates > TOL_DIR)
    if not np.any(blocking):
        # t grows to 1 with nothing in the way; the unit basis rows are tight
        # at t = 1 where A_I x = b_I.
        return Phase2Result(basis=_crossing_basis(A, b, idx, z), pivots=0)
    rows = np.flatnonzero(blocking)
    steps = slack0[rows] / rates[rows]
    order = np.lexsort((rows, steps))
    s_star = float(steps[order[0]])
    entering = int(rows[order[0]])
    if s_star >= 1.0:
        return Phase2Result(basis=_crossing_basis(A, b, idx, z), pivots=0)

    basis_hat = make_basis(ilp.A, ilp.b, (*unit_basis.indices, entering))
    lam = 0.0
    pivots = 0
    stalls = 0
    seen = {basis_hat.indices}
    while True:
        lam_new, leaving = max_lambda(basis_hat, y_start, y_target, lam)
        if leaving is None:
            t_star = float(basis_hat.x[d])
            if t_star >= 1.0 + 1e-9:
                raise CertificateInvalid(
                    f"t-maximum {t_star} above 1 without a detected crossing"
                )
            y_cert = _farkas_from_lifted(ilp, basis_hat, n)
            out = Infeasible(certificate=y_cert)
            verify_outcome(inst, out)
            return out
        res = ratio_test(ilp.A, ilp.b, basis_hat, leaving)
        t_cur = float(basis_hat.x[d])
        remaining = tuple(i for i in basis_hat.indices if i != leaving)
        if res.entering is None:
            ray = -res.direction
            if ray[d] > TOL_DIR:
                # the unbounded edge escapes through t = 1
                return Phase2Result(
                    basis=_crossing_basis(A, b, remaining, z), pivots=pivots
                )
            ray_x = ray[:d]
            scale = max(1.0, float(np.linalg.norm(ray_x)))
            if abs(ray[d]) <= TOL_DIR and (A @ ray_x).max() <= 1e-9 * scale:
                return Unbounded(ray=ray_x, improves_objective=False)
            raise CertificateInvalid(
                "interpolation path unbounded away from the t = 1 slice"
            )
        t_next = t_cur - res.step * res.direction[d]
        if t_cur < 1.0 <= t_next + 1e-15:
            return Phase2Result(basis=_crossing_basis(A, b, remaining, z), pivots=pivots)
        if lam_new <= lam + 1e-12:
            stalls += 1
            if stalls >= 2:
                raise NumericalStall("interpolation walk stalled for two pivots")
        else:
            stalls = 0
        pivots += 1
        if pivots > pivot_limit:
            raise PivotLimitExceeded(f"exceeded {pivot_limit} pivots in phase 2")
        basis_hat = make_basis(ilp.A, ilp.b, (*remaining, res.entering))
        if basis_hat.indices in seen:
            raise CycleDetected(f"lifted basis {basis_hat.indices} repeated")
        seen.add(basis_hat.indices)
        lam = lam_new


# ---------------------------------------------------------------------------
# Phase 3 and the full pipeline


def phase3_solve(
    inst, z_basis: Basis, z: np.ndarray, pivot_limit: int = DEFAULT_PIVOT_LIMIT
) -> tuple[SolveOutcome, list[ShadowPath]]:
    """Follow the shadow path from the random objective z to the input c.

    An exactly antiparallel c degenerates the shadow plane (the sweep would
    pass through the zero objective), so that case detours through an
    intermediate objective orthogonal to z; path composition makes the two
    legs end at the same c-optimal basis.
    """
    c = inst.c
    z_norm = float(np.linalg.norm(z))
    zhat = z / z_norm
    resid = c - (c @ zhat) * zhat
    paths: list[ShadowPath] = []
    basis = z_basis
    if np.linalg.norm(resid) <= 1e-10 * max(1.0, np.linalg.norm(c)) and c @ z < 0.0:
        k = int(np.argmin(np.abs(zhat)))
        w = np.eye(len(zhat))[k] - zhat[k] * zhat
        path, out = run_shadow_path(inst.A, inst.b, z, w, basis, limit=pivot_limit)
        paths.append(path)
        if isinstance(out, UnboundedRay):
            return Unbounded(ray=out.ray, improves_objective=bool(c @ out.ray > 0)), paths
        basis = out.basis
        z = w
    path, out = run_shadow_path(inst.A, inst.b, z, c, basis, limit=pivot_limit)
    paths.append(path)
    if isinstance(out, Finished):
        return Optimal(basis_indices=out.basis.indices, x=out.basis.x), paths
    return Unbounded(ray=out.ray, improves_objective=True), paths


@dataclass
class SolveStats:
    restarts: int = 0
    pivots_phase1: int = 0
    pivots_phase2: int = 0
    pivots_phase3: int = 0
    retries: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def pivots_total(self) -> int:
        return self.pivots_phase1 + self.pivots_phase2 + self.pivots_phase3


def _solve_once(gen, inst, art_sigma, max_restarts, pivot_limit, stats):
    p1 = phase1_solve(gen, inst.A, art_sigma, max_restarts, pivot_limit)
    if isinstance(p1, Unbounded):
        stats.notes.append("unbounded-in-phase1")
        return p1, None
    stats.restarts = p1.attempts
    stats.pivots_phase1 = p1.pivots
    p2 = phase2_solve(gen, inst, p1.basis, p1.z, pivot_limit)
    if isinstance(p2, (Infeasible, Unbounded)):
        if isinstance(p2, Unbounded):
            stats.notes.append("unbounded-in-phase2")
        return p2, None
    stats.pivots_phase2 = p2.pivots
    outcome, paths = phase3_solve(inst, p2.basis, p1.z, pivot_limit)
    stats.pivots_phase3 = sum(p.pivots for p in paths)
    return outcome, paths[-1]


def solve(
    rng,
    inst,
    art_sigma: Optional[float] = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    pivot_limit: int = DEFAULT_PIVOT_LIMIT,
) -> tuple[SolveOutcome, SolveStats, Optional[ShadowPath]]:
    """Run phases 1-3 and return (outcome, per-phase stats, phase-3 path).

    Rays found in phases 1-2 certify an unbounded feasible region but need
    not improve c; in that case the pipeline retries with fresh randomness a
    couple of times hoping to land on a c-improving ray, and otherwise
    returns the region certificate (flagged on the outcome).
    """
    inst_lp = inst.lp() if hasattr(inst, "lp") else inst
    n, d = inst_lp.A.shape
    if art_sigma is None:
        # keep the artificial noise well below the simplex radius
        # 1/(10 sqrt(ln d)); near it the start construction rarely yields
        # nonnegative multipliers and the restart loop churns
        cap = min(
            1.0 / (4.0 * np.sqrt(d * np.log(max(n, 3)))),
            1.0 / (80.0 * np.sqrt(np.log(d))),
        )
        art_sigma = getattr(inst, "sigma", None)
        art_sigma = cap if art_sigma is None or art_sigma <= 0 else min(art_sigma, cap)
    gen = as_generator(rng)
    stats = SolveStats()
    outcome, path = _solve_once(gen, inst_lp, art_sigma, max_restarts, pivot_limit, stats)
    while (
        isinstance(outcome, Unbounded)
        and not outcome.improves_objective
        and float(inst_lp.c @ outcome.ray) <= 0.0
        and stats.retries < 2
    ):
        stats.retries += 1
        retry_stats = SolveStats()
        outcome, path = _solve_once(
            gen, inst_lp, art_sigma, max_restarts, pivot_limit, retry_stats
        )
        stats.pivots_phase1 += retry_stats.pivots_phase1
        stats.pivots_phase2 += retry_stats.pivots_phase2
        stats.pivots_phase3 = retry_stats.pivots_phase3
        stats.restarts += retry_stats.restarts
        stats.notes.extend(retry_stats.notes)
    if isinstance(outcome, Unbounded) and float(inst_lp.c @ outcome.ray) > 0.0:
        outcome = Unbounded(ray=outcome.ray, improves_objective=True)
    verify_outcome(
        inst_lp,
        outcome,
        require_improving=not isinstance(outcome, Unbounded) or outcome.improves_objective,
    )
    return outcome, stats, path
