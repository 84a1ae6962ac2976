"""Shadow vertex pivot engine.

Walks the bases that are optimal for objectives y_lambda = lambda*y2 +
(1-lambda)*y as lambda sweeps 0 -> 1.  Each pivot finds the largest lambda
keeping all basis multipliers nonnegative, drops the constraint whose
multiplier hit zero, and enters the first constraint that blocks the
resulting edge.  The visited vertices project onto the boundary of the
two-dimensional shadow of the feasible set on span(y, y2).

Functions here take the constraint data (A, b) directly so the same engine
drives unit, interpolation, and input systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import linalg
from .errors import CycleDetected, NegativeStep, NumericalStall, PivotLimitExceeded

# Optimality is declared at multipliers >= -TOL_OPT, feasibility at residual
# <= TOL_FEAS, and a row only blocks an edge when its rate is below -TOL_DIR.
# Two orders of magnitude separate the assertion layer from the detection
# layer.
TOL_OPT = 1e-9
TOL_FEAS = 1e-8
TOL_DIR = 1e-11

DEFAULT_PIVOT_LIMIT = 10**6


@dataclass(frozen=True)
class Basis:
    """A sorted d-subset of row indices with its factorization and vertex."""

    indices: tuple[int, ...]
    factorization: linalg.BasisFactorization
    x: np.ndarray

    @property
    def d(self) -> int:
        return len(self.indices)


def make_basis(A: np.ndarray, b: np.ndarray, indices) -> Basis:
    """Factorize A_I and compute the basic solution x_I = A_I^{-1} b_I."""
    idx = tuple(sorted(int(i) for i in indices))
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices in basis {idx}")
    f = linalg.factorize(A[list(idx)])
    x = linalg.solve(f, b[list(idx)])
    return Basis(indices=idx, factorization=f, x=x)


def multipliers(basis: Basis, y: np.ndarray) -> np.ndarray:
    """Multipliers mu with A_I^T mu = y, ordered like basis.indices."""
    return linalg.solve_transpose(basis.factorization, y)


def is_feasible(A: np.ndarray, b: np.ndarray, x: np.ndarray, tol: float = TOL_FEAS) -> bool:
    return bool(np.all(A @ x <= b + tol))


def max_lambda(
    basis: Basis,
    y: np.ndarray,
    y2: np.ndarray,
    lambda_lo: float,
) -> tuple[float, Optional[int]]:
    """Largest lambda in [lambda_lo, 1] keeping all multipliers nonnegative.

    Each multiplier is affine in lambda, so the first zero crossing among the
    decreasing coordinates is found by interpolation.  Returns (lambda,
    leaving row index), with leaving None when the basis stays optimal all
    the way to lambda = 1.  Ties break toward the smallest row index.
    """
    mu1 = multipliers(basis, y2)
    mu_lo = multipliers(basis, (1.0 - lambda_lo) * y + lambda_lo * y2)
    if mu_lo.min() < -1e-6:
        raise ValueError(
            f"basis {basis.indices} is not optimal at lambda={lambda_lo} "
            f"(multiplier {mu_lo.min():.3e})"
        )
    best_lam = 1.0
    leaving = None
    for pos in range(len(mu_lo)):
        if mu1[pos] >= 0.0:
            continue  # nondecreasing or still nonnegative at 1: never blocks
        lam = lambda_lo + (1.0 - lambda_lo) * mu_lo[pos] / (mu_lo[pos] - mu1[pos])
        lam = min(max(lam, lambda_lo), 1.0)
        row = basis.indices[pos]
        if lam < best_lam - 1e-15 or (abs(lam - best_lam) <= 1e-15 and (leaving is None or row < leaving)):
            best_lam = lam
            leaving = row
    if leaving is None or best_lam >= 1.0:
        return 1.0, None
    return best_lam, leaving


@dataclass(frozen=True)
class RatioResult:
    step: float  # may be inf
    entering: Optional[int]
    direction: np.ndarray  # w = A_I^{-1} e_j; the vertex moves along -w


def ratio_test(A: np.ndarray, b: np.ndarray, basis: Basis, leaving: int) -> RatioResult:
    """Step length to the first constraint blocking the edge that relaxes `leaving`.

    The edge direction is -w with w = A_I^{-1} e_j (j = position of leaving in
    the basis), so constraint i blocks iff a_i^T w < -TOL_DIR, at step
    (b_i - a_i^T x_I) / (-a_i^T w).  Returns step = inf and entering = None
    when nothing blocks (the edge is an unbounded ray).
    """
    pos = basis.indices.index(leaving)
    e = np.zeros(basis.d)
    e[pos] = 1.0
    w = linalg.solve(basis.factorization, e)
    rates = A @ w
    slack = b - A @ basis.x
    nonbasic = np.ones(A.shape[0], dtype=bool)
    nonbasic[list(basis.indices)] = False
    blocking = nonbasic & (rates < -TOL_DIR)
    if not np.any(blocking):
        return RatioResult(step=np.inf, entering=None, direction=w)
    rows = np.flatnonzero(blocking)
    steps = slack[rows] / (-rates[rows])
    order = np.lexsort((rows, steps))
    best = order[0]
    step = float(steps[best])
    if step < -1e-9:
        raise NegativeStep(
            f"step {step:.3e} for leaving row {leaving}; slack "
            f"{slack[rows[best]]:.3e} on row {int(rows[best])}"
        )
    return RatioResult(step=max(step, 0.0), entering=int(rows[best]), direction=w)


@dataclass(frozen=True)
class Advanced:
    basis: Basis
    lam: float


@dataclass(frozen=True)
class Finished:
    basis: Basis


@dataclass(frozen=True)
class UnboundedRay:
    ray: np.ndarray
    basis: Basis  # basis at which the unbounded edge was found
    leaving: int

PivotOutcome = Union[Advanced, Finished, UnboundedRay]


@dataclass
class ShadowPath:
    """Ordered bases visited between objectives y and y2, with breakpoints.

    lambdas[i] is the sweep value at which bases[i] became optimal;
    lambdas[0] = 0 and the sequence is nondecreasing.  Consecutive bases
    differ in exactly one index.
    """

    y: np.ndarray
    y2: np.ndarray
    bases: list[Basis]
    lambdas: list[float]

    def __len__(self) -> int:
        return len(self.bases)

    @property
    def index_sequence(self) -> list[tuple[int, ...]]:
        return [bs.indices for bs in self.bases]

    @property
    def pivots(self) -> int:
        return len(self.bases) - 1


def pivot_step(
    A: np.ndarray, b: np.ndarray, basis: Basis, y: np.ndarray, y2: np.ndarray, lam: float
) -> PivotOutcome:
    """One shadow-vertex step from `basis`, currently optimal at sweep `lam`."""
    lam_new, leaving = max_lambda(basis, y, y2, lam)
    if leaving is None:
        return Finished(basis)
    res = ratio_test(A, b, basis, leaving)
    if res.entering is None:
        return UnboundedRay(ray=-res.direction, basis=basis, leaving=leaving)
    new_indices = set(basis.indices)
    new_indices.remove(leaving)
    new_indices.add(res.entering)
    return Advanced(basis=make_basis(A, b, new_indices), lam=lam_new)


def run_shadow_path(
    A: np.ndarray,
    b: np.ndarray,
    y: np.ndarray,
    y2: np.ndarray,
    start: Basis,
    limit: int = DEFAULT_PIVOT_LIMIT,
) -> tuple[ShadowPath, PivotOutcome]:
    """Follow the shadow path from y to y2 starting at a y-optimal basis.

    Returns the recorded path plus Finished(basis optimal for y2) or
    UnboundedRay.  Raises PivotLimitExceeded past `limit` pivots,
    CycleDetected if a basis repeats, and NumericalStall when two
    consecutive pivots fail to advance lambda by at least 1e-12.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    path = ShadowPath(y=np.asarray(y, float), y2=np.asarray(y2, float), bases=[start], lambdas=[0.0])
    seen = {start.indices}
    basis = start
    lam = 0.0
    stalls = 0
    pivots = 0
    while True:
        lam_new, leaving = max_lambda(basis, path.y, path.y2, lam)
        if leaving is None:
            return path, Finished(basis)
        res = ratio_test(A, b, basis, leaving)
        if res.entering is None:
            return path, UnboundedRay(ray=-res.direction, basis=basis, leaving=leaving)
        if lam_new <= lam + 1e-12:
            stalls += 1
            if stalls >= 2:
                raise NumericalStall(
                    f"lambda stuck at {lam:.17g} for two pivots (basis {basis.indices})"
                )
        else:
            stalls = 0
        pivots += 1
        if pivots > limit:
            raise PivotLimitExceeded(f"exceeded {limit} pivots")
        new_indices = set(basis.indices)
        new_indices.remove(leaving)
        new_indices.add(res.entering)
        basis = make_basis(A, b, new_indices)
        if basis.indices in seen:
            raise CycleDetected(f"basis {basis.indices} repeated")
        seen.add(basis.indices)
        lam = lam_new
        path.bases.append(basis)
        path.lambdas.append(lam)


def validate_path(A: np.ndarray, b: np.ndarray, path: ShadowPath) -> None:
    """Assert every recorded basis is feasible and optimal at its breakpoint."""
    for basis, lam in zip(path.bases, path.lambdas):
        resid = (A @ basis.x - b).max()
        if resid > TOL_FEAS:
            raise AssertionError(
                f"basis {basis.indices} infeasible by {resid:.3e} at lambda={lam}"
            )
        y_lam = (1.0 - lam) * path.y + lam * path.y2
        mu = multipliers(basis, y_lam)
        if mu.min() < -1e-8:
            raise AssertionError(
                f"basis {basis.indices} multiplier {mu.min():.3e} at lambda={lam}"
            )
