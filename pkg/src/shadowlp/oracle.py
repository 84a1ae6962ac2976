"""Brute-force ground truth for small instances.

Everything here trades cycles for independence from the pivot engine:
feasible bases by exhaustive enumeration, LP optima by scanning vertices,
shadow polygons by projecting every vertex and taking a planar convex
hull, and combinatorial distances by BFS on the vertex graph.  Guards cap
the enumeration size; the lower-bound experiments swap enumeration for
pivot-based vertex discovery.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from .errors import DegenerateShadow, TooLarge, Unreachable
from .simplex import Basis, make_basis, ratio_test
from .solver import Infeasible, Optimal, Unbounded

ENUM_GUARD = 10**7
VERTEX_GUARD = 10**6

_CHUNK = 65536


def orthonormal_frame(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rows (f1, f2): f1 along u, f2 the normalized residual of v.

    Projections through this frame are shared by the polygon oracle and the
    path instrumentation so that planar coordinates agree everywhere.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.linalg.norm(u)
    if nu == 0.0:
        raise ValueError("first frame vector is zero")
    f1 = u / nu
    resid = v - (v @ f1) * f1
    nr = np.linalg.norm(resid)
    if nr <= 1e-12 * max(1.0, np.linalg.norm(v)):
        raise ValueError("frame vectors are linearly dependent")
    return np.vstack([f1, resid / nr])


def enumerate_feasible_bases(inst, guard: int = ENUM_GUARD, tol: float = 1e-9) -> list[Basis]:
    """All index sets I with A_I invertible and A x_I <= b + tol."""
    A, b = np.asarray(inst.A, float), np.asarray(inst.b, float)
    n, d = A.shape
    total = comb(n, d)
    if total > guard:
        raise TooLarge(f"binom({n},{d}) = {total} exceeds guard {guard}")
    out: list[Basis] = []
    combos = combinations(range(n), d)
    while True:
        chunk = np.array(list(__import__("itertools").islice(combos, _CHUNK)), dtype=int)
        if chunk.size == 0:
            break
        sub = A[chunk]  # (k, d, d)
        scale = np.abs(sub).max(axis=(1, 2))
        dets = np.abs(np.linalg.det(sub))
        ok = dets > 1e-12 * np.maximum(scale, 1e-300) ** d
        if not np.any(ok):
            continue
        idx_ok = chunk[ok]
        x = np.linalg.solve(sub[ok], b[idx_ok][..., None])[..., 0]
        feas = np.all(x @ A.T <= b[None, :] + tol, axis=1)
        for row in idx_ok[feas]:
            out.append(make_basis(A, b, row))
    return out


def _unbounded_edges(A, b, bases: list[Basis]):
    """Yield (basis, ray) for every unbounded edge at a feasible basis."""
    for basis in bases:
        for leaving in basis.indices:
            res = ratio_test(A, b, basis, leaving)
            if res.entering is None:
                yield basis, -res.direction


def region_bounded(inst, bases: Optional[list[Basis]] = None, guard: int = ENUM_GUARD) -> bool:
    """True iff the feasible region has no recession ray.

    A nonempty pointed polyhedron is unbounded exactly when some vertex has
    an unbounded edge; an empty region counts as bounded.
    """
    if bases is None:
        bases = enumerate_feasible_bases(inst, guard)
    for _ in _unbounded_edges(inst.A, inst.b, bases):
        return False
    return True


def _grid_feasible_point(inst, samples: int = 2048) -> Optional[np.ndarray]:
    A, b, d = inst.A, inst.b, inst.A.shape[1]
    gen = np.random.Generator(np.random.Philox(key=np.array([0, 0], dtype=np.uint64)))
    for scale in (0.0, 0.1, 1.0, 10.0, 100.0):
        pts = scale * gen.standard_normal((max(1, samples // 5), d))
        feas = np.all(pts @ A.T <= b[None, :] + 1e-9, axis=1)
        if np.any(feas):
            return pts[np.argmax(feas)]
    return None


def lp_optimum_oracle(
    inst,
    objective: np.ndarray,
    guard: int = ENUM_GUARD,
    bases: Optional[list[Basis]] = None,
):
    """Classify max objective^T x over Ax <= b by brute force.

    Optimal: argmax over enumerated vertices.  Unbounded: some feasible
    basis has an unbounded edge improving the objective.  Infeasible: no
    feasible basis and no point from a sampling grid satisfies the system.
    """
    objective = np.asarray(objective, float)
    if bases is None:
        bases = enumerate_feasible_bases(inst, guard)
    if not bases:
        if _grid_feasible_point(inst) is not None:
            raise RuntimeError(
                "region is nonempty but has no vertex; oracle only handles "
                "pointed feasible sets"
            )
        return Infeasible(certificate=None)
    scale = max(1.0, float(np.linalg.norm(objective)))
    for basis, ray in _unbounded_edges(inst.A, inst.b, bases):
        if objective @ ray > 1e-9 * scale * np.linalg.norm(ray):
            return Unbounded(ray=ray)
    best = max(bases, key=lambda bs: float(objective @ bs.x))
    return Optimal(basis_indices=best.indices, x=best.x)


# ---------------------------------------------------------------------------
# Planar convex hull (monotone chain, orientation predicate with tolerance)


def _orient(o, a, b, eps: float = 1e-12) -> int:
    """Sign of the turn o->a->b; 0 within a relative collinearity tolerance."""
    ax, ay = a[0] - o[0], a[1] - o[1]
    bx, by = b[0] - o[0], b[1] - o[1]
    cross = ax * by - ay * bx
    scale = max(abs(ax), abs(ay), abs(bx), abs(by), 1.0)
    if abs(cross) <= eps * scale * scale:
        return 0
    return 1 if cross > 0 else -1


def convex_hull_2d(points: np.ndarray, eps: float = 1e-12) -> list[int]:
    """Indices of hull vertices in counterclockwise order, collinear points dropped."""
    pts = np.asarray(points, dtype=float)
    m = len(pts)
    if m == 0:
        return []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    if m == 1:
        return [int(order[0])]

    def build(seq):
        chain: list[int] = []
        for i in seq:
            while len(chain) >= 2 and _orient(pts[chain[-2]], pts[chain[-1]], pts[i], eps) <= 0:
                chain.pop()
            chain.append(int(i))
        return chain

    lower = build(order)
    upper = build(order[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:  # all points coincide
        return [int(order[0])]
    # coincident input points can survive as repeated hull vertices
    cleaned = [hull[0]]
    for idx in hull[1:]:
        if not np.array_equal(pts[idx], pts[cleaned[-1]]):
            cleaned.append(idx)
    while len(cleaned) > 1 and np.array_equal(pts[cleaned[-1]], pts[cleaned[0]]):
        cleaned.pop()
    return cleaned


@dataclass
class ShadowPolygon:
    """Projection of the feasible vertices onto span(c, z), hull-ordered.

    For bounded regions `points` walk the full boundary counterclockwise
    (closed=True).  For unbounded regions the walk is an open chain and
    `ray_dirs` holds the two escape directions attached at its ends.
    """

    frame: np.ndarray          # (2, d)
    points: np.ndarray         # (m, 2) hull vertices, CCW
    bases: list[tuple[int, ...]]
    vertices: np.ndarray       # (m, d) pre-image vertices
    closed: bool
    ray_dirs: Optional[np.ndarray] = None  # (2, 2) unit directions when open


def _recession_extreme_rays(A: np.ndarray, guard: int = ENUM_GUARD) -> np.ndarray:
    """Extreme rays of {r : Ar <= 0} from (d-1)-subsets of rows."""
    n, d = A.shape
    if d < 2:
        raise ValueError("recession ray enumeration needs d >= 2")
    if comb(n, d - 1) > guard:
        raise TooLarge(f"binom({n},{d-1}) exceeds guard {guard}")
    rays = []
    for subset in combinations(range(n), d - 1):
        sub = A[list(subset)]
        _, s, vt = np.linalg.svd(sub)
        if s.size and s.min() <= 1e-9 * max(s.max(), 1.0):
            continue  # rank-deficient subset; no 1-dim null direction
        u = vt[-1]
        for cand in (u, -u):
            vals = A @ cand
            if vals.max() <= 1e-9:
                rays.append(cand / np.linalg.norm(cand))
    if not rays:
        return np.zeros((0, d))
    rays = np.array(rays)
    # dedupe
    keep = []
    for r in rays:
        if all(np.linalg.norm(r - k) > 1e-9 for k in keep):
            keep.append(r)
    return np.array(keep)


def shadow_polygon_oracle(
    inst,
    c: np.ndarray,
    z: np.ndarray,
    guard: int = ENUM_GUARD,
    bases: Optional[list[Basis]] = None,
) -> ShadowPolygon:
    """Project all feasible vertices to span(c, z) and hull them.

    Raises DegenerateShadow when a hull vertex has more than one pre-image
    within 1e-9 (the projection is then degenerate and path labels would be
    ambiguous).
    """
    frame = orthonormal_frame(c, z)
    if bases is None:
        bases = enumerate_feasible_bases(inst, guard)
    if not bases:
        raise ValueError("no feasible vertices to project")
    verts = np.array([bs.x for bs in bases])
    proj = verts @ frame.T  # (m, 2)

    closed = True
    ray_dirs = None
    rays = _recession_extreme_rays(inst.A, guard)
    sentinel_pts = np.zeros((0, 2))
    if len(rays):
        closed = False
        pray = rays @ frame.T
        nr = np.linalg.norm(pray, axis=1)
        keepers = pray[nr > 1e-12] / nr[nr > 1e-12][:, None]
        # dedupe projected directions
        dirs: list[np.ndarray] = []
        for rdir in keepers:
            if all(np.linalg.norm(rdir - d0) > 1e-9 for d0 in dirs):
                dirs.append(rdir)
        ray_dirs = np.array(dirs)
        scale = max(1.0, float(np.abs(proj).max()))
        center = proj.mean(axis=0)
        sentinel_pts = center[None, :] + 1e9 * scale * ray_dirs

    all_pts = np.vstack([proj, sentinel_pts])
    hull = convex_hull_2d(all_pts)

    if not closed:
        sentinels = {i for i in hull if i >= len(bases)}
        if sentinels:
            # rotate the cycle so it starts right after a sentinel, then drop them
            k = len(hull)
            start = next(
                (j + 1) % k for j in range(k) if hull[j] in sentinels
            )
            rotated = [hull[(start + j) % k] for j in range(k)]
            hull = [i for i in rotated if i < len(bases)]

    hull_points = all_pts[hull]
    hull_bases = []
    pre_ids = []
    for p in hull_points:
        matches = np.flatnonzero(np.linalg.norm(proj - p, axis=1) <= 1e-9)
        # count geometrically distinct pre-images
        distinct: list[int] = []
        for mi in matches:
            if all(np.linalg.norm(verts[mi] - verts[mj]) > 1e-9 for mj in distinct):
                distinct.append(int(mi))
        if len(distinct) != 1:
            raise DegenerateShadow(
                f"hull point {p} has {len(distinct)} pre-image vertices"
            )
        pre_ids.append(distinct[0])
        hull_bases.append(bases[distinct[0]].indices)
    return ShadowPolygon(
        frame=frame,
        points=hull_points,
        bases=hull_bases,
        vertices=verts[pre_ids],
        closed=closed,
        ray_dirs=ray_dirs,
    )


def hull_arc(polygon: ShadowPolygon, y: np.ndarray, y2: np.ndarray) -> list[tuple[int, ...]]:
    """Bases along the hull from the y-optimal vertex to the y2-optimal vertex.

    The walk direction follows the rotational sweep of the objectives within
    the polygon's frame, which is exactly the vertex order the pivot engine
    traverses between the two optima.
    """
    py = polygon.frame @ np.asarray(y, float)
    py2 = polygon.frame @ np.asarray(y2, float)
    cross = py[0] * py2[1] - py[1] * py2[0]
    if abs(cross) <= 1e-14 * max(np.linalg.norm(py) * np.linalg.norm(py2), 1e-300):
        raise ValueError("objectives project to dependent directions")
    step = 1 if cross > 0 else -1
    m = len(polygon.points)
    start = int(np.argmax(polygon.points @ py))
    end = int(np.argmax(polygon.points @ py2))
    if not polygon.closed and start != end:
        raise ValueError("arc extraction requires a closed polygon")
    arc = [polygon.bases[start]]
    i = start
    while i != end:
        i = (i + step) % m
        arc.append(polygon.bases[i])
        if len(arc) > m:
            raise RuntimeError("arc walk failed to terminate")
    return arc


# ---------------------------------------------------------------------------
# Vertex graph and BFS distances


@dataclass
class VertexGraph:
    bases: list[tuple[int, ...]]
    points: np.ndarray           # (m, d)
    adjacency: list[set[int]]

    def __len__(self) -> int:
        return len(self.bases)

    def id_of(self, indices) -> int:
        key = tuple(sorted(int(i) for i in indices))
        try:
            return self._lookup[key]
        except AttributeError:
            self._lookup = {bs: i for i, bs in enumerate(self.bases)}
            return self._lookup[key]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


def build_vertex_graph(bases: list[Basis]) -> VertexGraph:
    """Graph on enumerated bases: adjacent iff they share d-1 indices and
    their vertices are geometrically distinct."""
    m = len(bases)
    adjacency = [set() for _ in range(m)]
    sets = [frozenset(bs.indices) for bs in bases]
    for i in range(m):
        for j in range(i + 1, m):
            if len(sets[i] & sets[j]) == len(sets[i]) - 1:
                if np.linalg.norm(bases[i].x - bases[j].x) > 1e-9:
                    adjacency[i].add(j)
                    adjacency[j].add(i)
    return VertexGraph(
        bases=[bs.indices for bs in bases],
        points=np.array([bs.x for bs in bases]),
        adjacency=adjacency,
    )


def discover_vertex_graph(
    A: np.ndarray, b: np.ndarray, start_indices, guard: int = VERTEX_GUARD
) -> VertexGraph:
    """Explore the 1-skeleton by pivoting outward from one feasible basis.

    Used where enumeration is hopeless (the lower-bound instances); the
    guard caps the number of vertices discovered.
    """
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    start = make_basis(A, b, start_indices)
    bases = [start]
    ids = {start.indices: 0}
    adjacency: list[set[int]] = [set()]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        basis = bases[i]
        for leaving in basis.indices:
            res = ratio_test(A, b, basis, leaving)
            if res.entering is None:
                continue  # unbounded edge; no neighbor on this side
            nb = tuple(sorted(set(basis.indices) - {leaving} | {res.entering}))
            j = ids.get(nb)
            if j is None:
                if len(bases) >= guard:
                    raise TooLarge(f"vertex guard {guard} exceeded")
                j = len(bases)
                ids[nb] = j
                bases.append(make_basis(A, b, nb))
                adjacency.append(set())
                queue.append(j)
            adjacency[i].add(j)
            adjacency[j].add(i)
    return VertexGraph(
        bases=[bs.indices for bs in bases],
        points=np.array([bs.x for bs in bases]),
        adjacency=adjacency,
    )


def bfs_distance(graph: VertexGraph, source: int, target: int) -> int:
    """Hop count of the shortest edge path between two graph vertices."""
    if source == target:
        return 0
    dist = {source: 0}
    queue = deque([source])
    while queue:
        i = queue.popleft()
        for j in graph.adjacency[i]:
            if j not in dist:
                dist[j] = dist[i] + 1
                if j == target:
                    return dist[j]
                queue.append(j)
    raise Unreachable(f"vertex {target} not reachable from {source}")
