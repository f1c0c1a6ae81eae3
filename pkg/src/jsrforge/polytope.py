"""Invariant polygons certifying spectrum maximizing products of 2x2 pairs.

The construction seeds the leading eigenvectors of the candidate cycles,
closes them under ``+-A`` and ``+-B`` and keeps the images that leave the
current symmetric hull.  If the process stops, the polygon ``S`` satisfies
``A S, B S`` inside ``S``, so the joint spectral radius is at most 1 while
the candidate products have spectral radius 1.  The vertex graph (which
vertex maps onto which) then decides whether the candidates are the only
spectrum maximizing products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import mat2
from .fricke import is_2_isospectral
from .words import canonical, is_primitive, mirror

MATCH_TOL = 1e-7
JOIN_TOL = 1e-9
INTERIOR_TOL = 1e-9
COLLINEAR_TOL = 1e-12
EXTREMAL_TOL = 1e-9
DEFAULT_BUDGET = 120
DIVERGENCE_FACTOR = 1e3
SCREEN_LENGTH = 10

GENERATORS = ("A", "B")


class NotCertifiable(Exception):
    """The invariant-polygon construction cannot be carried out."""


# --- plane geometry ---------------------------------------------------------


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = 0.0) -> list[int]:
    """Indices of the hull vertices in counterclockwise order (monotone chain).

    Collinear and duplicate points are dropped; ``tol`` is the cross-product
    threshold below which a turn counts as straight.
    """
    pts = [tuple(p) for p in np.asarray(points, dtype=float).tolist()]
    order = sorted(range(len(pts)), key=pts.__getitem__)
    if len(order) < 3:
        return order

    def chain(idx):
        out: list[int] = []
        for i in idx:
            px, py = pts[i]
            while len(out) >= 2:
                ox, oy = pts[out[-2]]
                ax, ay = pts[out[-1]]
                if (ax - ox) * (py - oy) - (ay - oy) * (px - ox) > tol:
                    break
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True, eq=False)
class Polygon:
    """Centrally symmetric convex polygon, vertices counterclockwise.

    ``vertices`` has shape ``(2m, 2)`` with ``vertices[i + m] == -vertices[i]``.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) % 2:
            raise ValueError("polygon needs an even number of 2D vertices")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_half(cls, half) -> "Polygon":
        half = np.asarray(half, dtype=float)
        return cls(np.vstack([half, -half]))

    @property
    def m(self) -> int:
        return len(self.vertices) // 2

    def __len__(self):
        return len(self.vertices)

    def is_degenerate(self) -> bool:
        v = self.vertices
        if len(v) < 4:
            return True
        area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        scale = max(float(np.max(np.linalg.norm(v, axis=1))), 1e-300)
        return area2 <= COLLINEAR_TOL * scale * scale

    def facets(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals and offsets: the polygon is ``{p : n . p <= c}``."""
        v = self.vertices
        d = np.roll(v, -1, axis=0) - v
        normals = np.stack([d[:, 1], -d[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        return normals, np.einsum("ij,ij->i", normals, v)

    def gauge(self, p) -> np.ndarray | float:
        """Minkowski functional; ``p`` may be a single point or an ``(n, 2)`` stack."""
        if self.is_degenerate():
            raise ValueError("gauge of a degenerate polygon")
        normals, offsets = self.facets()
        vals = np.max((np.asarray(p) @ normals.T) / offsets, axis=-1)
        return vals if np.ndim(vals) else float(vals)

    def boundary_distance(self, p) -> np.ndarray | float:
        """Signed Euclidean distance to the boundary, positive inside."""
        normals, offsets = self.facets()
        vals = np.min(offsets - np.asarray(p) @ normals.T, axis=-1)
        return vals if np.ndim(vals) else float(vals)

    def locate(self, p) -> tuple[int, float, float]:
        """Sector ``k`` of the fan ``(0, v_k, v_k+1)`` containing ``p`` and its coordinates."""
        v = self.vertices
        n = len(v)
        for k in range(n):
            a, b = v[k], v[(k + 1) % n]
            alpha, beta = np.linalg.solve(np.column_stack([a, b]), p)
            if alpha >= -1e-15 and beta >= -1e-15:
                return k, float(alpha), float(beta)
        raise ValueError("point not in any sector")

    def scale(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))


def polar(poly: Polygon) -> Polygon:
    """Polar body ``{y : y . x <= 1 for x in S}``; its vertices are the facet normals / offsets."""
    if poly.is_degenerate():
        raise ValueError("polar of a degenerate polygon")
    normals, offsets = poly.facets()
    return Polygon(normals / offsets[:, None])


def polytope_norm(poly: Polygon, M) -> float:
    """Operator norm of ``M`` for the norm whose unit ball is ``poly``."""
    if poly.is_degenerate():
        raise ValueError("degenerate polygon does not define a norm")
    M = np.asarray(M)
    return float(np.max(poly.gauge(poly.vertices @ M.T)))


# --- eigenvectors -------------------------------------------------------------


def leading_eigenvector(P) -> np.ndarray:
    """Unit eigenvector for the dominant eigenvalue of a real 2x2 matrix.

    The sign is fixed so that the first nonzero coordinate is positive.
    Raises :class:`NotCertifiable` when the dominant eigenvalue is complex
    or not strictly dominant.
    """
    P = np.asarray(P, dtype=float)
    tau, delta = float(mat2.trace(P)), float(mat2.det(P))
    disc = tau * tau - 4 * delta
    if disc < 0:
        raise NotCertifiable("dominant eigenvalue is complex")
    root = math.sqrt(disc)
    if root <= 1e-12 * max(abs(tau), 1e-300):
        raise NotCertifiable("dominant eigenvalue is not simple")
    lam = (tau + math.copysign(root, tau)) / 2
    (a, b), (c, d) = P
    cand1 = np.array([b, lam - a])
    cand2 = np.array([lam - d, c])
    v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    nv = np.linalg.norm(v)
    if nv == 0:
        # P = lam * I plus nothing: every vector is an eigenvector
        raise NotCertifiable("dominant eigenvalue is not simple")
    v = v / nv
    first = v[0] if abs(v[0]) > 1e-15 else v[1]
    return -v if first < 0 else v


def complex_leading_eigenvector(P) -> tuple[complex, np.ndarray]:
    lam, _ = mat2.eigenvalues(P)
    (a, b), (c, d) = P
    cand1 = np.array([b, lam - a], dtype=complex)
    cand2 = np.array([lam - d, c], dtype=complex)
    v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    return lam, v / np.linalg.norm(v)


# --- vertex graph -------------------------------------------------------------


class Recipe(NamedTuple):
    """How a vertex arises: ``sign * path(A, B) @ seed[cycle]``, ``path`` applied left to right."""

    cycle: int
    path: str
    sign: int


@dataclass(frozen=True)
class VertexGraph:
    """Edges ``(i, label, j)`` meaning ``label(v_i) = v_j`` between the first ``m`` vertices.

    ``label`` is one of ``+A, -A, +B, -B``.  ``recipes[i]`` records how
    vertex ``i`` was generated from the seeds.
    """

    m: int
    edges: tuple[tuple[int, str, int], ...]
    recipes: tuple[Recipe, ...] = ()
    seeds: tuple[tuple[float, float], ...] = ()

    def successors(self, i: int) -> list[tuple[str, int]]:
        return [(g, j) for (s, g, j) in self.edges if s == i]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "edges": [list(e) for e in self.edges],
            "recipes": [list(r) for r in self.recipes],
            "seeds": [list(s) for s in self.seeds],
        }

    @classmethod
    def from_json(cls, d: dict) -> "VertexGraph":
        return cls(
            m=d["m"],
            edges=tuple((int(i), str(g), int(j)) for i, g, j in d["edges"]),
            recipes=tuple(Recipe(int(c), str(p), int(s)) for c, p, s in d.get("recipes", [])),
            seeds=tuple(tuple(map(float, s)) for s in d.get("seeds", [])),
        )


class ImageCheck(NamedTuple):
    ok: bool
    min_margin: float
    min_gauge_margin: float
    edges: tuple[tuple[int, str, int], ...]
    failure: str | None


def _match_vertex(poly: Polygon, p, tol: float) -> int | None:
    d = np.linalg.norm(poly.vertices - p, axis=1)
    j = int(np.argmin(d))
    return j if d[j] <= tol else None


def check_convex_position(poly: Polygon) -> tuple[bool, float]:
    """Strict convexity of the cyclic vertex list and its largest interior angle in degrees."""
    v = poly.vertices
    n = len(v)
    ok = n >= 3
    worst = 0.0
    for k in range(n):
        prev, cur, nxt = v[k - 1], v[k], v[(k + 1) % n]
        a, b = prev - cur, nxt - cur
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            return False, 180.0
        cosang = float(np.clip(a @ b / (na * nb), -1.0, 1.0))
        worst = max(worst, math.degrees(math.acos(cosang)))
        # turn of edge (prev -> cur) into (cur -> nxt), normalised to a sine
        turn = _cross(prev, cur, nxt) / (na * nb)
        if turn <= COLLINEAR_TOL:
            ok = False
    return ok, worst


def check_images(poly: Polygon, A, B, graph: VertexGraph | None = None) -> ImageCheck:
    """Every image of a vertex under ``A``, ``B`` must be a vertex or strictly interior.

    Returns the discovered edges and the smallest boundary distance of the
    interior images (Euclidean, and in the polygon's own gauge).
    """
    tol_match = MATCH_TOL * poly.scale()
    tol_inside = INTERIOR_TOL * poly.scale()
    m = poly.m
    edges = []
    min_margin = math.inf
    min_gauge = math.inf
    for name, G in zip(GENERATORS, (A, B)):
        images = poly.vertices[:m] @ np.asarray(G).T
        dist = poly.boundary_distance(images)
        gauges = poly.gauge(images)
        for i, p in enumerate(images):
            j = _match_vertex(poly, p, tol_match)
            if j is not None:
                label = ("+" if j < m else "-") + name
                edges.append((i, label, j % m))
                continue
            if dist[i] <= tol_inside:
                where = "outside" if dist[i] < -tol_inside else "on the boundary of"
                return ImageCheck(
                    False, min(min_margin, float(dist[i])), min(min_gauge, 1 - float(gauges[i])),
                    tuple(edges), f"{name} v{i} lies {where} the polygon (distance {dist[i]:.3e})",
                )
            min_margin = min(min_margin, float(dist[i]))
            min_gauge = min(min_gauge, 1.0 - float(gauges[i]))
    edges_t = tuple(sorted(edges))
    if graph is not None and set(graph.edges) != set(edges_t):
        return ImageCheck(False, min_margin, min_gauge, edges_t, "vertex graph does not match images")
    return ImageCheck(True, min_margin, min_gauge, edges_t, None)


def _apply(path: str, A, B, v):
    for ch in path:
        v = (A if ch == "A" else B) @ v
    return v


def _seed_vectors(A, B, cycles: Sequence[str], ratios: Sequence[float]) -> list[np.ndarray]:
    return [
        r * leading_eigenvector(mat2.evaluate_word(w, A, B)) for w, r in zip(cycles, ratios)
    ]


def build_polytope(
    A, B, cycles: Sequence[str], ratios: Sequence[float], budget: int = DEFAULT_BUDGET
) -> tuple[Polygon, VertexGraph]:
    """Close the seeded cycle orbits under ``+-A, +-B`` into an invariant polygon.

    ``A`` and ``B`` must already be normalised so that every cycle has
    normalised spectral radius 1.  Raises :class:`NotCertifiable` if more
    than ``budget`` vertex pairs accumulate, if the vertices run away, or
    if the result is not a proper polygon.
    """
    if len(cycles) != len(ratios):
        raise ValueError("one ratio per cycle")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    gens = {"A": A, "B": B}
    seeds = _seed_vectors(A, B, cycles, ratios)

    points: list[np.ndarray] = []
    recipes: list[Recipe] = []

    def find(p, pool, tol):
        if len(pool) == 0:
            return None
        arr = np.asarray(pool)
        d2 = np.minimum(((arr - p) ** 2).sum(axis=1), ((arr + p) ** 2).sum(axis=1))
        j = int(np.argmin(d2))
        return j if d2[j] <= tol * tol else None

    # cycle orbits first: the candidate products act on their eigenvectors
    for c, (w, v) in enumerate(zip(cycles, seeds)):
        path = ""
        for ch in reversed(w):
            if find(v, points, MATCH_TOL * max(1.0, np.linalg.norm(v))) is None:
                points.append(v)
                recipes.append(Recipe(c, path, 1))
            v = gens[ch.upper()] @ v
            path += ch.upper()

    scale = max(np.linalg.norm(p) for p in points)
    tol_match = MATCH_TOL * scale
    hull_tol = COLLINEAR_TOL * scale * scale
    members = list(range(len(points)))  # indices of points on the current hull
    level = list(range(len(points)))
    while level:
        arr = np.asarray(points)
        sym = np.vstack([arr[members], -arr[members]])
        hull = Polygon(sym[convex_hull(sym)]) if len(members) >= 2 else None
        degenerate = hull is None or len(hull) < 4 or hull.is_degenerate()
        images = np.vstack([arr[level] @ G.T for G in gens.values()])
        origin = [(i, name) for name in gens for i in level]
        d2 = np.minimum(
            ((images[:, None, :] - arr[None]) ** 2).sum(-1),
            ((images[:, None, :] + arr[None]) ** 2).sum(-1),
        ).min(axis=1)
        fresh = d2 > tol_match * tol_match
        if not degenerate:
            normals, offsets = hull.facets()
            outside = (images @ normals.T - offsets).max(axis=1)
            fresh &= outside > JOIN_TOL * scale
        cands: list[np.ndarray] = []
        cand_recipes: list[Recipe] = []
        for k in np.flatnonzero(fresh):
            p = images[k]
            if find(p, cands, tol_match) is not None:
                continue
            i, name = origin[k]
            cands.append(p)
            r = recipes[i]
            cand_recipes.append(Recipe(r.cycle, r.path + name, r.sign))
        if not cands:
            break
        pool = members + [len(points) + k for k in range(len(cands))]
        pool_pts = np.vstack([arr[members], cands])
        on_hull = {pool[k % len(pool)] for k in convex_hull(np.vstack([pool_pts, -pool_pts]), hull_tol)}
        n0 = len(points)
        level = []
        for k, (p, r) in enumerate(zip(cands, cand_recipes)):
            if n0 + k in on_hull:
                level.append(len(points))
                points.append(p)
                recipes.append(r)
        kept = [i for i in members if i in on_hull]
        members = kept + level
        if len(points) > budget:
            raise NotCertifiable(f"vertex budget {budget} exceeded")
        if max(np.hypot(*points[i]) for i in level) > DIVERGENCE_FACTOR * scale:
            raise NotCertifiable("vertices diverge: joint spectral radius exceeds 1")

    allpts = np.asarray(points)
    sym = np.vstack([allpts, -allpts])
    hull_idx = convex_hull(sym, tol=COLLINEAR_TOL * scale * scale)
    n = len(allpts)
    if len(hull_idx) < 4 or len(hull_idx) % 2:
        raise NotCertifiable("invariant set is not a proper polygon")
    # start the cyclic order at a vertex coming from a positive point, lowest discovery index
    start = min(range(len(hull_idx)), key=lambda k: (hull_idx[k] >= n, hull_idx[k]))
    hull_idx = hull_idx[start:] + hull_idx[:start]
    m = len(hull_idx) // 2
    poly = Polygon(sym[hull_idx])
    if poly.is_degenerate():
        raise NotCertifiable("invariant set is not a proper polygon")
    vertex_recipes = []
    for k in hull_idx[:m]:
        base = recipes[k % n]
        vertex_recipes.append(Recipe(base.cycle, base.path, -base.sign if k >= n else base.sign))
    images = check_images(poly, A, B)
    graph = VertexGraph(
        m=m,
        edges=images.edges,
        recipes=tuple(vertex_recipes),
        seeds=tuple((float(s[0]), float(s[1])) for s in seeds),
    )
    return poly, graph


# --- uniqueness -------------------------------------------------------------


def _reachability(m: int, succ: dict[int, set[int]]) -> list[set[int]]:
    reach = []
    for s in range(m):
        seen: set[int] = set()
        stack = list(succ.get(s, ()))
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(succ.get(j, ()))
        reach.append(seen)
    return reach


def recurrent_cycles(graph: VertexGraph) -> list[list[tuple[int, str]]] | None:
    """Cycles of the recurrent part of the sign-quotient graph.

    Returns ``None`` when some strongly connected component is not a simple
    cycle (a recurrent vertex with two ways to stay recurrent).
    """
    succ: dict[int, set[int]] = {}
    for i, _, j in graph.edges:
        succ.setdefault(i, set()).add(j)
    reach = _reachability(graph.m, succ)
    recurrent = [i for i in range(graph.m) if i in reach[i]]
    cycles = []
    done: set[int] = set()
    for i in recurrent:
        if i in done:
            continue
        component = {j for j in recurrent if j in reach[i] and i in reach[j]}
        walk = []
        cur = i
        while True:
            inside = [(g, j) for g, j in graph.successors(cur) if j in component]
            if len(inside) != 1:
                return None
            g, nxt = inside[0]
            walk.append((cur, g))
            cur = nxt
            if cur == i:
                break
        if {node for node, _ in walk} != component:
            return None
        done |= component
        cycles.append(walk)
    return cycles


def cycle_word(walk: Sequence[tuple[int, str]]) -> str:
    """Word of the product traversed by a walk (later letters multiply on the left)."""
    return "".join(g[-1].lower() for _, g in reversed(walk))


def uniqueness_check(graph: VertexGraph, cycles: Sequence[str]) -> bool:
    """True iff every infinite path winds around exactly one declared cycle.

    The recurrent part of the graph must be a disjoint union of simple
    cycles whose words are, up to rotation, exactly the declared ones.
    """
    walks = recurrent_cycles(graph)
    if walks is None:
        return False
    found = sorted(canonical(cycle_word(w)) for w in walks)
    declared = sorted({canonical(w) for w in cycles})
    return found == declared


# --- certification -----------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of certifying candidate spectrum maximizing products.

    ``A`` and ``B`` are the rescaled matrices (joint spectral radius 1 when
    certified); ``scale`` is the factor they were divided by, i.e. the joint
    spectral radius of the input pair.
    """

    verdict: str
    reason: str | None
    smp_words: tuple[str, ...]
    A_input: np.ndarray
    B_input: np.ndarray
    scale: float
    A: np.ndarray
    B: np.ndarray
    jsr: float | None = None
    ratios: tuple[float, ...] = ()
    polygon: Polygon | None = None
    graph: VertexGraph | None = None
    min_interior_margin: float | None = None
    min_gauge_margin: float | None = None
    max_interior_angle: float | None = None
    unique: bool = False
    dominant_eigenvalue: float | None = None

    @property
    def certified(self) -> bool:
        return self.verdict in ("certified", "certified-unique-pair")

    @property
    def balancing_ratio(self) -> float | None:
        return self.ratios[1] if len(self.ratios) > 1 else None

    @property
    def n_vertices(self) -> int:
        return 0 if self.polygon is None else len(self.polygon)

    def to_json(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "smp_words": list(self.smp_words),
            "unique": self.unique,
            "matrices": {"A": arr(self.A_input), "B": arr(self.B_input)},
            "rescale_factor": self.scale,
            "rescaled": {"A": arr(self.A), "B": arr(self.B)},
            "jsr": self.jsr,
            "dominant_eigenvalue": self.dominant_eigenvalue,
            "balancing_ratios": list(self.ratios),
            "n_vertices": self.n_vertices,
            "vertices": arr(None if self.polygon is None else self.polygon.vertices),
            "graph": None if self.graph is None else self.graph.to_json(),
            "min_interior_margin": self.min_interior_margin,
            "min_gauge_margin": self.min_gauge_margin,
            "max_interior_angle_deg": self.max_interior_angle,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        def arr(a):
            return None if a is None else np.asarray(a, dtype=float)

        return cls(
            verdict=d["verdict"],
            reason=d["reason"],
            smp_words=tuple(d["smp_words"]),
            A_input=arr(d["matrices"]["A"]),
            B_input=arr(d["matrices"]["B"]),
            scale=d["rescale_factor"],
            A=arr(d["rescaled"]["A"]),
            B=arr(d["rescaled"]["B"]),
            jsr=d["jsr"],
            ratios=tuple(d["balancing_ratios"]),
            polygon=None if d["vertices"] is None else Polygon(arr(d["vertices"])),
            graph=None if d["graph"] is None else VertexGraph.from_json(d["graph"]),
            min_interior_margin=d["min_interior_margin"],
            min_gauge_margin=d["min_gauge_margin"],
            max_interior_angle=d["max_interior_angle_deg"],
            unique=d["unique"],
            dominant_eigenvalue=d["dominant_eigenvalue"],
        )


@dataclass
class _Attempt:
    ok: bool
    objective: float
    polygon: Polygon | None = None
    graph: VertexGraph | None = None
    images: ImageCheck | None = None
    angle: float | None = None
    reason: str | None = None


def _attempt(A, B, cycles, ratios, budget) -> _Attempt:
    try:
        poly, graph = build_polytope(A, B, cycles, ratios, budget)
    except NotCertifiable as exc:
        return _Attempt(False, -math.inf, reason=str(exc))
    convex, angle = check_convex_position(poly)
    images = check_images(poly, A, B, graph)
    if not convex:
        return _Attempt(False, -math.inf, poly, graph, images, angle, "polygon not strictly convex")
    if not images.ok:
        return _Attempt(False, -math.inf, poly, graph, images, angle, images.failure)
    return _Attempt(True, images.min_gauge_margin, poly, graph, images, angle)


def _golden_max(f, lo: float, hi: float, iters: int) -> tuple[float, float]:
    invphi = (math.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
        best = max(best, (fc, c), (fd, d))
    return best[1], best[0]


def left_eigenvector(P, right) -> np.ndarray:
    """Left eigenvector for the dominant eigenvalue, scaled so ``l @ right == 1``."""
    left = leading_eigenvector(np.asarray(P).T)
    return left / (left @ right)


def orbit_support(A, B, seed, functional, max_points: int = 2000, max_levels: int = 1000) -> float:
    """``sup |functional . P seed|`` over all products ``P`` of ``A`` and ``B``.

    The orbit is closed level by level, dropping images inside the symmetric
    hull of the points kept so far; a linear functional attains its supremum
    on the extreme points, so the pruning is exact.  The orbit may be
    infinite, so the value is a lower bound that converges from below.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    functional = np.asarray(functional, dtype=float)
    seed = np.asarray(seed, dtype=float)
    scale = float(np.linalg.norm(seed))
    tol = MATCH_TOL * scale
    points = [seed]
    members = [0]
    level = [0]
    best = abs(float(functional @ seed))
    for _ in range(max_levels):
        arr = np.asarray(points)
        images = np.vstack([arr[level] @ A.T, arr[level] @ B.T])
        d2 = np.minimum(
            ((images[:, None, :] - arr[None]) ** 2).sum(-1),
            ((images[:, None, :] + arr[None]) ** 2).sum(-1),
        ).min(axis=1)
        images = images[d2 > tol * tol]
        if len(images) == 0:
            break
        best = max(best, float(np.abs(images @ functional).max()))
        pool = np.vstack([arr[members], images])
        on_hull = {k % len(pool) for k in convex_hull(np.vstack([pool, -pool]), COLLINEAR_TOL * scale * scale)}
        n_members = len(members)
        members = [members[k] for k in range(n_members) if k in on_hull]
        level = []
        for k, p in enumerate(images):
            if n_members + k in on_hull:
                level.append(len(points))
                points.append(p)
        members += level
        if not level or len(points) > max_points:
            break
    return best


def balancing_window(A, B, cycles: Sequence[str]) -> list[list[float]]:
    """Pairwise orbit supports ``g[i][j]`` of cycle ``i``'s eigenvector on cycle ``j``.

    With unit leading eigenvectors ``e_i`` and left eigenvectors ``l_j``
    (``l_j . e_j = 1``), the orbit of ``e_i`` accumulates on ``+-g[i][j] e_j``
    along the ``j``-th cycle.  The construction can only close when every
    seed ``r_j e_j`` lies beyond those limit points, i.e. when
    ``r_j / r_i > g[i][j]`` for all ``i != j``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    mats = [mat2.evaluate_word(w, A, B) for w in cycles]
    right = [leading_eigenvector(P) for P in mats]
    left = [left_eigenvector(P, e) for P, e in zip(mats, right)]
    k = len(cycles)
    g = [[1.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i != j:
                g[i][j] = orbit_support(A, B, right[i], left[j])
    return g


def _centred_log_ratios(g, sweeps: int = 200) -> list[float] | None:
    # log r_j - log r_i > log g_ij; put every log ratio mid-way in its interval
    k = len(g)
    lg = [[math.log(g[i][j]) if g[i][j] > 0 else -math.inf for j in range(k)] for i in range(k)]
    x = [0.0] * k
    for _ in range(sweeps):
        for s in range(1, k):
            lo = max(x[i] + lg[i][s] for i in range(k) if i != s)
            hi = min(x[j] - lg[s][j] for j in range(k) if j != s)
            if not lo < hi:
                return None
            if math.isinf(lo) and math.isinf(hi):
                x[s] = 0.0
            elif math.isinf(lo) or math.isinf(hi):
                x[s] = hi - 1.0 if math.isinf(lo) else lo + 1.0
            else:
                x[s] = (lo + hi) / 2
    return x


def balancing_search(
    A,
    B,
    cycles: Sequence[str],
    budget: int = DEFAULT_BUDGET,
    objective: str = "centre",
    samples: int = 24,
    refine_iters: int = 25,
) -> list[float]:
    """Relative seed lengths for the cycle eigenvectors; the first is pinned to 1.

    The admissible ratios form an open window bounded by the orbit supports
    of :func:`balancing_window`, often much narrower than one percent.
    ``objective="centre"`` returns the centre of the window in log scale,
    the point with the most slack in every constraint, falling back to the
    margin search if the polygon fails to close there.
    ``objective="margin"`` scans a geometric grid inside the window and
    polishes the best point by golden-section search on the smallest
    interior margin.
    """
    if objective not in ("centre", "margin"):
        raise ValueError(f"unknown balancing objective {objective!r}")
    if len(cycles) < 2:
        return [1.0]
    g = balancing_window(A, B, cycles)
    x = _centred_log_ratios(g)
    if x is None:
        raise NotCertifiable("the cycle orbits cannot be balanced: no admissible ratios")
    centre = [math.exp(v) for v in x]
    if len(cycles) > 2:
        return centre
    if objective == "centre" and _attempt(A, B, cycles, centre, budget).ok:
        return centre
    lo, hi = g[0][1], 1.0 / g[1][0]

    def margin(r):
        return _attempt(A, B, cycles, [1.0, r], budget).objective

    # interior grid, endpoints excluded
    pts = np.geomspace(lo, hi, samples + 2)[1:-1]
    vals = [margin(r) for r in pts]
    k = int(np.argmax(vals))
    if not math.isfinite(vals[k]):
        raise NotCertifiable("no balancing ratio gives an invariant polygon")
    a = float(pts[k - 1]) if k > 0 else lo
    b = float(pts[k + 1]) if k + 1 < len(pts) else hi
    r1, f1 = _golden_max(margin, a, b, refine_iters)
    return [1.0, r1 if f1 > vals[k] else float(pts[k])]


def _quick_screen(A, B, cycles, max_len: int) -> str | None:
    """A short product beating the (rescaled) candidates, if any."""
    classes = {canonical(w) for w in cycles}
    for word, rho in mat2.best_products(A, B, max_len, top=len(classes) + 1):
        if word not in classes and rho > 1 + EXTREMAL_TOL:
            return word
    return None


def _is_chiral_pair(cycles: Sequence[str]) -> bool:
    if len(cycles) != 2:
        return False
    w1, w2 = cycles
    return (
        canonical(w1) != canonical(w2)
        and canonical(mirror(w1)) == canonical(w2)
        and is_2_isospectral(w1, w2)
    )


def certify(
    A,
    B,
    smp_candidates: Sequence[str],
    ratios: Sequence[float] | None = None,
    budget: int = DEFAULT_BUDGET,
    screen_length: int = SCREEN_LENGTH,
    balancing: str = "centre",
) -> Certificate:
    """Certify that the candidate products are spectrum maximizing for ``(A, B)``.

    The pair is rescaled so the first candidate has normalised spectral
    radius 1.  ``ratios`` fixes the relative seed lengths; when omitted they
    come from :func:`balancing_search` with the given ``balancing`` objective.  Failures are reported through the
    verdict, never raised.
    """
    A_in = mat2.as_matrix(A)
    B_in = mat2.as_matrix(B)
    cycles = tuple(smp_candidates)

    def failed(reason, **extra):
        return Certificate("failed", reason, cycles, A_in, B_in, scale, A_n, B_n, **extra)

    scale = math.nan
    A_n, B_n = A_in, B_in
    if not cycles:
        return failed("no candidate products given")
    for w in cycles:
        if not w or set(w) - set("ab"):
            return failed(f"invalid word {w!r}")
        if not is_primitive(w):
            return failed(f"candidate {w} is not primitive")
    if len({canonical(w) for w in cycles}) != len(cycles):
        return failed("candidates repeat a rotation class")

    first = mat2.evaluate_word(cycles[0], A_in, B_in)
    rho0 = mat2.spectral_radius(first)
    if not rho0 > 0:
        return failed("first candidate is nilpotent")
    scale = rho0 ** (1.0 / len(cycles[0]))
    A_n, B_n = A_in / scale, B_in / scale
    dominant = mat2.dominant_eigenvalue(first)
    dominant = float(dominant.real) if isinstance(dominant, complex) else float(dominant)

    for w in cycles[1:]:
        rho = mat2.spectral_radius(mat2.evaluate_word(w, A_n, B_n)) ** (1.0 / len(w))
        if abs(rho - 1.0) > EXTREMAL_TOL:
            return failed(f"candidate {w} has normalised spectral radius {rho:.12g} != 1")
    better = _quick_screen(A_n, B_n, cycles, screen_length)
    if better is not None:
        return failed(f"product {better} has a larger normalised spectral radius")

    try:
        if ratios is None:
            ratios = balancing_search(A_n, B_n, cycles, budget, objective=balancing)
        ratios = [float(r) for r in ratios]
        att = _attempt(A_n, B_n, cycles, ratios, budget)
    except NotCertifiable as exc:
        return failed(f"not certifiable: {exc}")
    if not att.ok:
        return failed(att.reason, ratios=tuple(ratios), polygon=att.polygon, graph=att.graph)

    unique = uniqueness_check(att.graph, cycles)
    verdict = "certified-unique-pair" if unique and _is_chiral_pair(cycles) else "certified"
    return Certificate(
        verdict=verdict,
        reason=None,
        smp_words=cycles,
        A_input=A_in,
        B_input=B_in,
        scale=scale,
        A=A_n,
        B=B_n,
        jsr=1.0,
        ratios=tuple(ratios),
        polygon=att.polygon,
        graph=att.graph,
        min_interior_margin=att.images.min_margin,
        min_gauge_margin=att.images.min_gauge_margin,
        max_interior_angle=att.angle,
        unique=unique,
        dominant_eigenvalue=dominant,
    )


# --- polar / Barabanov --------------------------------------------------------


def barabanov_polar_check(poly: Polygon, A, B, samples: int = 3600) -> float:
    """Largest deviation from the Barabanov identity for the transposed pair.

    Uses the norm whose unit ball is the polar of ``poly``; for ``v`` on the
    unit circle it compares ``max(|A^T v|, |B^T v|)`` with ``|v|``.  A small
    value is numerical evidence, not a proof.
    """
    dual = polar(poly)
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    v = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    A = np.asarray(A)
    B = np.asarray(B)
    lhs = np.maximum(dual.gauge(v @ A), dual.gauge(v @ B))  # rows of v @ A are A^T v
    return float(np.max(np.abs(lhs - dual.gauge(v))))


# --- complex perturbations ---------------------------------------------------


def certify_complex(A, B, base: Certificate) -> bool:
    """Does the real certificate survive the complex pair ``(A, B)``?

    The vertices are regenerated from the perturbed seeds along the same
    paths.  Images that were vertices must stay unimodular multiples of the
    corresponding perturbed vertex; images that were interior are written in
    the perturbed basis of their real fan sector and need
    ``|alpha| + |beta| < 1``.  Then the absolutely convex hull of the
    perturbed vertices is invariant.
    """
    if not base.certified or base.polygon is None or base.graph is None:
        return False
    try:
        return _certify_complex(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex), base)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, NotCertifiable):
        return False


def _certify_complex(A, B, base: Certificate) -> bool:
    cycles = base.smp_words
    rho = mat2.spectral_radius(mat2.evaluate_word(cycles[0], A, B))
    if not (rho > 0 and math.isfinite(rho)):
        return False
    s = rho ** (1.0 / len(cycles[0]))
    A, B = A / s, B / s
    poly, graph = base.polygon, base.graph
    m = poly.m

    seeds = []
    for w, real_seed in zip(cycles, graph.seeds):
        real_seed = np.asarray(real_seed, dtype=complex)
        _, e = complex_leading_eigenvector(mat2.evaluate_word(w, A, B))
        # the eigenvector is defined up to a complex factor; take the multiple nearest the real seed
        seeds.append(e * (np.vdot(e, real_seed) / np.vdot(e, e)))
    tilde = np.array(
        [r.sign * _apply(r.path, A, B, seeds[r.cycle]) for r in graph.recipes], dtype=complex
    )
    tilde_full = np.vstack([tilde, -tilde])
    edge_map = {(i, g[-1]): (g[0], j) for i, g, j in graph.edges}

    for name, Gr, Gc in (("A", base.A, A), ("B", base.B, B)):
        for i in range(m):
            image = Gc @ tilde[i]
            if (i, name) in edge_map:
                sign, j = edge_map[(i, name)]
                target = tilde[j] if sign == "+" else -tilde[j]
                c = np.vdot(target, image) / np.vdot(target, target)
                resid = np.linalg.norm(image - c * target)
                if resid > 1e-9 * max(1.0, np.linalg.norm(target)) or abs(c) > 1 + 1e-9:
                    return False
                continue
            k, _, _ = poly.locate(Gr @ poly.vertices[i])
            basis = np.column_stack([tilde_full[k], tilde_full[(k + 1) % (2 * m)]])
            alpha, beta = np.linalg.solve(basis, image)
            if not abs(alpha) + abs(beta) < 1:
                return False
    return True
