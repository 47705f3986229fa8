"""Coxeter simplices in hyperbolic space.

Node ``i`` of the diagram is the facet opposite vertex label ``i``.  Points
and normals live in R^{n} with the Lorentzian form ``diag(1, ..., 1, -1)``;
the last coordinate is time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

DEFAULT_TOL = 1e-9


class CoxeterFormatError(ValueError):
    pass


class NotFiniteError(ValueError):
    """The sub-diagram does not generate a finite Coxeter group."""


class RealizationError(ValueError):
    pass


@dataclass(frozen=True)
class CoxeterSimplex:
    m: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.m)
        for i in range(n):
            if len(self.m[i]) != n:
                raise ValueError("Coxeter matrix must be square")
            if self.m[i][i] != 1:
                raise ValueError("Coxeter matrix must have 1 on the diagonal")
            for j in range(i + 1, n):
                if self.m[i][j] != self.m[j][i]:
                    raise ValueError(f"Coxeter matrix not symmetric at ({i}, {j})")
                if self.m[i][j] < 2:
                    raise ValueError(f"m[{i}][{j}] = {self.m[i][j]} < 2")

    @classmethod
    def from_pairs(cls, rank: int, pairs: dict[tuple[int, int], int]) -> CoxeterSimplex:
        m = [[1 if i == j else 2 for j in range(rank)] for i in range(rank)]
        for (i, j), v in pairs.items():
            m[i][j] = m[j][i] = v
        return cls(tuple(map(tuple, m)))

    @property
    def rank(self) -> int:
        return len(self.m)

    def gram_matrix(self) -> np.ndarray:
        return gram_matrix(self)


def parse_coxeter(text: str) -> CoxeterSimplex:
    rank = None
    pairs: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "rank" and len(parts) == 2:
                rank = int(parts[1])
            elif parts[0] == "m" and len(parts) == 4:
                if rank is None:
                    raise CoxeterFormatError(f"line {lineno}: 'm' before 'rank'")
                i, j, v = map(int, parts[1:])
                if not (0 <= i < rank and 0 <= j < rank) or i == j:
                    raise CoxeterFormatError(f"line {lineno}: bad node pair ({i}, {j})")
                if v < 2:
                    raise CoxeterFormatError(f"line {lineno}: m = {v} must be >= 2")
                key = (min(i, j), max(i, j))
                if key in pairs:
                    raise CoxeterFormatError(f"line {lineno}: pair {key} listed twice")
                pairs[key] = v
            else:
                raise CoxeterFormatError(f"line {lineno}: cannot parse {raw.strip()!r}")
        except ValueError as exc:
            if isinstance(exc, CoxeterFormatError):
                raise
            raise CoxeterFormatError(f"line {lineno}: {exc}") from None
    if rank is None:
        raise CoxeterFormatError("missing 'rank' line")
    return CoxeterSimplex.from_pairs(rank, pairs)


def gram_matrix(cox: CoxeterSimplex) -> np.ndarray:
    m = np.array(cox.m, dtype=float)
    G = -np.cos(np.pi / m)
    np.fill_diagonal(G, 1.0)
    return G


def signature(G, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """Counts of positive, negative and (|lambda| < tol) zero eigenvalues."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("signature needs a square matrix")
    if np.max(np.abs(G - G.T), initial=0.0) > tol:
        raise ValueError("matrix is not symmetric")
    w = np.linalg.eigvalsh((G + G.T) / 2)
    return int(np.sum(w > tol)), int(np.sum(w < -tol)), int(np.sum(np.abs(w) <= tol))


def _positive_definite(G: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return G.shape[0] == 0 or bool(np.linalg.eigvalsh(G)[0] > tol)


@dataclass(frozen=True)
class LannerReport:
    ok: bool
    determinant: float
    failing_subsets: tuple[tuple[int, ...], ...]

    def __bool__(self):
        return self.ok


def lanner_check(cox: CoxeterSimplex, tol: float = DEFAULT_TOL) -> LannerReport:
    """Compact hyperbolic simplex test.

    Every proper principal submatrix of the Gram matrix must be positive
    definite and the full determinant negative.
    """
    G = gram_matrix(cox)
    n = cox.rank
    failing = []
    for r in range(1, n):
        for sub in combinations(range(n), r):
            if not _positive_definite(G[np.ix_(sub, sub)], tol):
                failing.append(sub)
    det = float(np.linalg.det(G))
    return LannerReport(not failing and det < -tol, det, tuple(failing))


# ---------------------------------------------------------------- finite groups

_EXCEPTIONAL = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "H3": 120, "H4": 14400}


def _component_type(nodes: list[int], m) -> tuple[str, int]:
    n = len(nodes)
    if n == 1:
        return "A1", 2
    edges = {(a, b): m[a][b] for a, b in combinations(nodes, 2) if m[a][b] >= 3}
    if n == 2:
        (v,) = edges.values()
        name = {3: "A2", 4: "B2", 6: "G2"}.get(v, f"I2({v})")
        return name, 2 * v
    if len(edges) != n - 1:
        raise NotFiniteError("diagram component contains a cycle")
    nbrs: dict[int, list[int]] = {a: [] for a in nodes}
    for a, b in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    degrees = sorted(len(v) for v in nbrs.values())
    if degrees[-1] <= 2:
        end = next(a for a in nodes if len(nbrs[a]) == 1)
        path = [end]
        while len(path) < n:
            path.append(next(b for b in nbrs[path[-1]] if b not in path))
        seq = [m[a][b] for a, b in zip(path, path[1:])]
        if all(v == 3 for v in seq):
            return f"A{n}", math.factorial(n + 1)
        if seq.count(4) == 1 and seq.count(3) == n - 2:
            if seq[0] == 4 or seq[-1] == 4:
                return f"B{n}", 2 ** n * math.factorial(n)
            if seq == [3, 4, 3]:
                return "F4", _EXCEPTIONAL["F4"]
        if n in (3, 4) and seq.count(5) == 1 and seq.count(3) == n - 2 and 5 in (seq[0], seq[-1]):
            return f"H{n}", _EXCEPTIONAL[f"H{n}"]
        raise NotFiniteError(f"linear diagram with labels {seq} is not of finite type")
    if degrees[-1] == 3 and degrees[-2] <= 2 and all(v == 3 for v in edges.values()):
        centre = next(a for a in nodes if len(nbrs[a]) == 3)
        arms = []
        for start in nbrs[centre]:
            length, prev, cur = 1, centre, start
            while len(nbrs[cur]) == 2:
                prev, cur = cur, next(b for b in nbrs[cur] if b != prev)
                length += 1
            arms.append(length)
        arms.sort()
        if arms[:2] == [1, 1]:
            return f"D{n}", 2 ** (n - 1) * math.factorial(n)
        if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
            name = f"E{n}"
            return name, _EXCEPTIONAL[name]
    raise NotFiniteError("diagram component is not of finite type")


def finite_coxeter_type(cox: CoxeterSimplex, nodes) -> list[tuple[str, int]]:
    """Connected components of the sub-diagram on ``nodes`` with their orders."""
    nodes = sorted(nodes)
    G = gram_matrix(cox)[np.ix_(nodes, nodes)]
    if not _positive_definite(G):
        raise NotFiniteError(f"Gram submatrix on nodes {nodes} is not positive definite")
    m = cox.m
    seen: set[int] = set()
    out = []
    for a in nodes:
        if a in seen:
            continue
        comp, stack = [], [a]
        seen.add(a)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nodes:
                if y not in seen and m[x][y] >= 3:
                    seen.add(y)
                    stack.append(y)
        out.append(_component_type(sorted(comp), m))
    return out


def finite_coxeter_order(cox: CoxeterSimplex, nodes) -> int:
    return math.prod(order for _, order in finite_coxeter_type(cox, nodes))


def deleted_node_diagram(cox: CoxeterSimplex, k: int) -> tuple[str, int]:
    """Name and order of the finite group left after deleting node ``k``."""
    parts = finite_coxeter_type(cox, [i for i in range(cox.rank) if i != k])
    name = " x ".join(name for name, _ in parts) if parts else "trivial"
    return name, math.prod(order for _, order in parts)


# ---------------------------------------------------------------- geometry


def lorentz(x: np.ndarray, y: np.ndarray) -> float:
    return float(x[:-1] @ y[:-1] - x[-1] * y[-1])


def lorentz_gram(vectors: np.ndarray) -> np.ndarray:
    J = np.ones(vectors.shape[1])
    J[-1] = -1.0
    return (vectors * J) @ vectors.T


def reflect(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Lorentzian reflection in the hyperplane orthogonal to the unit normal ``u``."""
    return x - 2.0 * lorentz(x, u) * u


@dataclass(frozen=True)
class SimplexRealization:
    """Outward unit normals ``normals[i]`` and vertices ``vertices[i]``."""

    cox: CoxeterSimplex
    normals: np.ndarray
    vertices: np.ndarray
    residual: float

    def vertex(self, label: int) -> np.ndarray:
        return self.vertices[label]


def realize_simplex(cox: CoxeterSimplex, tol: float = DEFAULT_TOL) -> SimplexRealization:
    """Place the simplex in the hyperboloid model.

    The Gram matrix is factored through its eigendecomposition so that the
    normals reproduce it; each vertex spans the Lorentz-orthogonal complement
    of the other normals and is put on the upper sheet.
    """
    report = lanner_check(cox, tol)
    if not report.ok:
        raise RealizationError("Coxeter matrix does not describe a compact hyperbolic simplex")
    G = gram_matrix(cox)
    n = cox.rank
    w, Q = np.linalg.eigh(G)
    order = np.argsort(-w)  # positive eigenvalues first, the negative one last
    w, Q = w[order], Q[:, order]
    normals = Q * np.sqrt(np.abs(w))

    vertices = np.empty((n, n))
    J = np.ones(n)
    J[-1] = -1.0
    for i in range(n):
        others = np.delete(normals, i, axis=0) * J
        _, _, vt = np.linalg.svd(others)
        v = vt[-1]
        q = lorentz(v, v)
        if q >= 0:
            raise RealizationError(f"vertex {i} is not timelike (norm {q})")
        v = v / math.sqrt(-q)
        if v[-1] < 0:
            v = -v
        vertices[i] = v
    # orient normals outward: every vertex on the inner side of its opposite facet
    if lorentz(vertices[0], normals[0]) > 0:
        normals = -normals
    sides = [lorentz(vertices[i], normals[i]) for i in range(n)]
    if not all(s < 0 for s in sides):
        raise RealizationError("inconsistent facet orientations")

    residual = float(np.max(np.abs(lorentz_gram(normals) - G)))
    if residual > tol:
        raise RealizationError(f"Gram reconstruction residual {residual:.3e} exceeds {tol:g}")
    return SimplexRealization(cox, normals, vertices, residual)


def dihedral_angle(cox: CoxeterSimplex, triple) -> float:
    """Angle of the simplex along the triangle with the given vertex labels."""
    triple = tuple(sorted(triple))
    n = cox.rank
    if len(triple) != n - 2 or len(set(triple)) != len(triple) or any(not 0 <= a < n for a in triple):
        raise ValueError(f"invalid label triple {triple}")
    b, c = (a for a in range(n) if a not in triple)
    return math.pi / cox.m[b][c]


def dihedral_angle_map(cox: CoxeterSimplex) -> dict[tuple[int, ...], float]:
    return {t: dihedral_angle(cox, t) for t in combinations(range(cox.rank), cox.rank - 2)}


def geodesic_point(r: SimplexRealization, a: int, b: int, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Point at fraction ``s`` of the way from vertex ``a`` to ``b``, with unit tangent."""
    va, vb = r.vertices[a], r.vertices[b]
    length = math.acosh(-lorentz(va, vb))
    tangent_a = (vb + lorentz(va, vb) * va) / math.sinh(length)
    t = s * length
    p = math.cosh(t) * va + math.sinh(t) * tangent_a
    dp = math.sinh(t) * va + math.cosh(t) * tangent_a
    return p, dp


def half_plane_direction(r: SimplexRealization, triangle, edge, s: float = 0.5) -> np.ndarray:
    """Unit tangent at a point of ``edge`` pointing into the plane of ``triangle``.

    The vector is orthogonal to the edge, so it describes the half-plane of
    the triangle bounded by the edge's geodesic.
    """
    triangle, edge = tuple(sorted(triangle)), tuple(sorted(edge))
    if not set(edge) < set(triangle) or len(edge) != 2:
        raise ValueError(f"edge {edge} is not an edge of triangle {triangle}")
    (c,) = (x for x in triangle if x not in edge)
    p, dp = geodesic_point(r, edge[0], edge[1], s)
    vc = r.vertices[c]
    # project v_c onto the tangent space at p, then off the edge direction
    w = vc + lorentz(vc, p) * p
    w = w - lorentz(w, dp) * dp
    q = lorentz(w, w)
    if q <= 1e-24:
        raise RealizationError("degenerate tangent system")
    return w / math.sqrt(q)


def angle_between(x: np.ndarray, y: np.ndarray) -> float:
    """Angle between unit spacelike vectors, accurate near 0 and pi."""
    d, s = x - y, x + y
    return 2.0 * math.atan2(math.sqrt(max(lorentz(d, d), 0.0)), math.sqrt(max(lorentz(s, s), 0.0)))


def wedge_angle(r: SimplexRealization, t1, t2, edge, s: float = 0.5) -> float:
    """Angle at ``edge`` between the planes of triangles ``t1`` and ``t2``."""
    if tuple(sorted(t1)) == tuple(sorted(t2)):
        return 0.0
    return angle_between(half_plane_direction(r, t1, edge, s), half_plane_direction(r, t2, edge, s))
