"""Orbifold structure of a complex tiled by copies of a Coxeter simplex.

Every simplex of the complex is identified with the Coxeter simplex by its
vertex labels, and each facet gluing is the reflection in that facet.  Around
a triangle with dihedral angle pi/m there must be a divisor ``d`` of ``2m``
simplices; the point then has weight ``2m / d`` and is singular when that
exceeds 1.  Singular triangles assemble into the locus surfaces.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import ChainComplexHomology
from .complex_core import QuotientComplex
from .coxeter import (
    CoxeterSimplex,
    SimplexRealization,
    angle_between,
    deleted_node_diagram,
    dihedral_angle,
    half_plane_direction,
    realize_simplex,
    reflect,
)

FLATNESS_TOL = 1e-6


class OrbifoldCheckError(ValueError):
    def __init__(self, message: str, failures=()):
        self.failures = list(failures)
        super().__init__(message)


def _check_inputs(qc: QuotientComplex, cox: CoxeterSimplex):
    if qc.has_boundary:
        raise OrbifoldCheckError("complex has unglued facets")
    if cox.rank != len(qc.table.labels):
        raise OrbifoldCheckError(f"Coxeter rank {cox.rank} does not match {len(qc.table.labels)} labels")


# ---------------------------------------------------------------- triangles


@dataclass(frozen=True)
class TriangleRecord:
    index: int
    labels: tuple[int, int, int]
    simplices: tuple[int, ...]
    theta: float
    full_count: int  # 2m = 2 pi / theta
    degree: int

    @property
    def divides(self) -> bool:
        return self.full_count % self.degree == 0

    @property
    def weight(self) -> int | None:
        return self.full_count // self.degree if self.divides else None

    @property
    def singular(self) -> bool:
        return self.divides and self.weight > 1


def triangle_report(qc: QuotientComplex, cox: CoxeterSimplex, strict: bool = True) -> list[TriangleRecord]:
    """Degree and weight of every triangle class.

    With ``strict`` a degree that does not divide ``2 pi / theta`` raises
    ``OrbifoldCheckError`` listing every offending class.
    """
    _check_inputs(qc, cox)
    records = []
    for t in qc.classes[2]:
        b, c = (a for a in qc.table.labels if a not in t.labels)
        records.append(TriangleRecord(t.index, t.labels, t.simplices, dihedral_angle(cox, t.labels),
                                      2 * cox.m[b][c], t.degree))
    bad = [r for r in records if not r.divides]
    if strict and bad:
        raise OrbifoldCheckError(
            f"{len(bad)} triangle classes with degree not dividing 2pi/theta: "
            + ", ".join(f"t{r.index}{r.labels} degree {r.degree} vs {r.full_count}" for r in bad),
            bad)
    return records


def pi_over_2_exceptions(qc: QuotientComplex, cox: CoxeterSimplex) -> list[TriangleRecord]:
    """Right-angled triangle classes whose degree is not 4."""
    records = [r for r in triangle_report(qc, cox, strict=False) if r.full_count == 4]
    bad = [r for r in records if r.degree not in (2, 4)]
    if bad:
        raise OrbifoldCheckError("right-angled triangle classes with degree other than 2 or 4", bad)
    return [r for r in records if r.degree != 4]


# ---------------------------------------------------------------- vertices


@dataclass(frozen=True)
class VertexRecord:
    index: int
    label: int
    degree: int
    diagram: str
    group_order: int

    @property
    def integral(self) -> bool:
        return self.group_order % self.degree == 0

    @property
    def local_order(self) -> int | None:
        return self.group_order // self.degree if self.integral else None


def vertex_report(qc: QuotientComplex, cox: CoxeterSimplex, strict: bool = True) -> list[VertexRecord]:
    """Deleted-node group order over degree at every vertex class."""
    _check_inputs(qc, cox)
    out = []
    for v in qc.classes[0]:
        (k,) = v.labels
        name, order = deleted_node_diagram(cox, k)
        out.append(VertexRecord(v.index, k, v.degree, name, order))
    bad = [r for r in out if not r.integral]
    if strict and bad:
        raise OrbifoldCheckError("non-integral vertex local orders: "
                                 + ", ".join(f"v{r.index} {r.group_order}/{r.degree}" for r in bad), bad)
    return out


# ---------------------------------------------------------------- locus

COMPONENT_NAMES = {(4, 4): "A4", (4, 2): "A2", (2, None): "B", (10, None): "C"}


@dataclass
class LocusComponent:
    name: str
    triangles: tuple[int, ...]
    edges: tuple[int, ...]
    vertices: tuple[int, ...]
    interior_edges: tuple[int, ...]
    boundary_edges: tuple[int, ...]
    weights: dict[int, int]
    euler_characteristic: int
    cycle_coefficients: dict[int, int] | None
    mod2_cycle: bool

    @property
    def weight(self) -> int | None:
        values = set(self.weights.values())
        return values.pop() if len(values) == 1 else None


def _triangle_edges(qc: QuotientComplex, t: int) -> list[tuple[int, int]]:
    return qc.boundary(2, t)


def _chain_boundary(qc: QuotientComplex, coeffs: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for t, c in coeffs.items():
        for e, s in qc.boundary(2, t):
            out[e] = out.get(e, 0) + c * s
    return {e: c for e, c in out.items() if c}


def cycle_signs(qc: QuotientComplex, triangles) -> dict[int, int] | None:
    """First +-1 assignment (with +1 before -1) whose chain is a cycle."""
    triangles = sorted(triangles)
    for signs in product((1, -1), repeat=len(triangles)):
        coeffs = dict(zip(triangles, signs))
        if not _chain_boundary(qc, coeffs):
            return coeffs
    return None


def locus_components(qc: QuotientComplex, cox: CoxeterSimplex,
                     records: list[TriangleRecord] | None = None) -> list[LocusComponent]:
    """Connected surfaces of the singular triangle subcomplex.

    Two singular triangles continue each other across an edge class exactly
    when they are the only singular triangles at that edge; edges met by one
    or by three or more singular triangles are where surfaces end or branch.
    """
    if records is None:
        records = triangle_report(qc, cox)
    singular = {r.index: r for r in records if r.singular}
    incidence: dict[int, list[int]] = {}
    for t in sorted(singular):
        for e, _ in _triangle_edges(qc, t):
            incidence.setdefault(e, []).append(t)

    parent = {t: t for t in singular}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, ts in incidence.items():
        if len(ts) == 2:
            a, b = find(ts[0]), find(ts[1])
            parent[max(a, b)] = min(a, b)

    groups: dict[int, list[int]] = {}
    for t in sorted(singular):
        groups.setdefault(find(t), []).append(t)
    ordered = sorted(groups.values(), key=lambda ts: (len(ts), ts[0]))

    out = []
    used = set()
    for n, ts in enumerate(ordered):
        comp_inc: dict[int, int] = {}
        for t in ts:
            for e, _ in _triangle_edges(qc, t):
                comp_inc[e] = comp_inc.get(e, 0) + 1
        edges = tuple(sorted(comp_inc))
        vertices = tuple(sorted({v for e in edges for v, _ in qc.boundary(1, e)}))
        weights = {t: singular[t].weight for t in ts}
        wset = set(weights.values())
        key = (len(ts), wset.pop() if len(ts) == 4 and len(wset) == 1 else None)
        name = COMPONENT_NAMES.get(key)
        if name is None or name in used:
            name = f"L{n}"
        used.add(name)
        out.append(LocusComponent(
            name=name,
            triangles=tuple(ts),
            edges=edges,
            vertices=vertices,
            interior_edges=tuple(e for e in edges if comp_inc[e] >= 2),
            boundary_edges=tuple(e for e in edges if comp_inc[e] == 1),
            weights=weights,
            euler_characteristic=len(vertices) - len(edges) + len(ts),
            cycle_coefficients=cycle_signs(qc, ts),
            mod2_cycle=all(c % 2 == 0 for c in comp_inc.values()),
        ))
    return out


@dataclass(frozen=True)
class Incidence:
    first: str
    second: str
    shared_edges: tuple[int, ...]
    shared_vertices: tuple[int, ...]


def component_incidence(components: list[LocusComponent]) -> list[Incidence]:
    """Edges and vertices shared by each pair of components."""
    out = []
    for i, a in enumerate(components):
        for b in components[i + 1:]:
            edges = tuple(sorted(set(a.edges) & set(b.edges)))
            verts = tuple(sorted(set(a.vertices) & set(b.vertices)))
            if edges or verts:
                out.append(Incidence(a.name, b.name, edges, verts))
    return out


# ---------------------------------------------------------------- flatness


@dataclass
class EdgeFlatness:
    edge: int
    triangles: tuple[int, int]
    angle: float
    spread: float  # largest disagreement between developments along different galleries
    gallery_length: int

    def residual(self) -> float:
        return abs(self.angle - math.pi) + self.spread


@dataclass
class FlatnessReport:
    component: str
    edges: list[EdgeFlatness]
    tol: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_residual(self) -> float:
        return max((e.residual() for e in self.edges), default=0.0)


def _develop_around_edge(qc: QuotientComplex, r: SimplexRealization, edge_labels, members, start):
    """Reflections placing each simplex around an edge in the frame of ``start``.

    Walks the link of the edge breadth-first; crossing the facet opposite
    label ``c`` composes with the reflection in normal ``c``.
    """
    comp = [a for a in qc.table.labels if a not in edge_labels]
    members = set(members)
    frames = {start: np.eye(len(qc.table.labels))}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        j = queue.popleft()
        for c in comp:
            facet = tuple(a for a in qc.table.labels if a != c)
            k = qc.table.partner(j, facet)
            if k is None or k in frames:
                continue
            assert k in members
            u = r.normals[c]
            R = np.eye(len(u)) - 2.0 * np.outer(u, u * np.r_[np.ones(len(u) - 1), -1.0])
            frames[k] = frames[j] @ R
            depth[k] = depth[j] + 1
            queue.append(k)
    return frames, depth


def flatness_check(qc: QuotientComplex, cox: CoxeterSimplex, component: LocusComponent,
                   realization: SimplexRealization | None = None, tol: float = FLATNESS_TOL) -> FlatnessReport:
    """Check the component's sheets continue each other straight across edges.

    At an interior edge shared by triangles P and Q, develop the simplices
    around the edge into the frame of a simplex containing P.  The half-plane
    of Q seen from there must be opposite to that of P (angle pi), and must
    be the same whichever simplex of Q's class the development reaches.
    """
    r = realization or realize_simplex(cox)
    report = FlatnessReport(component.name, [], tol)
    tris = set(component.triangles)
    for e in component.interior_edges:
        edge = qc.face(1, e)
        at_edge = [t for t in sorted(tris) if e in {x for x, _ in qc.boundary(2, t)}]
        if len(at_edge) != 2:
            report.failures.append(f"edge e{e}: {len(at_edge)} component triangles meet, expected 2")
            continue
        P, Q = (qc.face(2, t) for t in at_edge)
        start = next(j for j in edge.simplices if qc.index_of(j, P.labels) == P.index)
        frames, depth = _develop_around_edge(qc, r, edge.labels, edge.simplices, start)
        wP = half_plane_direction(r, P.labels, edge.labels)
        wQ = half_plane_direction(r, Q.labels, edge.labels)
        images = [(depth[j], frames[j] @ wQ) for j in edge.simplices
                  if qc.index_of(j, Q.labels) == Q.index]
        images.sort(key=lambda x: x[0])
        angles = [angle_between(wP, w) for _, w in images]
        spread = max(angle_between(images[0][1], w) for _, w in images)
        item = EdgeFlatness(e, (P.index, Q.index), angles[0], spread, images[0][0])
        report.edges.append(item)
        if item.residual() > tol:
            report.failures.append(f"edge e{e}: angle {item.angle:.12f} (spread {spread:.2e}), expected pi")
    return report


# ---------------------------------------------------------------- homology classes

LOCUS_CHAINS = (
    ("B", ((1, "B"),)),
    ("A4+A2", ((1, "A4"), (1, "A2"))),
    ("A4+C", ((1, "A4"), (1, "C"))),
    ("-A4+C", ((-1, "A4"), (1, "C"))),
)


@dataclass(frozen=True)
class LocusClass:
    name: str
    coefficients: dict[int, int]
    multiple: int  # absolute value of the coordinate on the H_2 generator


def chain_cycle(qc: QuotientComplex, terms, components: dict[str, LocusComponent]) -> dict[int, int]:
    """Signs on the named components' triangles making their sum a cycle.

    ``terms`` is a sequence of ``(sign, name)``.  All +-1 assignments are
    searched, the outer sign of each term applied to its own triangles, and
    the first cycle in enumeration order is kept.
    """
    tris: list[tuple[int, int]] = []
    for sign, name in terms:
        tris += [(sign, t) for t in components[name].triangles]
    for signs in product((1, -1), repeat=len(tris)):
        coeffs: dict[int, int] = {}
        for (outer, t), s in zip(tris, signs):
            coeffs[t] = coeffs.get(t, 0) + outer * s
        if not _chain_boundary(qc, coeffs):
            return {t: c for t, c in coeffs.items() if c}
    raise OrbifoldCheckError(f"no sign assignment makes {terms} a cycle")


def locus_classes(qc: QuotientComplex, components: list[LocusComponent],
                  chains=LOCUS_CHAINS, hom: ChainComplexHomology | None = None) -> list[LocusClass]:
    """Multiples of the generator of H_2 represented by the named locus chains."""
    hom = hom or ChainComplexHomology(qc)
    if hom.group(2).rank != 1:
        raise OrbifoldCheckError(f"H_2 is {hom.group(2)}, expected Z")
    by_name = {c.name: c for c in components}
    out = []
    for name, terms in chains:
        coeffs = chain_cycle(qc, terms, by_name)
        vec = [0] * qc.f_vector[2]
        for t, c in coeffs.items():
            vec[t] = c
        (k,), _ = hom.coordinates(vec, 2)
        out.append(LocusClass(name, coeffs, abs(k)))
    return out
