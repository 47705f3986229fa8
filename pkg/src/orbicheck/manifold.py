"""Links of faces and closed PL-manifold certification.

With label-preserving gluings the link of a face with labels ``S`` is itself
a label-preserving complex: one simplex per member of the face class, on the
complementary labels, glued wherever the ambient complex glues a facet that
contains ``S``.  A closed complex is a PL manifold when every face link is a
PL sphere of the right dimension; we certify spheres recursively.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .algebra import homology
from .complex_core import FaceClass, GluingTable, QuotientComplex, build_quotient, euler_characteristic
from .group import DEFAULT_PASSES, is_trivially_presented, presentation, tietze_simplify

CERTIFIED_SPHERE = "certified sphere"
SPHERE_HOMOLOGY_ONLY = "sphere homology, pi_1 inconclusive"
NOT_A_SPHERE = "not a sphere"


class BoundaryError(ValueError):
    """The complex has unglued facets."""


@dataclass(frozen=True)
class LinkComplex:
    complex: QuotientComplex
    face: FaceClass
    parent_simplices: tuple[int, ...]  # link simplex i sits in parent simplex parent_simplices[i]

    @property
    def dim(self) -> int:
        return self.complex.dim


def link_complex(qc: QuotientComplex, face: FaceClass) -> LinkComplex:
    labels = face.labels
    comp = tuple(a for a in qc.table.labels if a not in labels)
    if not comp:
        raise ValueError("top-dimensional faces have empty links")
    members = face.simplices
    local = {j: i for i, j in enumerate(members)}
    assignments = {}
    for j in members:
        for c in comp:
            facet = tuple(sorted(labels + tuple(a for a in comp if a != c)))
            k = qc.table.partner(j, facet)
            if k is not None:
                assignments[(local[j], tuple(a for a in comp if a != c))] = local[k]
    table = GluingTable(len(members), assignments, comp)
    return LinkComplex(build_quotient(table), face, members)


def is_connected(qc: QuotientComplex) -> bool:
    n = qc.f_vector[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if qc.dim == 0:
        return n == 1
    for e in range(qc.f_vector[1]):
        (a, _), (b, _) = qc.boundary(1, e)
        parent[find(a)] = find(b)
    return len({find(v) for v in range(n)}) == 1


@dataclass
class SphereCheck:
    dim: int
    status: str
    reasons: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == CERTIFIED_SPHERE


def check_sphere(qc: QuotientComplex, pass_budget: int = DEFAULT_PASSES) -> SphereCheck:
    """Certify that a closed label complex of dimension <= 3 is a PL sphere.

    Dimension 0: two points.  Dimension 1: a connected closed 1-complex (a
    single circle).  Dimension 2: connected, closed, chi = 2, every vertex
    link a circle.  Dimension 3: connected, closed, all lower links spheres,
    homology (Z, 0, 0, Z) and a presentation of pi_1 that simplifies to the
    empty one.
    """
    d = qc.dim
    reasons = []
    if d == 0:
        if qc.f_vector[0] != 2:
            reasons.append(f"{qc.f_vector[0]} points, expected 2")
        return SphereCheck(d, NOT_A_SPHERE if reasons else CERTIFIED_SPHERE, reasons)
    if qc.has_boundary:
        reasons.append("has unglued facets")
    if not is_connected(qc):
        reasons.append("disconnected")
    if reasons:
        return SphereCheck(d, NOT_A_SPHERE, reasons)

    for fd in range(d - 1):
        for face in qc.classes[fd]:
            sub = check_sphere(link_complex(qc, face).complex, pass_budget)
            if not sub.ok:
                reasons.append(f"link of {fd}-face {face.index} {face.labels}: {sub.status} ({'; '.join(sub.reasons)})")
    if reasons:
        return SphereCheck(d, NOT_A_SPHERE, reasons)

    if d == 2:
        chi = euler_characteristic(qc)
        if chi != 2:
            return SphereCheck(d, NOT_A_SPHERE, [f"euler characteristic {chi}, expected 2"])
    if d >= 3:
        groups = homology(qc)
        expected = [1] + [0] * (d - 1) + [1]
        if [g.rank for g in groups] != expected or any(g.torsion for g in groups):
            return SphereCheck(d, NOT_A_SPHERE, ["homology " + ", ".join(map(str, groups))])
        simplified = tietze_simplify(presentation(qc), pass_budget)
        if not is_trivially_presented(simplified):
            return SphereCheck(d, SPHERE_HOMOLOGY_ONLY, [f"pi_1 simplified to {simplified}"])
    return SphereCheck(d, CERTIFIED_SPHERE)


@dataclass
class FaceLinkResult:
    dim: int
    index: int
    labels: tuple[int, ...]
    link_f_vector: tuple[int, ...]
    link_euler: int
    check: SphereCheck


@dataclass
class ManifoldReport:
    results: list[FaceLinkResult]

    @property
    def failures(self) -> list[FaceLinkResult]:
        return [r for r in self.results if not r.check.ok]

    @property
    def passed(self) -> bool:
        return not self.failures

    def checked(self, dim: int) -> int:
        return sum(1 for r in self.results if r.dim == dim)


def _check_face(qc: QuotientComplex, face: FaceClass, pass_budget: int) -> FaceLinkResult:
    link = link_complex(qc, face).complex
    return FaceLinkResult(face.dim, face.index, face.labels, link.f_vector,
                          euler_characteristic(link), check_sphere(link, pass_budget))


def verify_closed_pl_manifold(qc: QuotientComplex, pass_budget: int = DEFAULT_PASSES,
                              workers: int = 1) -> ManifoldReport:
    """Check every face link below codimension 1 is a sphere.

    For a 4-complex: triangle links are circles, edge links 2-spheres and
    vertex links certified 3-spheres.  Per-face checks are independent;
    results come back in (dimension, class index) order.
    """
    if qc.has_boundary:
        missing = [s for s in qc.table.slots() if s not in qc.table.assignments]
        raise BoundaryError(f"{len(missing)} unglued facets, first {missing[0]}")
    faces = [face for d in range(qc.dim - 2, -1, -1) for face in qc.classes[d]]
    if workers == 1:
        results = [_check_face(qc, f, pass_budget) for f in faces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda f: _check_face(qc, f, pass_budget), faces))
    return ManifoldReport(results)
