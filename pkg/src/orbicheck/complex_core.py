"""Face-pairing complexes with label-preserving gluings and their quotients.

A gluing table lists, for each simplex ``j`` and facet ``F`` (a set of vertex
labels), the simplex whose same-labelled facet is glued to it.  Because every
identification preserves labels, a face of the quotient is determined by a
label set together with the set of simplices sharing it.

The same machinery is used for links: the link of a face is again a
label-preserving complex, on the complementary labels, so tables here are
allowed to carry any label set.  Only the file format is restricted to
dimension 4.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple

LABELS = (0, 1, 2, 3, 4)

Labels = tuple[int, ...]
Slot = tuple[int, Labels]


class ComplexFormatError(ValueError):
    """Malformed complex file; ``lineno`` is 1-based (0 if not line-specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno else ""
        super().__init__(prefix + message)


class FaceRef(NamedTuple):
    simplex: int
    labels: Labels

    @property
    def dim(self) -> int:
        return len(self.labels) - 1


@dataclass(frozen=True)
class GluingTable:
    """Face pairings of ``n_simplices`` simplices on a common label set.

    ``assignments`` maps a slot ``(j, facet)`` to the partner simplex; slots
    that are absent are unglued (boundary).
    """

    n_simplices: int
    assignments: Mapping[Slot, int]
    labels: Labels = LABELS

    def __post_init__(self):
        if self.n_simplices < 1:
            raise ValueError("a gluing table needs at least one simplex")
        object.__setattr__(self, "assignments", dict(self.assignments))

    @property
    def dim(self) -> int:
        return len(self.labels) - 1

    def facets(self) -> list[Labels]:
        return list(combinations(self.labels, len(self.labels) - 1))

    def slots(self) -> Iterator[Slot]:
        for j in range(self.n_simplices):
            for facet in self.facets():
                yield j, facet

    def partner(self, simplex: int, facet: Iterable[int]) -> int | None:
        return self.assignments.get((simplex, tuple(sorted(facet))))

    @property
    def is_closed(self) -> bool:
        return len(self.assignments) == self.n_simplices * len(self.labels)

    @classmethod
    def from_rows(cls, rows: Mapping[int, Iterable[int | None]] | list, labels: Labels = LABELS):
        """Build a table from per-simplex rows listing partners facet by facet.

        Facets are taken in lexicographic order, so for labels 0..4 a row reads
        ``(0 1 2 3), (0 1 2 4), (0 1 3 4), (0 2 3 4), (1 2 3 4)``.
        """
        if not isinstance(rows, Mapping):
            rows = dict(enumerate(rows))
        facets = list(combinations(labels, len(labels) - 1))
        assignments = {}
        for j, row in rows.items():
            for facet, k in zip(facets, row, strict=True):
                if k is not None:
                    assignments[(j, facet)] = k
        return cls(max(rows) + 1, assignments, tuple(labels))


# ---------------------------------------------------------------- parsing

_GLUE = re.compile(r"^glue\s+(\d+)\s+\(([^()]*)\)\s+(\d+)$")


def parse_complex(text: str) -> GluingTable:
    """Parse the line-based complex format (``dim``/``simplices``/``glue``)."""
    n = None
    assignments: dict[Slot, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "dim":
            parts = line.split()
            if len(parts) != 2 or parts[1] != "4":
                raise ComplexFormatError("only 'dim 4' is supported", lineno)
        elif head == "simplices":
            parts = line.split()
            if n is not None:
                raise ComplexFormatError("repeated 'simplices' line", lineno)
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ComplexFormatError("expected 'simplices <positive integer>'", lineno)
            n = int(parts[1])
        elif head == "glue":
            if n is None:
                raise ComplexFormatError("'glue' before 'simplices'", lineno)
            m = _GLUE.match(line)
            if m is None:
                raise ComplexFormatError(f"expected 'glue <j> (a b c d) <k>', got {raw.strip()!r}", lineno)
            j, k = int(m.group(1)), int(m.group(3))
            tokens = m.group(2).split()
            if not all(t.isdigit() for t in tokens):
                raise ComplexFormatError(f"non-integer label in facet ({m.group(2)})", lineno)
            facet = tuple(int(t) for t in tokens)
            if len(facet) != 4:
                raise ComplexFormatError(f"facet must have 4 labels, got {len(facet)}", lineno)
            if len(set(facet)) != 4:
                raise ComplexFormatError(f"repeated label in facet ({m.group(2)})", lineno)
            if any(a not in LABELS for a in facet):
                raise ComplexFormatError(f"label out of range 0..4 in facet ({m.group(2)})", lineno)
            if list(facet) != sorted(facet):
                raise ComplexFormatError(f"facet labels must be ascending ({m.group(2)})", lineno)
            for idx in (j, k):
                if idx >= n:
                    raise ComplexFormatError(f"simplex index {idx} >= {n}", lineno)
            if (j, facet) in assignments:
                raise ComplexFormatError(f"slot {j} ({m.group(2)}) assigned twice", lineno)
            assignments[(j, facet)] = k
        else:
            raise ComplexFormatError(f"unknown directive {head!r}", lineno)
    if n is None:
        raise ComplexFormatError("missing 'simplices' line")
    return GluingTable(n, assignments)


def format_complex(table: GluingTable) -> str:
    if table.labels != LABELS:
        raise ValueError("only 4-dimensional tables can be written")
    lines = ["dim 4", f"simplices {table.n_simplices}"]
    for (j, facet), k in sorted(table.assignments.items()):
        lines.append(f"glue {j} ({' '.join(map(str, facet))}) {k}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "involution" | "self-gluing"
    slot: Slot
    partner: Slot
    message: str

    def __str__(self):
        return self.message


def _fmt_slot(slot: Slot) -> str:
    j, facet = slot
    return f"{j} ({' '.join(map(str, facet))})"


def validate(table: GluingTable) -> list[Diagnostic]:
    """Check the involution and no-self-gluing conditions slot by slot."""
    out = []
    for slot, k in sorted(table.assignments.items()):
        j, facet = slot
        other = (k, facet)
        if k == j:
            out.append(Diagnostic("self-gluing", slot, other,
                                  f"slot {_fmt_slot(slot)} is glued to itself"))
            continue
        back = table.assignments.get(other)
        if back != j:
            got = "unglued" if back is None else f"glued to {back}"
            out.append(Diagnostic("involution", slot, other,
                                  f"slot {_fmt_slot(slot)} -> {k}, but slot {_fmt_slot(other)} is {got}"))
    return out


# ---------------------------------------------------------------- quotient


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the least element as root so roots are canonical
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class FaceClass:
    """An equivalence class of faces; all members share ``labels``."""

    dim: int
    index: int
    labels: Labels
    simplices: tuple[int, ...]

    @property
    def members(self) -> tuple[FaceRef, ...]:
        return tuple(FaceRef(j, self.labels) for j in self.simplices)

    @property
    def representative(self) -> FaceRef:
        return FaceRef(self.simplices[0], self.labels)

    @property
    def degree(self) -> int:
        return len(self.simplices)


@dataclass(frozen=True, eq=False)
class QuotientComplex:
    table: GluingTable
    classes: tuple[tuple[FaceClass, ...], ...]
    _lookup: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return self.table.dim

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def has_boundary(self) -> bool:
        return not self.table.is_closed

    def class_of(self, simplex: int, labels: Iterable[int]) -> FaceClass:
        labels = tuple(sorted(labels))
        return self.classes[len(labels) - 1][self._lookup[(simplex, labels)]]

    def index_of(self, simplex: int, labels: Iterable[int]) -> int:
        return self._lookup[(simplex, tuple(sorted(labels)))]

    def face(self, dim: int, index: int) -> FaceClass:
        try:
            return self.classes[dim][index]
        except IndexError:
            raise KeyError(f"no {dim}-dimensional class {index}") from None

    def boundary(self, dim: int, index: int) -> list[tuple[int, int]]:
        """Signed boundary of a class as ``(class index, sign)`` pairs.

        Signs alternate over the ascending label order of the representative.
        """
        fc = self.face(dim, index)
        if dim == 0:
            return []
        j = fc.simplices[0]
        out = []
        for i, _ in enumerate(fc.labels):
            sub = fc.labels[:i] + fc.labels[i + 1:]
            out.append((self._lookup[(j, sub)], -1 if i % 2 else 1))
        return out

    def classes_with_labels(self, labels: Iterable[int]) -> list[FaceClass]:
        labels = tuple(sorted(labels))
        return [c for c in self.classes[len(labels) - 1] if c.labels == labels]


def build_quotient(table: GluingTable) -> QuotientComplex:
    """Identify faces under the closure of the facet gluings.

    Classes in each dimension are numbered by their least member
    ``(simplex, labels)``.
    """
    uf = _UnionFind()
    for (j, facet), k in table.assignments.items():
        for r in range(1, len(facet) + 1):
            for sub in combinations(facet, r):
                uf.union((j, sub), (k, sub))

    groups: dict = {}
    for j in range(table.n_simplices):
        for r in range(1, len(table.labels) + 1):
            for sub in combinations(table.labels, r):
                groups.setdefault(uf.find((j, sub)), []).append(j)

    per_dim: list[list] = [[] for _ in table.labels]
    for (j0, sub), members in groups.items():
        per_dim[len(sub) - 1].append((j0, sub, tuple(sorted(members))))

    classes = []
    lookup = {}
    for d, items in enumerate(per_dim):
        items.sort()
        row = []
        for idx, (_, sub, members) in enumerate(items):
            row.append(FaceClass(d, idx, sub, members))
            for j in members:
                lookup[(j, sub)] = idx
        classes.append(tuple(row))
    return QuotientComplex(table, tuple(classes), lookup)


def euler_characteristic(qc: QuotientComplex) -> int:
    return sum((-1) ** d * n for d, n in enumerate(qc.f_vector))


def face_degree(qc: QuotientComplex, dim: int, index: int) -> int:
    return qc.face(dim, index).degree


# ---------------------------------------------------------------- fixtures


def simplex_double(labels: Labels = LABELS) -> GluingTable:
    """Two simplices glued along every facet (a sphere)."""
    facets = list(combinations(labels, len(labels) - 1))
    assignments = {}
    for f in facets:
        assignments[(0, f)] = 1
        assignments[(1, f)] = 0
    return GluingTable(2, assignments, tuple(labels))


def single_simplex(labels: Labels = LABELS) -> GluingTable:
    return GluingTable(1, {}, tuple(labels))
