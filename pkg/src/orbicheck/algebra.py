"""Exact integer chain-complex algebra.

Matrices hold Python integers, so nothing here overflows or rounds.  The
Smith normal form keeps both unimodular transforms and their inverses, which
is what lets cycles be expressed in a homology basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .complex_core import QuotientComplex


class IntegerMatrix:
    """Dense integer matrix with exact arithmetic."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]], rows: int | None = None, cols: int | None = None):
        self._data = tuple(tuple(int(x) for x in r) for r in data)
        self.rows = len(self._data) if rows is None else rows
        if cols is None:
            cols = len(self._data[0]) if self._data else 0
        self.cols = cols
        if len(self._data) != self.rows or any(len(r) != self.cols for r in self._data):
            raise ValueError("ragged or mis-shaped matrix data")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntegerMatrix:
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, self._data))

    def __repr__(self):
        return f"IntegerMatrix({[list(r) for r in self._data]!r})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix([self.column(j) for j in range(self.cols)], self.cols, self.rows)

    def __matmul__(self, other):
        if isinstance(other, IntegerMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.cols)]
            return IntegerMatrix(
                [[sum(a * b for a, b in zip(r, c) if a) for c in cols] for r in self._data],
                self.rows, other.cols)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for matrix with {self.cols} columns")
        return [sum(a * b for a, b in zip(r, vec) if a) for r in self._data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntegerMatrix:
        return IntegerMatrix([[self._data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def to_text(self) -> str:
        """``rows cols`` header, then one row of integers per line."""
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(map(str, r)) for r in self._data]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> IntegerMatrix:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols = map(int, lines[0].split())
        data = [[int(x) for x in ln.split()] for ln in lines[1:]]
        return cls(data, rows, cols)


# ---------------------------------------------------------------- Smith form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == diag(factors)`` with ``U``, ``V`` unimodular."""

    factors: tuple[int, ...]
    U: IntegerMatrix
    U_inv: IntegerMatrix
    V: IntegerMatrix
    V_inv: IntegerMatrix
    shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.factors)

    def diagonal(self) -> IntegerMatrix:
        m, n = self.shape
        d = [[0] * n for _ in range(m)]
        for i, f in enumerate(self.factors):
            d[i][i] = f
        return IntegerMatrix(d, m, n)


def smith_normal_form(M: IntegerMatrix) -> SmithDecomposition:
    """Smith normal form by least-absolute-value pivoting."""
    m, n = M.shape
    A = M.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [r[:] for r in U]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [r[:] for r in V]

    # Elementary operations, each applied to A and kept in sync with the
    # transforms:  U A V = D at every step.
    def row_add(i, k, c):  # row_i += c * row_k
        if c == 0:
            return
        Ai, Ak = A[i], A[k]
        for j in range(n):
            if Ak[j]:
                Ai[j] += c * Ak[j]
        Ui_, Uk = U[i], U[k]
        for j in range(m):
            if Uk[j]:
                Ui_[j] += c * Uk[j]
        for r in Ui:
            if r[i]:
                r[k] -= c * r[i]

    def row_swap(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]
        for r in Ui:
            r[i], r[k] = r[k], r[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(j, k, c):  # col_j += c * col_k
        if c == 0:
            return
        for r in A:
            if r[k]:
                r[j] += c * r[k]
        for r in V:
            if r[k]:
                r[j] += c * r[k]
        Vj, Vk = Vi[j], Vi[k]
        for t in range(n):
            if Vj[t]:
                Vk[t] -= c * Vj[t]

    def col_swap(j, k):
        for r in A:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    factors = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)

        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
            # leftover remainders are smaller than the pivot; promote the least
            rest = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda r: r[0])
                if i is not None:
                    row_swap(i, t)
                else:
                    col_swap(j, t)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if A[t][t] < 0:
            row_neg(t)
        factors.append(A[t][t])

    return SmithDecomposition(
        tuple(factors),
        IntegerMatrix(U, m, m), IntegerMatrix(Ui, m, m),
        IntegerMatrix(V, n, n), IntegerMatrix(Vi, n, n),
        (m, n),
    )


# ---------------------------------------------------------------- chains


def boundary_matrices(qc: QuotientComplex) -> list[IntegerMatrix]:
    """``[∂_1, ..., ∂_top]``; ``∂_d`` maps d-chains to (d-1)-chains."""
    out = []
    f = qc.f_vector
    for d in range(1, qc.dim + 1):
        data = [[0] * f[d] for _ in range(f[d - 1])]
        for col in range(f[d]):
            for row, sign in qc.boundary(d, col):
                data[row][col] += sign
        out.append(IntegerMatrix(data, f[d - 1], f[d]))
    return out


def boundary_map(qc: QuotientComplex, d: int) -> IntegerMatrix:
    """``∂_d`` with the conventions ``∂_0 = 0`` and ``∂_{top+1} = 0``."""
    f = qc.f_vector
    if d <= 0:
        return IntegerMatrix.zeros(0, f[0])
    if d > qc.dim:
        return IntegerMatrix.zeros(f[qc.dim], 0)
    return boundary_matrices(qc)[d - 1]


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


class ChainComplexHomology:
    """Homology of a quotient complex with explicit bases.

    For degree ``d``, a cycle ``z`` is expressed in the basis read off from
    the Smith form of ``∂_{d+1}`` (``y = U z``): the first ``r`` coordinates
    carry torsion, the rest lie in the kernel of ``∂_d U^{-1}`` restricted to
    those coordinates, whose own Smith form supplies the free coordinates.
    """

    def __init__(self, qc: QuotientComplex):
        self.qc = qc
        self.dims = qc.f_vector
        self._bd = boundary_matrices(qc)
        self._free_cache: dict[int, tuple[SmithDecomposition, SmithDecomposition]] = {}

    def boundary(self, d: int) -> IntegerMatrix:
        f = self.dims
        if d <= 0:
            return IntegerMatrix.zeros(0, f[0])
        if d >= len(f):
            return IntegerMatrix.zeros(f[-1], 0)
        return self._bd[d - 1]

    @cached_property
    def _smith(self) -> dict[int, SmithDecomposition]:
        return {d: smith_normal_form(self.boundary(d)) for d in range(len(self.dims) + 1)}

    def smith(self, d: int) -> SmithDecomposition:
        return self._smith[d]

    def group(self, d: int) -> HomologyGroup:
        rank = self.dims[d] - self.smith(d).rank - self.smith(d + 1).rank
        torsion = tuple(f for f in self.smith(d + 1).factors if f > 1)
        return HomologyGroup(d, rank, torsion)

    def groups(self) -> list[HomologyGroup]:
        return [self.group(d) for d in range(len(self.dims))]

    def _free_part(self, d: int):
        if d not in self._free_cache:
            up = self.smith(d + 1)
            r = up.rank
            n = self.dims[d]
            cols = list(range(r, n))
            B = self.boundary(d) @ up.U_inv.submatrix(range(n), cols)
            sb = smith_normal_form(B)
            self._free_cache[d] = (up, sb)
        return self._free_cache[d]

    def coordinates(self, cycle: Sequence[int], d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Return ``(free, torsion)`` coordinates of the class of ``cycle``.

        Torsion coordinates are reduced modulo the corresponding factor.
        Raises ``NotACycleError`` if ``∂_d cycle != 0``.
        """
        z = [int(x) for x in cycle]
        if len(z) != self.dims[d]:
            raise ValueError(f"chain has length {len(z)}, expected {self.dims[d]}")
        bd = self.boundary(d) @ z
        if any(bd):
            raise NotACycleError(d, bd)
        up, sb = self._free_part(d)
        y = up.U @ z
        torsion = tuple(y[i] % f for i, f in enumerate(up.factors) if f > 1)
        w = sb.V_inv @ y[up.rank:]
        assert not any(w[:sb.rank]), "cycle coordinates leaked into the non-kernel part"
        return tuple(w[sb.rank:]), torsion

    def free_generators(self, d: int) -> list[list[int]]:
        """Cycles representing the free basis used by ``coordinates``."""
        up, sb = self._free_part(d)
        n = self.dims[d]
        Uinv = up.U_inv
        out = []
        for k in range(sb.rank, n - up.rank):
            yk = sb.V.column(k)
            full = [0] * up.rank + list(yk)
            out.append(Uinv @ full)
        return out


class NotACycleError(ValueError):
    def __init__(self, degree: int, boundary: list[int]):
        self.degree = degree
        self.boundary = boundary
        support = {i: c for i, c in enumerate(boundary) if c}
        super().__init__(f"chain of degree {degree} is not a cycle; nonzero boundary entries {support}")


def homology(qc: QuotientComplex) -> list[HomologyGroup]:
    return ChainComplexHomology(qc).groups()


def homology_coordinates(qc: QuotientComplex, cycle: Sequence[int], degree: int,
                         hom: ChainComplexHomology | None = None) -> tuple[int, ...]:
    """Free coordinates of ``[cycle]`` in the computed basis of ``H_degree``."""
    hom = hom or ChainComplexHomology(qc)
    free, _ = hom.coordinates(cycle, degree)
    return free


def betti_numbers(qc: QuotientComplex) -> list[int]:
    return [g.rank for g in homology(qc)]


def abelian_invariants(M: IntegerMatrix) -> tuple[int, tuple[int, ...]]:
    """Free rank and torsion of ``Z^cols / rowspace(M)``."""
    s = smith_normal_form(M)
    return M.cols - s.rank, tuple(f for f in s.factors if f > 1)
