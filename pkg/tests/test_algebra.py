import random
from itertools import combinations, permutations
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from orbicheck.algebra import (
    ChainComplexHomology,
    IntegerMatrix,
    NotACycleError,
    abelian_invariants,
    betti_numbers,
    boundary_matrices,
    homology,
    homology_coordinates,
    smith_normal_form,
)
from orbicheck.complex_core import build_quotient, euler_characteristic, simplex_double

from conftest import random_table


# ---------------------------------------------------------------- oracle

def _perm_sign(p):
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for p in permutations(range(n)):
        term = _perm_sign(p)
        for i in range(n):
            term *= rows[i][p[i]]
            if not term:
                break
        total += term
    return total


def determinantal_factors(M):
    """Invariant factors as ratios of successive gcds of k x k minors."""
    rows = M.tolist()
    m, n = M.shape
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for ri in combinations(range(m), k):
            for ci in combinations(range(n), k):
                g = gcd(g, leibniz_det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        divisors.append(g)
    return tuple(divisors[k] // divisors[k - 1] for k in range(1, len(divisors)))


matrices = st.integers(1, 5).flatmap(lambda m: st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=500, deadline=None)
@given(matrices)
def test_snf_matches_determinant_divisors(rows):
    M = IntegerMatrix(rows)
    s = smith_normal_form(M)
    assert s.factors == determinantal_factors(M)
    assert all(f > 0 for f in s.factors)
    assert all(b % a == 0 for a, b in zip(s.factors, s.factors[1:]))
    assert s.U @ M @ s.V == s.diagonal()
    m, n = M.shape
    assert s.U @ s.U_inv == IntegerMatrix.identity(m)
    assert s.V @ s.V_inv == IntegerMatrix.identity(n)


def _random_unimodular(rng, n):
    A = IntegerMatrix.identity(n).tolist()
    for _ in range(3 * n):
        i, k = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == k:
            A[i] = [-x for x in A[i]]
        else:
            c = rng.randint(-2, 2)
            A[i] = [a + c * b for a, b in zip(A[i], A[k])]
    return IntegerMatrix(A)


def test_snf_invariant_under_unimodular_change():
    rng = random.Random(11)
    for _ in range(100):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        M = IntegerMatrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)])
        P, Q = _random_unimodular(rng, m), _random_unimodular(rng, n)
        assert abs(leibniz_det(P.tolist())) == 1
        assert smith_normal_form(P @ M @ Q).factors == smith_normal_form(M).factors


@pytest.mark.parametrize("rows, factors", [
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], (2, 6, 12)),
    ([[0, 0], [0, 0]], ()),
    ([[6]], (6,)),
    ([[2, 0], [0, 3]], (1, 6)),
    ([[1, 2, 3]], (1,)),
])
def test_snf_examples(rows, factors):
    assert smith_normal_form(IntegerMatrix(rows)).factors == factors


def test_matrix_text_round_trip():
    M = IntegerMatrix([[1, -2, 0], [0, 3, 4]])
    assert M.to_text().splitlines()[0] == "2 3"
    assert IntegerMatrix.from_text(M.to_text()) == M


def test_abelian_invariants():
    assert abelian_invariants(IntegerMatrix([[3]])) == (0, (3,))
    assert abelian_invariants(IntegerMatrix([[2, 0], [0, 0]])) == (1, (2,))


# ---------------------------------------------------------------- chain complexes

def test_boundary_squares_to_zero_on_random_tables():
    rng = random.Random(2024)
    for _ in range(120):
        qc = build_quotient(random_table(rng, rng.randint(1, 6)))
        mats = boundary_matrices(qc)
        for a, b in zip(mats, mats[1:]):
            assert (a @ b).is_zero()


def test_euler_characteristic_equals_alternating_betti_sum():
    rng = random.Random(5)
    for _ in range(40):
        qc = build_quotient(random_table(rng, rng.randint(1, 5)))
        b = betti_numbers(qc)
        assert sum((-1) ** i * x for i, x in enumerate(b)) == euler_characteristic(qc)


def test_cp2_boundary_shapes_and_square(cp2):
    mats = boundary_matrices(cp2)
    assert [m.shape for m in mats] == [(10, 51), (51, 134), (134, 150), (150, 60)]
    for a, b in zip(mats, mats[1:]):
        assert (a @ b).is_zero()


def test_cp2_homology(cp2_homology):
    assert [str(g) for g in cp2_homology.groups()] == ["Z", "0", "Z", "0", "Z"]


def test_sphere_homology():
    assert [str(g) for g in homology(build_quotient(simplex_double()))] == ["Z", "0", "0", "0", "Z"]


def _orientation_cycle(qc):
    # facets glued by reflection carry the same boundary sign in both simplices
    n = qc.table.n_simplices
    sign = {0: 1}
    stack = [0]
    while stack:
        j = stack.pop()
        for f in qc.table.facets():
            k = qc.table.partner(j, f)
            if k not in sign:
                sign[k] = -sign[j]
                stack.append(k)
            else:
                assert sign[k] == -sign[j]
    return [sign[j] for j in range(n)]


def test_fundamental_class_is_a_generator(cp2, cp2_homology):
    z = _orientation_cycle(cp2)
    assert homology_coordinates(cp2, z, 4, cp2_homology) in ((1,), (-1,))


def test_free_generators_have_unit_coordinates(cp2_homology):
    (g,) = cp2_homology.free_generators(2)
    assert cp2_homology.coordinates(g, 2) == ((1,), ())


def test_boundaries_have_zero_coordinates(cp2, cp2_homology):
    d3 = cp2_homology.boundary(3)
    for col in range(0, 150, 37):
        assert cp2_homology.coordinates(list(d3.column(col)), 2) == ((0,), ())


def test_non_cycle_rejected(cp2_homology):
    z = [0] * 134
    z[0] = 1
    with pytest.raises(NotACycleError):
        cp2_homology.coordinates(z, 2)
    with pytest.raises(ValueError):
        cp2_homology.coordinates([0, 1], 2)
