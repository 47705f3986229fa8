import math
import random
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbicheck.coxeter import (
    CoxeterFormatError,
    CoxeterSimplex,
    NotFiniteError,
    RealizationError,
    deleted_node_diagram,
    dihedral_angle,
    dihedral_angle_map,
    finite_coxeter_order,
    finite_coxeter_type,
    gram_matrix,
    lanner_check,
    lorentz,
    lorentz_gram,
    parse_coxeter,
    realize_simplex,
    reflect,
    signature,
    wedge_angle,
)


def chain(*labels):
    """Linear diagram with the given edge labels."""
    return CoxeterSimplex.from_pairs(len(labels) + 1, {(i, i + 1): v for i, v in enumerate(labels)})


def group_order_by_enumeration(cox, nodes, limit=20000):
    """Size of the group generated by the geometric reflections, by closure."""
    G = gram_matrix(cox)[np.ix_(nodes, nodes)]
    n = len(nodes)
    gens = []
    for i in range(n):
        S = np.eye(n)
        S[i, :] -= 2 * G[i, :]
        gens.append(S)
    key = lambda A: tuple(np.round(A, 6).ravel())
    seen = {key(np.eye(n))}
    queue = deque([np.eye(n)])
    while queue:
        A = queue.popleft()
        for S in gens:
            B = A @ S
            k = key(B)
            if k not in seen:
                seen.add(k)
                queue.append(B)
                if len(seen) > limit:
                    raise AssertionError("group too large")
    return len(seen)


# ---------------------------------------------------------------- parsing and Gram


def test_parse_bundled_file(cox343):
    assert cox343.rank == 5
    assert cox343.m[3][4] == 4 and cox343.m[0][4] == 3 and cox343.m[0][2] == 2


@pytest.mark.parametrize("text", [
    "m 0 1 3\n",
    "rank 3\nm 0 3 3\n",
    "rank 3\nm 0 0 3\n",
    "rank 3\nm 0 1 1\n",
    "rank 3\nm 0 1 3\nm 1 0 4\n",
    "rank 3\nm 0 1 x\n",
    "rank 3\nfoo\n",
])
def test_parse_errors(text):
    with pytest.raises(CoxeterFormatError):
        parse_coxeter(text)


def test_matrix_validation():
    with pytest.raises(ValueError):
        CoxeterSimplex(((1, 3), (2, 1)))
    with pytest.raises(ValueError):
        CoxeterSimplex(((2, 3), (3, 1)))


def test_gram_entries(cox343):
    G = gram_matrix(cox343)
    assert np.allclose(np.diag(G), 1)
    assert G[3, 4] == pytest.approx(-math.sqrt(2) / 2)
    assert G[0, 1] == pytest.approx(-0.5)
    assert G[1, 3] == pytest.approx(0, abs=1e-15)


def test_signatures(cox343):
    assert signature(gram_matrix(cox343)) == (4, 1, 0)
    assert signature(gram_matrix(chain(3, 3, 3))) == (4, 0, 0)
    affine = CoxeterSimplex.from_pairs(5, {(i, (i + 1) % 5): 3 for i in range(5)})
    assert signature(gram_matrix(affine)) == (4, 0, 1)
    with pytest.raises(ValueError):
        signature(np.array([[1.0, 0.5], [0.0, 1.0]]))


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(5)))
def test_signature_invariant_under_relabelling(perm):
    base = parse_coxeter("rank 5\nm 0 1 3\nm 1 2 3\nm 2 3 3\nm 3 4 4\nm 0 4 3\n")
    m = tuple(tuple(base.m[perm[i]][perm[j]] for j in range(5)) for i in range(5))
    assert signature(gram_matrix(CoxeterSimplex(m))) == (4, 1, 0)


def test_lanner(cox343):
    rep = lanner_check(cox343)
    assert rep and rep.determinant < 0 and rep.failing_subsets == ()
    affine = CoxeterSimplex.from_pairs(5, {(i, (i + 1) % 5): 3 for i in range(5)})
    assert not lanner_check(affine)
    # A4 plus an isolated node is spherical, not hyperbolic
    assert not lanner_check(CoxeterSimplex.from_pairs(5, {(0, 1): 3, (1, 2): 3, (2, 3): 3}))


# ---------------------------------------------------------------- finite groups


@pytest.mark.parametrize("cox, name, order", [
    (chain(3, 3, 3), "A4", 120),
    (chain(3, 3, 4), "B4", 384),
    (chain(3, 4, 3), "F4", 1152),
    (chain(3, 5), "H3", 120),
    (chain(5), "I2(5)", 10),
    (chain(4), "B2", 8),
    (chain(6), "G2", 12),
    (CoxeterSimplex.from_pairs(4, {(0, 1): 3, (1, 2): 3, (1, 3): 3}), "D4", 192),
    (chain(3, 3), "A3", 24),
])
def test_finite_types_against_enumeration(cox, name, order):
    nodes = list(range(cox.rank))
    assert finite_coxeter_type(cox, nodes) == [(name, order)]
    assert group_order_by_enumeration(cox, nodes) == order


@pytest.mark.parametrize("pairs, rank, name, order", [
    ({(0, 1): 3, (1, 2): 3, (2, 3): 3, (3, 4): 3, (2, 5): 3}, 6, "E6", 51840),
    ({(0, 1): 3, (1, 2): 3, (2, 3): 5}, 4, "H4", 14400),
])
def test_large_exceptional_orders(pairs, rank, name, order):
    cox = CoxeterSimplex.from_pairs(rank, pairs)
    assert finite_coxeter_type(cox, range(rank)) == [(name, order)]


def test_order_is_multiplicative():
    cox = CoxeterSimplex.from_pairs(5, {(0, 1): 3, (2, 3): 4})
    assert finite_coxeter_type(cox, range(5)) == [("A2", 6), ("B2", 8), ("A1", 2)]
    assert finite_coxeter_order(cox, range(5)) == 6 * 8 * 2 == group_order_by_enumeration(cox, list(range(5)))


def test_infinite_subdiagram_rejected(cox343):
    with pytest.raises(NotFiniteError):
        finite_coxeter_type(cox343, range(5))


def test_deleted_node_groups(cox343):
    got = [deleted_node_diagram(cox343, k) for k in range(5)]
    assert got == [("B4", 384), ("F4", 1152), ("B4", 384), ("A4", 120), ("A4", 120)]
    for k in range(5):
        nodes = [i for i in range(5) if i != k]
        assert group_order_by_enumeration(cox343, nodes) == got[k][1]


# ---------------------------------------------------------------- geometry


def test_realization(cox343, realization):
    r = realization
    assert r.residual < 1e-9
    assert np.allclose(lorentz_gram(r.normals), gram_matrix(cox343), atol=1e-12)
    for i in range(5):
        assert lorentz(r.vertices[i], r.vertices[i]) == pytest.approx(-1)
        assert r.vertices[i][-1] > 0
        assert lorentz(r.vertices[i], r.normals[i]) < 0
        for j in range(5):
            if j != i:
                assert abs(lorentz(r.vertices[i], r.normals[j])) < 1e-12
                assert lorentz(r.vertices[i], r.vertices[j]) < -1


def test_realization_rejects_spherical():
    with pytest.raises(RealizationError):
        realize_simplex(chain(3, 3, 3))


def test_reflection_is_an_isometry(realization):
    u = realization.normals[2]
    x, y = realization.vertices[0], realization.vertices[4]
    assert lorentz(reflect(x, u), reflect(y, u)) == pytest.approx(lorentz(x, y))
    assert np.allclose(reflect(reflect(x, u), u), x)
    assert np.allclose(reflect(x, u), x)  # vertex 0 lies on facet 2


def test_dihedral_angles(cox343):
    angles = dihedral_angle_map(cox343)
    assert len(angles) == 10
    expected_thirds = {(0, 1, 4), (0, 3, 4), (2, 3, 4), (1, 2, 3)}
    for t, a in angles.items():
        if t == (0, 1, 2):
            assert a == math.pi / 4
        elif t in expected_thirds:
            assert a == math.pi / 3
        else:
            assert a == math.pi / 2
    with pytest.raises(ValueError):
        dihedral_angle(cox343, (0, 1))


def _angle_oracle(r, t1, t2, edge):
    # project the opposite vertices off span(edge) and measure their angle
    a, b = edge
    E = np.array([r.vertices[a], r.vertices[b]])
    J = np.diag([1, 1, 1, 1, -1.0])
    M = E @ J @ E.T

    def project(v):
        coeff = np.linalg.solve(M, E @ J @ v)
        return v - coeff @ E

    (c,) = set(t1) - set(edge)
    (d,) = set(t2) - set(edge)
    x, y = project(r.vertices[c]), project(r.vertices[d])
    return math.acos(lorentz(x, y) / math.sqrt(lorentz(x, x) * lorentz(y, y)))


def test_wedge_angle_against_projection_oracle(realization):
    rng = random.Random(1)
    for _ in range(30):
        a, b, c, d = rng.sample(range(5), 4)
        t1, t2 = (a, b, c), (a, b, d)
        w = wedge_angle(realization, t1, t2, (a, b))
        assert w == pytest.approx(_angle_oracle(realization, t1, t2, (a, b)), abs=1e-10)
        assert w == pytest.approx(wedge_angle(realization, t2, t1, (a, b)), abs=1e-12)
        for s in (0.1, 0.9):
            assert wedge_angle(realization, t1, t2, (a, b), s) == pytest.approx(w, abs=1e-10)
    assert wedge_angle(realization, (0, 1, 2), (2, 1, 0), (0, 1)) == 0.0
