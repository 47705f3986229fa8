import random
import sys
from itertools import combinations

import pytest

from orbicheck import data_path
from orbicheck.algebra import ChainComplexHomology
from orbicheck.complex_core import LABELS, GluingTable, build_quotient, parse_complex
from orbicheck.coxeter import parse_coxeter, realize_simplex
from orbicheck.orbifold import locus_components, triangle_report


@pytest.fixture(scope="session")
def cp2_table():
    return parse_complex(data_path("cp2.tri").read_text())


@pytest.fixture(scope="session")
def cp2(cp2_table):
    return build_quotient(cp2_table)


@pytest.fixture(scope="session")
def cp2_homology(cp2):
    return ChainComplexHomology(cp2)


@pytest.fixture(scope="session")
def cox343():
    return parse_coxeter(data_path("lanner_343.cox").read_text())


@pytest.fixture(scope="session")
def realization(cox343):
    return realize_simplex(cox343)


@pytest.fixture(scope="session")
def triangles(cp2, cox343):
    return triangle_report(cp2, cox343)


@pytest.fixture(scope="session")
def components(cp2, cox343, triangles):
    return {c.name: c for c in locus_components(cp2, cox343, triangles)}


def random_table(rng: random.Random, n: int, labels=LABELS, glue_prob: float = 0.8) -> GluingTable:
    """Random valid label-preserving table: a partial matching per facet type."""
    assignments = {}
    for facet in combinations(labels, len(labels) - 1):
        order = list(range(n))
        rng.shuffle(order)
        for a, b in zip(order[::2], order[1::2]):
            if rng.random() < glue_prob:
                assignments[(a, facet)] = b
                assignments[(b, facet)] = a
    return GluingTable(n, assignments, tuple(labels))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
