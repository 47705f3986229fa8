"""Fundamental-group presentations and deterministic Tietze simplification.

Words are tuples of nonzero integers: ``i + 1`` is generator ``a<i>`` and
``-(i + 1)`` its inverse.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .algebra import IntegerMatrix, abelian_invariants
from .complex_core import QuotientComplex

Word = tuple[int, ...]

DEFAULT_PASSES = 100


class DisconnectedComplexError(ValueError):
    pass


def free_reduce(word) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word) -> Word:
    w = free_reduce(word)
    i, j = 0, len(w)
    while j - i > 1 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def inverse(word) -> Word:
    return tuple(-x for x in reversed(word))


def format_word(word) -> str:
    if not word:
        return "1"
    return " ".join(f"a{abs(x) - 1}" + ("^-1" if x < 0 else "") for x in word)


@dataclass(frozen=True)
class Presentation:
    n_generators: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        rels = tuple(free_reduce(r) for r in self.relators)
        for r in rels:
            if any(x == 0 or abs(x) > self.n_generators for x in r):
                raise ValueError(f"relator {r} references a missing generator")
        object.__setattr__(self, "relators", rels)

    def __str__(self):
        gens = ", ".join(f"a{i}" for i in range(self.n_generators))
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"<{gens} | {rels}>"

    def abelianization(self) -> tuple[int, tuple[int, ...]]:
        """Free rank and torsion coefficients of the abelianized group."""
        rows = []
        for r in self.relators:
            row = [0] * self.n_generators
            for x in r:
                row[abs(x) - 1] += 1 if x > 0 else -1
            rows.append(row)
        return abelian_invariants(IntegerMatrix(rows, len(rows), self.n_generators))


def presentation(qc: QuotientComplex) -> Presentation:
    """Presentation of pi_1 from the 2-skeleton via a breadth-first spanning tree."""
    n_vertices = qc.f_vector[0]
    edges = []
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
    for e in qc.classes[1]:
        j = e.simplices[0]
        a, b = e.labels
        tail = qc.index_of(j, (a,))
        head = qc.index_of(j, (b,))
        edges.append((tail, head))
        adjacency[tail].append((e.index, head))
        if head != tail:
            adjacency[head].append((e.index, tail))
    for adj in adjacency:
        adj.sort()

    seen = [False] * n_vertices
    seen[0] = True
    tree = set()
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for e, w in adjacency[v]:
            if not seen[w]:
                seen[w] = True
                tree.add(e)
                queue.append(w)
    if not all(seen):
        missing = [v for v, s in enumerate(seen) if not s]
        raise DisconnectedComplexError(f"vertex classes {missing} unreachable from vertex class 0")

    gen_of = {}
    for e in range(len(edges)):
        if e not in tree:
            gen_of[e] = len(gen_of) + 1

    relators = []
    if qc.dim >= 2:
        for t in qc.classes[2]:
            j = t.simplices[0]
            a, b, c = t.labels
            word = []
            for pair, sign in (((a, b), 1), ((b, c), 1), ((a, c), -1)):
                e = qc.index_of(j, pair)
                if e in gen_of:
                    word.append(sign * gen_of[e])
            relators.append(tuple(word))
    return Presentation(len(gen_of), tuple(relators))


# ---------------------------------------------------------------- Tietze moves


def _cyclic_key(word: Word) -> Word:
    # relators equal up to rotation and inversion define the same normal closure
    cands = []
    for w in (word, inverse(word)):
        cands += [w[i:] + w[:i] for i in range(len(w))] or [w]
    return min(cands)


def _substitute(word: Word, gen: int, image: Word) -> Word:
    inv = inverse(image)
    out: list[int] = []
    for x in word:
        if x == gen:
            out.extend(image)
        elif x == -gen:
            out.extend(inv)
        else:
            out.append(x)
    return cyclic_reduce(out)


def _renumber(word: Word, gen: int) -> Word:
    return tuple(x - 1 if x > gen else x + 1 if x < -gen else x for x in word)


def _tidy(rels: list[Word]) -> list[Word]:
    out, seen = [], set()
    for r in rels:
        r = cyclic_reduce(r)
        if not r:
            continue
        key = _cyclic_key(r)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _eliminate_once(n: int, rels: list[Word]):
    """Remove one generator occurring exactly once in some relator."""
    order = sorted(range(len(rels)), key=lambda i: (len(rels[i]), i))
    for i in order:
        r = rels[i]
        counts: dict[int, int] = {}
        for x in r:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        singles = sorted(g for g, c in counts.items() if c == 1)
        if not singles:
            continue
        g = singles[0]
        pos = next(p for p, x in enumerate(r) if abs(x) == g)
        u, v = r[:pos], r[pos + 1:]
        # r = u g^e v  =>  g = u^-1 v^-1 (e = 1) or g = v u (e = -1)
        image = inverse(u) + inverse(v) if r[pos] > 0 else v + u
        image = free_reduce(image)
        rest = [_substitute(s, g, image) for k, s in enumerate(rels) if k != i]
        rest = [_renumber(s, g) for s in rest]
        return n - 1, rest
    return None


def _shorten_once(rels: list[Word]):
    """Replace a long subword of one relator using a shorter relator."""
    order = sorted(range(len(rels)), key=lambda i: (len(rels[i]), i))
    for i in order:
        r = rels[i]
        L = len(r)
        rotations = []
        for w in (r, inverse(r)):
            rotations += [w[s:] + w[:s] for s in range(L)]
        for k in range(L, L // 2, -1):
            for p in rotations:
                piece, rest = p[:k], p[k:]
                replacement = inverse(rest)
                for t in order:
                    if t == i or len(rels[t]) < len(r):
                        continue
                    s = rels[t]
                    m = len(s)
                    if k > m:
                        continue
                    doubled = s + s
                    for start in range(m):
                        if doubled[start:start + k] == piece:
                            rotated = doubled[start:start + m]
                            new = cyclic_reduce(replacement + rotated[k:])
                            if len(new) < m:
                                out = list(rels)
                                out[t] = new
                                return out
    return None


def tietze_simplify(p: Presentation, pass_budget: int = DEFAULT_PASSES) -> Presentation:
    """Simplify by free reduction, generator elimination and relator shortening.

    Each sweep tidies relators, eliminates generators while possible, then
    tries one shortening substitution.  Stops at a fixpoint or after
    ``pass_budget`` sweeps.
    """
    if pass_budget < 1:
        raise ValueError("pass_budget must be positive")
    n = p.n_generators
    rels = _tidy(list(p.relators))
    for _ in range(pass_budget):
        changed = False
        while True:
            step = _eliminate_once(n, rels)
            if step is None:
                break
            n, rels = step
            rels = _tidy(rels)
            changed = True
        shorter = _shorten_once(rels)
        if shorter is not None:
            rels = _tidy(shorter)
            changed = True
        if not changed:
            break
    return Presentation(n, tuple(rels))


def is_trivially_presented(p: Presentation) -> bool:
    return p.n_generators == 0
