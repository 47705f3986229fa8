"""One verification run: cached pipeline stages and the report they feed.

Stages compose bottom-up (``orbifold`` needs the manifold, homology and
pi_1 stages, and so on) and each is computed at most once per run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .algebra import ChainComplexHomology, boundary_matrices
from .complex_core import build_quotient, euler_characteristic, parse_complex, validate
from .coxeter import (
    DEFAULT_TOL,
    dihedral_angle_map,
    gram_matrix,
    lanner_check,
    parse_coxeter,
    realize_simplex,
    signature,
)
from .group import DEFAULT_PASSES, is_trivially_presented, presentation, tietze_simplify
from .manifold import verify_closed_pl_manifold
from .orbifold import (
    FLATNESS_TOL,
    LOCUS_CHAINS,
    component_incidence,
    flatness_check,
    locus_classes,
    locus_components,
    pi_over_2_exceptions,
    triangle_report,
    vertex_report,
)

FORMAT_VERSION = 1

# the remaining two-disk combination on the shared boundary loop
EXTRA_CHAINS = (("A2+C", ((1, "A2"), (1, "C"))),)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    inputs: dict
    sections: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(Check(name, bool(passed), detail))
        self.lines.append(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else ""))

    def section(self, title: str):
        self.lines.append(f"== {title} ==")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        verdict = "all checks passed" if self.passed else f"{sum(not c.passed for c in self.checks)} check(s) failed"
        return "\n".join(self.lines + [verdict]) + "\n"

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "sections": self.sections,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "passed": self.passed,
        }


class Run:
    def __init__(self, complex_path, coxeter_path=None, passes: int = DEFAULT_PASSES,
                 tol: float = FLATNESS_TOL):
        if passes < 1:
            raise ValueError("--passes must be at least 1")
        if not tol > 0:
            raise ValueError("--tol must be positive")
        self.complex_path = Path(complex_path)
        self.coxeter_path = Path(coxeter_path) if coxeter_path else None
        self.passes = passes
        self.tol = tol

    # -------------------------------------------------------- stages
    @cached_property
    def table(self):
        return parse_complex(self.complex_path.read_text(encoding="utf-8"))

    @cached_property
    def diagnostics(self):
        return validate(self.table)

    @cached_property
    def quotient(self):
        return build_quotient(self.table)

    @cached_property
    def homology(self):
        return ChainComplexHomology(self.quotient)

    @cached_property
    def manifold(self):
        return verify_closed_pl_manifold(self.quotient, self.passes)

    @cached_property
    def presentation(self):
        return presentation(self.quotient)

    @cached_property
    def simplified(self):
        return tietze_simplify(self.presentation, self.passes)

    @cached_property
    def cox(self):
        if self.coxeter_path is None:
            raise ValueError("no Coxeter file given")
        return parse_coxeter(self.coxeter_path.read_text(encoding="utf-8"))

    @cached_property
    def realization(self):
        return realize_simplex(self.cox, DEFAULT_TOL)

    # -------------------------------------------------------- report pieces
    def _validate(self, rep: Report) -> bool:
        rep.section("validate")
        diags = self.diagnostics
        for d in diags:
            rep.lines.append(f"  {d}")
        t = self.table
        rep.sections["validate"] = {
            "n_simplices": t.n_simplices,
            "glued_slots": len(t.assignments),
            "closed": t.is_closed,
            "diagnostics": [{"kind": d.kind, "message": d.message} for d in diags],
        }
        rep.check("gluing table consistent", not diags,
                  f"{len(t.assignments)} glued slots, {len(diags)} diagnostics")
        return not diags

    def _quotient(self, rep: Report):
        qc = self.quotient
        rep.section("quotient")
        rep.lines.append(f"f-vector {list(qc.f_vector)}, euler characteristic {euler_characteristic(qc)}")
        rep.sections["quotient"] = {
            "f_vector": list(qc.f_vector),
            "euler_characteristic": euler_characteristic(qc),
            "boundary": qc.has_boundary,
            "vertices": [{"index": v.index, "label": v.labels[0], "degree": v.degree,
                          "simplices": list(v.simplices)} for v in qc.classes[0]],
        }

    def _manifold(self, rep: Report):
        qc = self.quotient
        rep.section("manifold")
        if qc.has_boundary:
            rep.check("closed complex", False, "unglued facets present")
            return
        mr = self.manifold
        names = {qc.dim - 2: "triangle", qc.dim - 3: "edge", qc.dim - 4: "vertex"}
        for d in sorted({r.dim for r in mr.results}, reverse=True):
            rs = [r for r in mr.results if r.dim == d]
            bad = [r for r in rs if not r.check.ok]
            rep.check(f"{names.get(d, f'{d}-face')} links are spheres", not bad,
                      f"{len(rs) - len(bad)}/{len(rs)} certified")
            for r in bad:
                rep.lines.append(f"  {d}-class {r.index} {r.labels}: {r.check.status}; {'; '.join(r.check.reasons)}")
        rep.sections["manifold"] = {
            "passed": mr.passed,
            "failures": [{"dim": r.dim, "index": r.index, "status": r.check.status,
                          "reasons": r.check.reasons} for r in mr.failures],
            "checked": {str(d): mr.checked(d) for d in range(qc.dim - 1)},
        }

    def _homology(self, rep: Report):
        rep.section("homology")
        groups = self.homology.groups()
        for g in groups:
            rep.lines.append(f"H_{g.degree} = {g}")
        rep.sections["homology"] = [{"degree": g.degree, "rank": g.rank, "torsion": list(g.torsion)}
                                    for g in groups]

    def _pi1(self, rep: Report):
        rep.section("pi1")
        p, s = self.presentation, self.simplified
        trivial = is_trivially_presented(s)
        rep.lines.append(f"presentation: {p.n_generators} generators, {len(p.relators)} relators")
        rep.lines.append(f"simplified: {s}")
        rep.sections["pi1"] = {
            "generators": p.n_generators,
            "relators": len(p.relators),
            "simplified": str(s),
            "status": "trivial" if trivial else "inconclusive",
        }
        rep.check("pi_1 trivial", trivial, "empty presentation" if trivial else "inconclusive within pass budget")

    def _coxeter(self, rep: Report) -> bool:
        rep.section("coxeter")
        cox = self.cox
        G = gram_matrix(cox)
        sig = signature(G)
        lanner = lanner_check(cox)
        rep.check("Gram signature (n-1, 1, 0)", sig == (cox.rank - 1, 1, 0), str(sig))
        rep.check("compact hyperbolic (Lanner) simplex", lanner.ok, f"det {lanner.determinant:.12f}")
        angles = dihedral_angle_map(cox)
        rep.sections["coxeter"] = {
            "coxeter_matrix": [list(r) for r in cox.m],
            "signature": list(sig),
            "lanner": lanner.ok,
            "determinant": lanner.determinant,
            "dihedral_angles": {" ".join(map(str, k)): f"pi/{round(math.pi / v)}" for k, v in angles.items()},
        }
        if not lanner.ok:
            return False
        r = self.realization
        rep.check("realization residual", r.residual < DEFAULT_TOL, f"{r.residual:.3e}")
        rep.sections["coxeter"]["realization_residual"] = r.residual
        return True

    def _orbifold(self, rep: Report):
        qc, cox = self.quotient, self.cox
        rep.section("triangles")
        tris = triangle_report(qc, cox, strict=False)
        bad = [t for t in tris if not t.divides]
        rep.check("triangle degrees divide 2pi/theta", not bad, f"{len(tris) - len(bad)}/{len(tris)}")
        for t in bad:
            rep.lines.append(f"  t{t.index} {t.labels}: degree {t.degree} does not divide {t.full_count}")
        singular = [t for t in tris if t.singular]
        rep.lines.append(f"{len(singular)} singular triangle classes")
        for t in singular:
            rep.lines.append(f"  t{t.index} {t.labels} degree {t.degree} weight {t.weight} simplices {list(t.simplices)}")
        right = [t for t in tris if t.full_count == 4]
        odd = [t for t in right if t.degree not in (2, 4)]
        rep.check("right-angled triangle degrees in {2, 4}", not odd,
                  f"{sum(t.degree == 2 for t in right)} of degree 2")
        rep.sections["triangles"] = [{
            "index": t.index, "labels": list(t.labels), "simplices": list(t.simplices),
            "theta": f"pi/{t.full_count // 2}", "degree": t.degree, "weight": t.weight,
        } for t in tris]
        if bad or odd:
            return
        rep.sections["pi_over_2_exceptions"] = [t.index for t in pi_over_2_exceptions(qc, cox)]

        rep.section("vertices")
        verts = vertex_report(qc, cox, strict=False)
        for v in verts:
            lo = v.local_order if v.integral else f"{v.group_order}/{v.degree}"
            rep.lines.append(f"  v{v.index} label {v.label} degree {v.degree} {v.diagram} |W| {v.group_order} local order {lo}")
        rep.check("vertex local orders integral", all(v.integral for v in verts))
        rep.sections["vertices"] = [{
            "index": v.index, "label": v.label, "degree": v.degree, "diagram": v.diagram,
            "group_order": v.group_order, "local_order": v.local_order,
        } for v in verts]

        rep.section("locus")
        comps = locus_components(qc, cox, tris)
        flat = {}
        for c in comps:
            rep.lines.append(
                f"  {c.name}: triangles {list(c.triangles)} weight {c.weight} chi {c.euler_characteristic}"
                f" cycle {'yes' if c.cycle_coefficients else 'no'} mod2-cycle {'yes' if c.mod2_cycle else 'no'}")
            fr = flatness_check(qc, cox, c, self.realization, self.tol)
            flat[c.name] = fr
            rep.check(f"{c.name} flat across interior edges", fr.passed,
                      f"{len(fr.edges)} edges, max |angle - pi| {fr.max_residual:.2e}")
            for msg in fr.failures:
                rep.lines.append(f"    {msg}")
        incid = component_incidence(comps)
        for inc in incid:
            rep.lines.append(f"  {inc.first} & {inc.second}: edges {list(inc.shared_edges)} vertices {list(inc.shared_vertices)}")
        rep.sections["locus"] = {
            "components": [{
                "name": c.name,
                "triangles": [{"index": t, "representative": [qc.face(2, t).simplices[0], list(qc.face(2, t).labels)],
                               "weight": c.weights[t]} for t in c.triangles],
                "edges": list(c.edges), "vertices": list(c.vertices),
                "interior_edges": list(c.interior_edges), "boundary_edges": list(c.boundary_edges),
                "euler_characteristic": c.euler_characteristic,
                "weight": c.weight,
                "cycle_coefficients": None if c.cycle_coefficients is None
                else {str(k): v for k, v in c.cycle_coefficients.items()},
                "mod2_cycle": c.mod2_cycle,
                "flatness": [{"edge": e.edge, "angle": e.angle, "residual": e.residual()}
                             for e in flat[c.name].edges],
            } for c in comps],
            "incidence": [{"components": [i.first, i.second], "edges": list(i.shared_edges),
                           "vertices": list(i.shared_vertices)} for i in incid],
        }

        names = {c.name for c in comps}
        needed = {n for _, terms in LOCUS_CHAINS for _, n in terms}
        if needed <= names and self.homology.group(2).rank == 1:
            rep.section("locus classes in H_2")
            classes = locus_classes(qc, comps, LOCUS_CHAINS + EXTRA_CHAINS, hom=self.homology)
            for lc in classes:
                rep.lines.append(f"  [{lc.name}] = {lc.multiple} [L] (up to sign)")
            rep.sections["locus_classes"] = {lc.name: lc.multiple for lc in classes}

    # -------------------------------------------------------- commands
    def report(self, command: str) -> Report:
        rep = Report(command, {
            "complex": str(self.complex_path),
            "coxeter": str(self.coxeter_path) if self.coxeter_path else None,
            "passes": self.passes,
            "tol": self.tol,
        })
        if not self._validate(rep) or command == "validate":
            return rep
        self._quotient(rep)
        if command in ("manifold", "orbifold"):
            self._manifold(rep)
        if command in ("homology", "orbifold"):
            self._homology(rep)
        if command in ("pi1", "orbifold"):
            self._pi1(rep)
        if command == "orbifold":
            if self.quotient.has_boundary:
                return rep
            if self._coxeter(rep):
                self._orbifold(rep)
        return rep

    def export_chain(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for d, M in enumerate(boundary_matrices(self.quotient), start=1):
            p = out / f"d{d}.txt"
            p.write_text(M.to_text(), encoding="utf-8")
            paths.append(p)
        return paths
