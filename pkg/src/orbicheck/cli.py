"""Command-line entry point.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 for unreadable or malformed input and unwritable output.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, data_path
from .complex_core import ComplexFormatError
from .coxeter import CoxeterFormatError
from .group import DEFAULT_PASSES
from .orbifold import FLATNESS_TOL
from .pipeline import Run

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COMMANDS = ("validate", "manifold", "homology", "pi1", "orbifold", "export-chain")


@dataclass(frozen=True)
class RunConfig:
    command: str
    complex_path: Path
    coxeter_path: Path | None = None
    out_dir: Path | None = None
    json: bool = False
    tol: float = FLATNESS_TOL
    passes: int = DEFAULT_PASSES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbicheck",
        description="Verify label-preserving triangulated 4-manifolds and their Coxeter orbifold structure.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("complex", type=Path, help="gluing table (.tri)")
    common.add_argument("--json", action="store_true", help="emit a JSON document instead of text")
    common.add_argument("--passes", type=int, default=DEFAULT_PASSES,
                        help=f"Tietze simplification pass budget (default {DEFAULT_PASSES})")

    sub.add_parser("validate", parents=[common], help="check the gluing table is a consistent pairing")
    sub.add_parser("manifold", parents=[common], help="certify every face link is a PL sphere")
    sub.add_parser("homology", parents=[common], help="integral homology H_0..H_4")
    sub.add_parser("pi1", parents=[common], help="fundamental group presentation and simplification")
    orb = sub.add_parser("orbifold", parents=[common], help="full report against a Coxeter simplex")
    orb.add_argument("--coxeter", type=Path, default=None,
                     help="Coxeter matrix file (.cox); defaults to the bundled [3,4,3] Lanner simplex")
    orb.add_argument("--tol", type=float, default=FLATNESS_TOL,
                     help=f"flatness tolerance in radians (default {FLATNESS_TOL:g})")
    exp = sub.add_parser("export-chain", parents=[common], help="write boundary matrices d1..d4")
    exp.add_argument("--out", type=Path, required=True, help="output directory (created if missing)")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cox = getattr(ns, "coxeter", None)
    if ns.command == "orbifold" and cox is None:
        cox = Path(str(data_path("lanner_343.cox")))
    return RunConfig(
        command=ns.command,
        complex_path=ns.complex,
        coxeter_path=cox,
        out_dir=getattr(ns, "out", None),
        json=ns.json,
        tol=getattr(ns, "tol", FLATNESS_TOL),
        passes=ns.passes,
    )


def execute(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        run = Run(cfg.complex_path, cfg.coxeter_path, cfg.passes, cfg.tol)
        if cfg.command == "export-chain":
            if run.diagnostics:
                for d in run.diagnostics:
                    print(f"orbicheck: {d}", file=err)
                return EXIT_FAIL
            paths = run.export_chain(cfg.out_dir)
            if cfg.json:
                doc = {"format_version": 1, "command": cfg.command, "files": [str(p) for p in paths]}
                out.write(json.dumps(doc, indent=2) + "\n")
            else:
                for p in paths:
                    out.write(f"wrote {p}\n")
            return EXIT_OK
        rep = run.report(cfg.command)
    except (ComplexFormatError, CoxeterFormatError) as exc:
        print(f"orbicheck: {exc}", file=err)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"orbicheck: {exc}", file=err)
        return EXIT_INPUT

    if cfg.json:
        out.write(json.dumps(rep.to_dict(), indent=2) + "\n")
    else:
        out.write(rep.to_text())
    for c in rep.checks:
        if not c.passed:
            print(f"orbicheck: FAIL {c.name}" + (f": {c.detail}" if c.detail else ""), file=err)
    return EXIT_OK if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    return execute(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
