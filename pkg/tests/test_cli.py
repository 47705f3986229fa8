import io
import random
import json
import subprocess
import sys

import pytest

from orbicheck import data_path
from orbicheck.algebra import IntegerMatrix, homology
from orbicheck.complex_core import build_quotient, format_complex
from orbicheck.manifold import is_connected
from orbicheck.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, RunConfig, execute, parse_config

from conftest import random_table

CP2 = str(data_path("cp2.tri"))


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = execute(parse_config(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_parse_config_defaults():
    cfg = parse_config(["orbifold", CP2])
    assert isinstance(cfg, RunConfig)
    assert cfg.coxeter_path.name == "lanner_343.cox"
    assert cfg.tol == 1e-6 and cfg.passes == 100 and not cfg.json


def test_validate():
    code, out, _ = run(["validate", CP2])
    assert code == EXIT_OK
    assert "PASS gluing table consistent: 300 glued slots, 0 diagnostics" in out


def test_homology_text():
    code, out, _ = run(["homology", CP2])
    assert code == EXIT_OK
    lines = [l for l in out.splitlines() if l.startswith("H_")]
    assert lines == ["H_0 = Z", "H_1 = 0", "H_2 = Z", "H_3 = 0", "H_4 = Z"]


def test_pi1_and_manifold():
    code, out, _ = run(["pi1", CP2])
    assert code == EXIT_OK and "simplified: < | >" in out
    code, out, _ = run(["manifold", CP2])
    assert code == EXIT_OK and "PASS vertex links are spheres: 10/10 certified" in out


def _complex_with_free_h1():
    rng = random.Random(0)
    while True:
        t = random_table(rng, rng.randint(2, 8), glue_prob=0.7)
        qc = build_quotient(t)
        if is_connected(qc) and homology(qc)[1].rank:
            return t


def test_pi1_not_simply_connected(tmp_path):
    f = tmp_path / "h1.tri"
    f.write_text(format_complex(_complex_with_free_h1()))
    code, out, err = run(["pi1", str(f)])
    assert code == EXIT_FAIL
    assert "FAIL pi_1 trivial: inconclusive" in out
    assert "FAIL pi_1 trivial" in err


def test_orbifold_json_is_deterministic():
    code, a, _ = run(["orbifold", CP2, "--json"])
    _, b, _ = run(["orbifold", CP2, "--json"])
    assert code == EXIT_OK
    assert a == b
    doc = json.loads(a)
    assert doc["format_version"] == 1 and doc["passed"]
    s = doc["sections"]
    assert [c["name"] for c in s["locus"]["components"]] == ["B", "A4", "A2", "C"]
    assert s["locus_classes"]["B"] == 1
    assert [v["local_order"] for v in s["vertices"]] == [8, 192, 8, 2, 2, 96, 32, 32, 32, 192]
    assert s["coxeter"]["signature"] == [4, 1, 0]


def test_text_output_is_byte_identical():
    assert run(["orbifold", CP2])[1] == run(["orbifold", CP2])[1]


def test_export_chain(tmp_path):
    out_dir = tmp_path / "new" / "chain"
    code, out, _ = run(["export-chain", CP2, "--out", str(out_dir)])
    assert code == EXIT_OK
    shapes = [IntegerMatrix.from_text((out_dir / f"d{d}.txt").read_text()).shape for d in range(1, 5)]
    assert shapes == [(10, 51), (51, 134), (134, 150), (150, 60)]
    assert (out_dir / "d1.txt").read_text().splitlines()[0] == "10 51"
    mats = [IntegerMatrix.from_text((out_dir / f"d{d}.txt").read_text()) for d in range(1, 5)]
    assert all((a @ b).is_zero() for a, b in zip(mats, mats[1:]))


def test_export_to_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(["export-chain", CP2, "--out", str(blocker)])
    assert code == EXIT_INPUT and err


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("dim 4\nsimplices 2\nglue 0 (0 1 2 9) 1\n")
    code, out, err = run(["homology", str(bad)])
    assert code == EXIT_INPUT and out == ""
    assert "line 3" in err


def test_missing_file_exit_code(tmp_path):
    assert run(["validate", str(tmp_path / "nope.tri")])[0] == EXIT_INPUT


def test_inconsistent_table_fails(tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("dim 4\nsimplices 2\nglue 0 (0 1 2 3) 1\n")
    code, out, err = run(["homology", str(bad)])
    assert code == EXIT_FAIL
    assert "FAIL gluing table consistent" in out and "unglued" in out


def test_boundary_fails_manifold(tmp_path):
    t = tmp_path / "one.tri"
    t.write_text("dim 4\nsimplices 1\n")
    code, out, _ = run(["manifold", str(t)])
    assert code == EXIT_FAIL and "FAIL closed complex" in out


def test_bad_coxeter_file(tmp_path):
    c = tmp_path / "x.cox"
    c.write_text("rank 5\nm 0 1 1\n")
    assert run(["orbifold", CP2, "--coxeter", str(c)])[0] == EXIT_INPUT


def test_non_lanner_coxeter_fails(tmp_path):
    c = tmp_path / "a4.cox"
    c.write_text("rank 5\nm 0 1 3\nm 1 2 3\nm 2 3 3\n")
    code, out, _ = run(["orbifold", CP2, "--coxeter", str(c)])
    assert code == EXIT_FAIL and "FAIL compact hyperbolic" in out


@pytest.mark.parametrize("flag", [["--passes", "0"], ["--tol", "-1"]])
def test_bad_options(flag):
    assert run(["orbifold", CP2, *flag])[0] == EXIT_INPUT


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "orbicheck.cli", "homology", CP2],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "H_2 = Z" in proc.stdout
