import json
import math
import subprocess
import sys

import numpy as np
import pytest

from simchar.catalog import catalog
from simchar.convergence import (
    ConvergenceRow,
    ExperimentPlan,
    character_proxy_error,
    level_complex,
    plan_from_dict,
    run_convergence,
)
from simchar.errors import SimcharError, UnknownManifold
from simchar.homology import betti_numbers
from simchar.report import (
    config_hash,
    emit_report,
    parse_report,
    reemit_csv,
    render_figures,
)


# ------------------------------------------------------------------ catalog


def test_catalog_circle():
    e = catalog("s1:3")
    assert e.complex.f_vector == (3, 3)
    assert e.betti == (1, 1)
    assert e.reference["smooth_lambda0"][1] == pytest.approx((2 * math.pi) ** 2)
    assert betti_numbers(e.complex, "Z") == (1, 1)


def test_catalog_torus_variants():
    e7 = catalog("t2_flat:7")
    assert e7.complex.f_vector == (7, 21, 14)
    assert betti_numbers(e7.complex, "Z") == (1, 2, 1)
    grid = catalog("t2_flat:3x4")
    assert grid.complex.f_vector == (12, 36, 24)
    assert betti_numbers(grid.complex, "Z") == (1, 2, 1)


def test_catalog_sphere_levels():
    e0 = catalog("s2_tetra:0")
    assert e0.complex.f_vector == (4, 6, 4)
    assert betti_numbers(e0.complex, "Z") == (1, 0, 1)
    e1 = catalog("s2_tetra:1")
    assert e1.complex.f_vector[2] == 24


def test_catalog_accepts_paren_spelling():
    assert catalog("s1(5)").complex.f_vector == (5, 5)


def test_catalog_determinism():
    a = catalog("s2_tetra:1").complex
    b = catalog("s2_tetra:1").complex
    assert np.array_equal(a.vertices, b.vertices)
    assert a.simplices[2] == b.simplices[2]


def test_catalog_unknown():
    with pytest.raises(UnknownManifold):
        catalog("k3_surface:1")
    with pytest.raises(UnknownManifold):
        catalog("t2_flat:5")


# --------------------------------------------------------------------- plan


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan(manifold="s1", levels=[8, 8], seeds=[1, 2])
    with pytest.raises(ValueError):
        ExperimentPlan(manifold="s1", levels=[8, 16], seeds=[1])
    plan = ExperimentPlan(manifold="s1", levels=[8, 16], seeds=5)
    assert plan.seeds == [5, 6]
    with pytest.raises(ValueError):
        plan_from_dict({"manifold": "s1", "levels": [8], "seeds": [1],
                        "bogus": 1})


def test_level_complex_modes():
    plan = ExperimentPlan(manifold="s1", levels=[8, 16], seeds=[1, 2])
    assert level_complex(plan, 8).f_vector == (8, 8)
    plan2 = ExperimentPlan(
        manifold="s2_tetra:0", levels=[0, 1], seeds=[1, 2],
        refinement="subdivide",
    )
    lv1 = level_complex(plan2, 1)
    assert lv1.f_vector[2] == 24
    assert lv1.parent is not None  # descends via subdivision


def test_fullness_floor_fails_fast():
    plan = ExperimentPlan(
        manifold="s1", levels=[8, 16], seeds=[1, 2],
        metrics=[], tolerances={"fullness_floor": 2.0},
    )
    with pytest.raises(SimcharError):
        run_convergence(plan)


def test_run_small_plan_rows():
    plan = ExperimentPlan(
        manifold="s1", levels=[8, 16], seeds=[101, 102],
        metrics=["gap", "proxy"],
    )
    rows = run_convergence(plan)
    assert [r.level for r in rows] == [8, 16]
    assert rows[1].mesh < rows[0].mesh
    assert rows[1].gap_error < rows[0].gap_error
    assert rows[0].proxy_error > 0


def test_character_proxy_decays_second_order():
    errs = [character_proxy_error(N) for N in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2]
    order = math.log2(errs[0] / errs[1])
    assert order > 1.5  # the cycle-panel proxy superconverges


# ------------------------------------------------------------------ reports


def _dummy_rows():
    return [
        ConvergenceRow(level=8, seed=1, mesh=0.5, fullness=0.9, lambda1=40.0),
        ConvergenceRow(level=16, seed=2, mesh=0.25, fullness=0.9,
                       lambda1=39.5, partition_value=1.25e-10,
                       partition_log=-22.8),
    ]


def test_emit_empty_rows_header_only(tmp_path):
    path = emit_report([], "csv", str(tmp_path / "empty.csv"))
    text = open(path).read()
    assert text.count("\n") == 1
    assert text.startswith("level,seed,mesh")


def test_csv_roundtrip_exact(tmp_path):
    p1 = emit_report(_dummy_rows(), "csv", str(tmp_path / "a.csv"),
                     config={"x": 1})
    records = parse_report(p1)
    p2 = reemit_csv(records, str(tmp_path / "b.csv"))
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_jsonl_report(tmp_path):
    p = emit_report(_dummy_rows(), "jsonl", str(tmp_path / "a.jsonl"),
                    config={"x": 1})
    recs = parse_report(p)
    assert len(recs) == 2
    assert recs[0]["level"] == 8
    assert recs[0]["proxy_error"] is None  # nan serialises as null


def test_reports_deterministic_across_runs(tmp_path):
    plan_kwargs = dict(
        manifold="s1", levels=[8, 16], seeds=[101, 102],
        metrics=["gap", "partition"],
    )
    outs = []
    for tag in ("r1", "r2"):
        plan = ExperimentPlan(**plan_kwargs)
        rows = run_convergence(plan)
        path = emit_report(rows, "csv", str(tmp_path / f"{tag}.csv"),
                           config=plan.as_dict())
        outs.append(open(path, "rb").read())
        path_j = emit_report(rows, "jsonl", str(tmp_path / f"{tag}.jsonl"),
                             config=plan.as_dict())
        outs.append(open(path_j, "rb").read())
    assert outs[0] == outs[2]
    assert outs[1] == outs[3]


def test_config_hash_stable():
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_figures_rendered(tmp_path):
    plan = ExperimentPlan(
        manifold="s1", levels=[8, 16, 32], seeds=[1, 2, 3],
        metrics=["gap", "partition", "proxy"],
    )
    rows = run_convergence(plan)
    paths = render_figures(rows, str(tmp_path / "fig"))
    assert len(paths) == 3
    for p in paths:
        assert open(p, "rb").read()[:8] == b"\x89PNG\r\n\x1a\n"


# ---------------------------------------------------------------------- CLI


def _cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "simchar.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def test_cli_complex_pipeline(tmp_path):
    from simchar.fileio import write_complex

    write_complex(catalog("s2_tetra:0").complex, str(tmp_path / "tet.txt"))
    r = _cli("complex", "build", "--in", "tet.txt", "--out", "built.txt",
             cwd=tmp_path)
    assert r.returncode == 0 and "(4, 6, 4)" in r.stdout
    r = _cli("complex", "subdivide", "--in", "tet.txt", "--seed", "3",
             "--scale", "0.1", "--out", "sub.txt", cwd=tmp_path)
    assert r.returncode == 0
    r = _cli("complex", "measure", "--in", "sub.txt", cwd=tmp_path)
    assert r.returncode == 0
    info = json.loads(r.stdout)
    assert info["f_vector"] == [14, 36, 24]


def test_cli_verify_and_grid(tmp_path):
    r = _cli("verify-model", "--manifold", "s1:3", "--seed", "7", cwd=tmp_path)
    assert r.returncode == 0
    assert json.loads(r.stdout)["passed"] is True
    r = _cli("grid-check", "--manifold", "s2_tetra:0", "--p", "1",
             "--seed", "7", cwd=tmp_path)
    assert r.returncode == 0
    assert json.loads(r.stdout)["passed"] is True


def test_cli_partition_and_run(tmp_path):
    r = _cli("partition", "--manifold", "s1:8", "--p", "0",
             "--observable", "wilson:0:0", "--window", "8", "--seed", "21",
             "--assume-torsion-free", "--out", "part.jsonl", cwd=tmp_path)
    assert r.returncode == 0
    rec = json.loads(open(tmp_path / "part.jsonl").read())
    assert rec["value"] > 0
    (tmp_path / "plan.toml").write_text(
        'manifold = "s1"\nlevels = [8, 16]\nseeds = [101, 102]\np = 0\n'
        'metrics = ["gap"]\nout = "rep.csv"\nfigures = true\n'
    )
    r = _cli("run", "--plan", "plan.toml", cwd=tmp_path)
    assert r.returncode == 0
    assert (tmp_path / "rep.csv").exists()
    assert (tmp_path / "rep_gap.png").exists()


def test_cli_error_exit_code(tmp_path):
    r = _cli("verify-model", "--manifold", "nope:1", cwd=tmp_path)
    assert r.returncode == 2
    assert "UnknownManifold" in r.stderr


def test_cli_spectrum_includes_h_matrix(tmp_path):
    r = _cli("spectrum", "--manifold", "t2_flat:7", "--seed", "7",
             "--out", "spec.jsonl", cwd=tmp_path)
    assert r.returncode == 0
    recs = [json.loads(line) for line in open(tmp_path / "spec.jsonl")]
    assert [rec["degree"] for rec in recs] == [0, 1, 2]
    deg1 = recs[1]
    assert deg1["betti"] == 2 and deg1["harmonic_dim"] == 2
    h = np.array(deg1["h_matrix"])
    assert h.shape == (2, 2)
    assert np.linalg.det(h) > 0


def test_cli_partition_with_oracle(tmp_path):
    r = _cli("partition", "--manifold", "s1:8", "--p", "0",
             "--observable", "const", "--window", "8", "--seed", "21",
             "--assume-torsion-free", "--oracle", "quad",
             "--out", "part.jsonl", cwd=tmp_path)
    assert r.returncode == 0
    rec = json.loads(open(tmp_path / "part.jsonl").read())
    assert rec["oracle_value"] == pytest.approx(rec["value"], rel=1e-6)
