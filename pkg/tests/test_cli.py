import json
import subprocess
import sys

import numpy as np
import pytest

from histphase import cli, ctp, distribution, io
from histphase.core import BranchHistory, ModelParams, PhaseSpacePath, SourcePath, TimeGrid
from histphase.perturbation import s_tilde_config


@pytest.fixture
def branches(tmp_path):
    b = BranchHistory(TimeGrid(0.0, 0.2, 3), [0.1 + 0.2j, -0.3j, 0.4])
    bp = BranchHistory(TimeGrid(0.1, 0.3, 2), [0.2 - 0.1j, 0.5j])
    pb, pbp = tmp_path / "b.csv", tmp_path / "bp.json"
    io.write_csv(b, pb)
    io.write_json(bp, pbp)
    return b, bp, str(pb), str(pbp)


def _run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_eval_distribution_is_bit_identical(branches, capsys):
    b, bp, pb, pbp = branches
    code, out = _run(["eval-distribution", "--branch", pb, "--branch-prime", pbp, "--s", "0.5",
                      "--omega", "1.3", "--beta-re", "0.3", "--beta-im", "0.2"], capsys)
    assert code == 0
    res = json.loads(out.out)
    b2, bp2 = io.read_any(pb, "branch"), io.read_any(pbp, "branch")
    lw = distribution.log_w_two_branch(b2, bp2, 0.5, ModelParams(1.3, beta=0.3 + 0.2j))
    assert res["log_re"] == lw.real and res["log_im"] == lw.imag
    assert res["normalization"] == 1.5**-5


def test_output_file_and_config(branches, tmp_path, capsys):
    _, _, pb, pbp = branches
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\ns = 0.25\nomega = 2.0\n")
    out = tmp_path / "o.json"
    code, _ = _run(["--config", str(cfg), "eval-distribution", "--branch", pb, "--branch-prime", pbp,
                    "--omega", "1.0", "--out", str(out)], capsys)
    assert code == 0
    got = json.loads(out.read_text())
    expected = distribution.log_w_two_branch(
        io.read_any(pb, "branch"), io.read_any(pbp, "branch"), 0.25, ModelParams(1.0)
    )
    # flag wins over the file for omega; the file supplies s
    assert got["log_re"] == expected.real


def test_exit_codes(branches, tmp_path, capsys):
    _, _, pb, pbp = branches
    assert _run(["eval-distribution", "--branch", str(tmp_path / "missing.csv")], capsys)[0] == 2
    assert _run(["no-such-command"], capsys)[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert _run(["--config", str(bad), "greens-dump"], capsys)[0] == 2
    assert _run(["eval-distribution", "--branch", pb, "--s", "-1"], capsys)[0] == 4
    assert _run(["greens-dump", "--omega", "-1"], capsys)[0] == 3
    assert _run(["wick-derive", "--order", "3"], capsys)[0] == 3
    code, _ = _run(["oracle-compare", "--case", "2,1", "--s-values", "0.5", "--draws", "2",
                    "--variant", "printed"], capsys)
    assert code == 5


def test_oracle_compare_passes(capsys):
    code, out = _run(["oracle-compare", "--case", "1,1", "--draws", "3"], capsys)
    assert code == 0
    assert out.out.splitlines()[0] == "n,m,s,beta_re,beta_im,draw,rel_err,status"
    assert "failed=0" in out.out.splitlines()[-1]


def test_greens_dump_values(capsys):
    code, out = _run(["greens-dump", "--kind", "wightman", "--t-min", "-1", "--t-max", "1", "--n", "5",
                      "--omega", "1.5"], capsys)
    assert code == 0
    rows = [r.split(",") for r in out.out.splitlines()[1:]]
    for t, re, im in rows:
        v = ctp.wightman(float(t), 1.5)
        assert float(re) == v.real and float(im) == v.imag


def test_ctp_eval_matches_library(tmp_path, capsys):
    grid = TimeGrid.span(0, 2, 201)
    bump = ctp.Bump(1.0, 0.6)(grid.times)
    src = SourcePath(grid, 0.5 * bump, 0.2 * bump)
    path = tmp_path / "src.json"
    io.write_json(src, path)
    code, out = _run(["ctp-eval", "--sources", str(path), "--mode", "phase"], capsys)
    assert code == 0
    lz = ctp.log_ctp_z_phase(io.read_any(str(path), "sources"), SourcePath.zeros(grid), 1.0)
    assert json.loads(out.out)["log_im"] == lz.imag


def test_wick_derive_json(capsys):
    code, out = _run(["wick-derive", "--format", "json"], capsys)
    assert code == 0
    cross = [k for k in json.loads(out.out)["order2"] if k["category"] == "cross"]
    assert sorted((k["relative_re"], k["relative_im"]) for k in cross) == [("0", "-32"), ("0", "192"), ("144", "0")]


def test_perturb_eval_matches_library(tmp_path, capsys):
    grid = TimeGrid.span(0, 3, 301)
    q = 0.7 * ctp.Bump(1.4, 0.8)(grid.times)
    qp = -0.4 * ctp.Bump(1.7, 0.8)(grid.times)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    io.write_csv(PhaseSpacePath(grid, q, np.zeros(grid.n)), a)
    io.write_csv(PhaseSpacePath(grid, qp, np.zeros(grid.n)), b)
    code, out = _run(["perturb-eval", "--path", str(a), "--path-prime", str(b), "--lam", "0.2"], capsys)
    assert code == 0
    pa, pb = io.read_any(str(a)), io.read_any(str(b))
    v = s_tilde_config(pa.q, pb.q, pa.grid, 0.2, 1.0)
    assert json.loads(out.out)["total"]["re"] == v.total.real


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "histphase", "greens-dump", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("t,re,im")
