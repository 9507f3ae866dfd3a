"""Command-line interface: codes, formats, reproducibility."""

import json
import subprocess

from kobdd import load_program, validate, width
from kobdd.cli import main

BOUNDS_HEADER = ("chain,k,w,d,constants,reduced_width,"
                 "lhs_log2,rhs_log2,margin,in_regime,note")


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# build / eval / validate


def test_build_and_eval(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    code, _, err = _run(capsys, ["build", "mxpj:1,2", "-o", path])
    assert code == 0
    assert "width=4" in err and "layers=1" in err
    p = load_program(path)
    assert validate(p).ok and width(p) == 4

    code, out, _ = _run(capsys, ["eval", path, "0000"])
    assert code == 0 and out == "0\n"
    code, out, _ = _run(capsys, ["eval", path, "1001"])
    assert code == 0 and out == "1\n"


def test_build_to_stdout(capsys):
    code, out, _ = _run(capsys, ["build", "mxpj:1,2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["semantics"] == "deterministic"


def test_build_embeddings_and_probability_output(tmp_path, capsys):
    for emb, expected_zero in (("quantum", "0.000000000\n"),
                               ("prob", "0.000000000\n")):
        path = str(tmp_path / f"{emb}.json")
        code, _, _ = _run(capsys, ["build", f"mxpj:1,2,{emb}", "-o", path])
        assert code == 0
        code, out, _ = _run(capsys, ["eval", path, "0000"])
        assert code == 0 and out == expected_zero
        code, out, _ = _run(capsys, ["eval", path, "1001"])
        assert code == 0 and out == "1.000000000\n"


def test_build_rejections(capsys):
    for descriptor in ("mxpj:1,3", "mxpj:1", "saf:2,2", "mxpj:1,2,magic",
                       "foo:1,2", "saf:2,2,24"):
        code, _, err = _run(capsys, ["build", descriptor])
        assert code == 2, descriptor
        assert "error" in err


def test_build_saf_notes_regime_violation(tmp_path, capsys):
    path = str(tmp_path / "s.json")
    code, _, err = _run(capsys, ["build", "saf:3,4,300", "-o", path])
    assert code == 0
    assert "address-capacity" in err
    assert width(load_program(path)) <= 13


def test_eval_error_paths(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    _run(capsys, ["build", "mxpj:1,2", "-o", path])
    code, _, err = _run(capsys, ["eval", path, "010"])
    assert code == 2 and "4" in err
    code, _, _ = _run(capsys, ["eval", str(tmp_path / "missing.json"), "0000"])
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, _, err = _run(capsys, ["eval", str(bad), "0000"])
    assert code == 2 and "malformed" in err


def test_eval_reads_input_file(tmp_path, capsys):
    prog = str(tmp_path / "p.json")
    _run(capsys, ["build", "mxpj:1,2", "-o", prog])
    bits = tmp_path / "x.txt"
    bits.write_text("1001\n")
    code, out, _ = _run(capsys, ["eval", prog, str(bits)])
    assert code == 0 and out == "1\n"


def test_validate_command(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    _run(capsys, ["build", "saf:2,2,57", "-o", path])
    code, out, _ = _run(capsys, ["validate", path])
    assert code == 0 and out.startswith("ok: deterministic")

    doc = json.loads((tmp_path / "p.json").read_text())
    doc["initial"] = 99
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, ["validate", str(broken)])
    assert code == 2 and "invalid:" in out


def test_validate_semantic_violation(tmp_path, capsys):
    path = str(tmp_path / "q.json")
    _run(capsys, ["build", "mxpj:1,2,prob", "-o", path])
    doc = json.loads((tmp_path / "q.json").read_text())
    doc["levels"][0]["t0"][0] = "0.25"   # column no longer sums to 1
    (tmp_path / "q.json").write_text(json.dumps(doc))
    code, out, _ = _run(capsys, ["validate", path])
    assert code == 2 and "column" in out


# ---------------------------------------------------------------------------
# check-equiv


def test_check_equiv_exhaustive(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    _run(capsys, ["build", "mxpj:2,2", "-o", path])
    code, out, _ = _run(capsys, ["check-equiv", path, "mxpj:2,2"])
    assert code == 0
    assert out == "256 checked, 0 mismatches\n"


def test_check_equiv_detects_corruption(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    _run(capsys, ["build", "mxpj:1,2", "-o", path])
    doc = json.loads((tmp_path / "p.json").read_text())
    doc["accept"] = sorted(set(range(1, 5)) - set(doc["accept"]))
    (tmp_path / "p.json").write_text(json.dumps(doc))
    code, out, _ = _run(capsys, ["check-equiv", path, "mxpj:1,2"])
    assert code == 1
    assert "16 checked, 16 mismatches" in out
    assert "first counterexample: 0000" in out


def test_check_equiv_sampled(tmp_path, capsys):
    path = str(tmp_path / "s.json")
    _run(capsys, ["build", "saf:2,2,57", "-o", path])
    code, out, _ = _run(capsys, ["check-equiv", path, "saf:2,2,57",
                                 "--mode", "sample", "--samples", "800",
                                 "--seed", "7"])
    assert code == 0
    assert out == "800 checked, 0 mismatches\n"


def test_check_equiv_arity_mismatch(tmp_path, capsys):
    path = str(tmp_path / "p.json")
    _run(capsys, ["build", "mxpj:1,2", "-o", path])
    code, _, err = _run(capsys, ["check-equiv", path, "xor:3"])
    assert code == 2 and "variables" in err


# ---------------------------------------------------------------------------
# subfn


def test_subfn_identity_order(capsys):
    code, out, err = _run(capsys, ["subfn", "xor:4"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "function,n,order,cut,count"
    assert lines[1:] == ["xor:4,4,1 2 3 4,2,2", "xor:4,4,1 2 3 4,3,2"]
    assert "N_theta = 2" in err


def test_subfn_min_order(capsys):
    code, _, err = _run(capsys, ["subfn", "xor:4", "--order", "min"])
    assert code == 0 and "N = 2" in err


def test_subfn_explicit_order_and_cut(capsys):
    code, out, _ = _run(capsys, ["subfn", "and:4", "--order", "4,3,2,1",
                                 "--cut", "2"])
    assert code == 0
    assert out.strip().split("\n")[1] == "and:4,4,4 3 2 1,2,2"
    code, _, _ = _run(capsys, ["subfn", "and:4", "--cut", "9"])
    assert code == 2


def test_subfn_truth_table_file(tmp_path, capsys):
    table = tmp_path / "parity3.tt"
    table.write_text("01101001\n")
    code, out, err = _run(capsys, ["subfn", str(table), "--order", "min"])
    assert code == 0 and "N = 2" in err
    assert "parity3" in out

    short = tmp_path / "short.tt"
    short.write_text("011")
    code, _, _ = _run(capsys, ["subfn", str(short)])
    assert code == 2


# ---------------------------------------------------------------------------
# bounds


def test_bounds_small_grid(capsys):
    code, out, err = _run(capsys, ["bounds", "hi-n", "--k", "2", "--w",
                                   "8,64"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == BOUNDS_HEADER
    assert lines[1].startswith("hi-n,2,8,,C=1;C1=8;C2=1;C3=1,")
    assert ",0.585786,1," in lines[1]
    assert ",76.000000,1," in lines[2]
    assert "all positive" in err


def test_bounds_axis_syntax(capsys):
    code, out, _ = _run(capsys, ["bounds", "hi-n", "--k", "2:4", "--w",
                                 "8:32:x2"])
    assert code == 0
    assert len(out.strip().split("\n")) == 1 + 3 * 3


def test_bounds_negative_margin_exits_one(capsys):
    code, out, err = _run(capsys, ["bounds", "s5-pobdd", "--k", "2",
                                   "--d", "1024"])
    assert code == 1
    assert "not all positive" in err
    assert "depends on C2, C3" in out


def test_bounds_out_of_regime_flagged_not_fatal(capsys):
    code, out, _ = _run(capsys, ["bounds", "hi-q", "--k", "4", "--d",
                                 "16,64"])
    assert code == 0
    rows = out.strip().split("\n")[1:]
    assert rows[0].split(",")[9] == "0"    # d=16 below the regime
    assert rows[1].split(",")[9] == "1"


def test_bounds_default_grid_runs_fast(capsys):
    import time
    start = time.monotonic()
    code, out, _ = _run(capsys, ["bounds", "s5-nobdd"])
    assert code == 0
    assert time.monotonic() - start < 1.0
    assert len(out.strip().split("\n")) == 1 + 17 * 63


def test_bounds_all_chains(capsys):
    code, out, _ = _run(capsys, ["bounds", "all"])
    assert code == 1   # the constant-burdened chains dip negative
    for chain in ("hi-n", "hi-p", "hi-q", "s5-obdd", "s5-nobdd",
                  "s5-pobdd", "h-kobdd"):
        assert f"{chain}," in out
    code, _, _ = _run(capsys, ["bounds", "all", "--k", "2"])
    assert code == 2   # explicit axes need a single chain


def test_bounds_usage_errors(capsys):
    assert _run(capsys, ["bounds", "nope"])[0] == 2
    assert _run(capsys, ["bounds", "hi-n", "--d", "8"])[0] == 2
    assert _run(capsys, ["bounds", "s5-obdd", "--w", "8"])[0] == 2
    assert _run(capsys, ["bounds", "hi-n", "--w", "bad"])[0] == 2
    assert _run(capsys, ["bounds", "hi-n", "--constants", "C5=1"])[0] == 2


def test_bounds_custom_constants(capsys):
    code, out, _ = _run(capsys, ["bounds", "hi-q", "--k", "2", "--d", "64",
                                 "--constants", "C=2,C1=16"])
    assert code == 0
    assert "C=2;C1=16;C2=1;C3=1" in out


# ---------------------------------------------------------------------------
# determinism, files, plumbing


def test_byte_identical_reruns(tmp_path, capsys):
    args = ["bounds", "hi-n"]
    first = _run(capsys, args)
    second = _run(capsys, args)
    assert first == second

    prog = str(tmp_path / "p.json")
    _run(capsys, ["build", "saf:2,2,57", "-o", prog])
    args = ["check-equiv", prog, "saf:2,2,57", "--mode", "sample",
            "--samples", "300", "--seed", "11"]
    assert _run(capsys, args) == _run(capsys, args)


def test_out_file_matches_stdout(tmp_path, capsys):
    _, piped, _ = _run(capsys, ["bounds", "hi-n", "--k", "2", "--w", "8"])
    path = tmp_path / "m.csv"
    code, out, _ = _run(capsys, ["bounds", "hi-n", "--k", "2", "--w", "8",
                                 "--out", str(path)])
    assert code == 0 and out == ""
    assert path.read_text() == piped


def test_threads_flag(capsys):
    assert _run(capsys, ["bounds", "hi-n", "--k", "2", "--w", "8",
                         "--threads", "2"])[0] == 0
    assert _run(capsys, ["bounds", "hi-n", "--k", "2", "--w", "8",
                         "--threads", "0"])[0] == 2


def test_help_and_missing_command(capsys):
    assert _run(capsys, ["--help"])[0] == 0
    assert _run(capsys, [])[0] == 2


def test_console_script_installed():
    proc = subprocess.run(["kobdd", "bounds", "hi-n", "--k", "2",
                           "--w", "8"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith(BOUNDS_HEADER)
