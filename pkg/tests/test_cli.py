"""End-to-end command-line behavior, run in process through main()."""

import json
import os

import pytest

from xmodgerbe.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_xmod_check_preset_ok(capsys):
    code, out, err = run_cli(capsys, "xmod-check", "xmod_mod:4:2",
                             "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["valid"] is True
    assert payload["results"]["violations"] == []


def test_xmod_check_invalid_file_exit_1(capsys, tmp_path):
    # identity alpha on S3 with the trivial action violates Peiffer
    from xmodgerbe.fingroup import (symmetric_group, trivial_action, GroupHom,
                                    CrossedModule, xmod_to_json)
    s3 = symmetric_group(3)
    import numpy as np
    bad = CrossedModule(s3, s3,
                        GroupHom(s3, s3, np.arange(6), name="id"),
                        trivial_action(s3, s3), name="bad")
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(xmod_to_json(bad)))
    code, out, err = run_cli(capsys, "xmod-check", str(p), "--format", "json")
    assert code == 1
    payload = json.loads(out)
    assert payload["results"]["valid"] is False
    assert any("peiffer" in v for v in payload["results"]["violations"])


def test_xmod_check_malformed_json_exit_2(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    code, out, err = run_cli(capsys, "xmod-check", str(p))
    assert code == 2


def test_xmod_check_unknown_preset_exit_2(capsys):
    code, out, err = run_cli(capsys, "xmod-check", "xmod_nonsense:7")
    assert code == 2


def test_gerbe_classify_counts_and_out(capsys, tmp_path):
    out_dir = tmp_path / "artifacts"
    code, out, err = run_cli(capsys, "gerbe-classify",
                             "--cover", "circle:3", "--xmod", "xmod_base:symmetric:3",
                             "--format", "json", "--out", str(out_dir))
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["classes"] == 3
    assert payload["results"]["cocycles"] == 216
    assert payload["exhaustive"] is True
    files = list(out_dir.iterdir())
    assert len(files) == 1
    reps = json.loads(files[0].read_text())
    assert len(reps) == 3


def test_gerbe_classify_cache_round_trip(capsys, tmp_path):
    cache = tmp_path / "cache"
    argv = ("gerbe-classify", "--cover", "circle:3", "--xmod", "xmod_base:cyclic:4",
            "--format", "json", "--cache-dir", str(cache))
    code1, out1, err1 = run_cli(capsys, *argv)
    assert code1 == 0
    assert "cache hit" not in err1
    assert len(list(cache.iterdir())) == 1
    code2, out2, err2 = run_cli(capsys, *argv)
    assert code2 == 0
    assert out2 == out1
    assert "cache hit" in err2


def test_gerbe_classify_jobs_do_not_change_output(capsys):
    argv = ("gerbe-classify", "--cover", "circle:3", "--xmod", "xmod_base:symmetric:3",
            "--format", "json")
    code1, out1, _ = run_cli(capsys, *argv, "--jobs", "1")
    code8, out8, _ = run_cli(capsys, *argv, "--jobs", "8")
    assert code1 == code8 == 0
    assert out1 == out8
    payload = json.loads(out1)
    assert payload["results"]["classes"] == 3


def test_gerbe_classify_guard_exit_3(capsys):
    code, out, err = run_cli(capsys, "gerbe-classify",
                             "--cover", "ball:6", "--xmod", "xmod_id:symmetric:3")
    assert code == 3
    assert "budget" in err


def test_duskin_compare_and_out(capsys, tmp_path):
    out_dir = tmp_path / "dict"
    code, out, err = run_cli(capsys, "duskin-compare", "--xmod", "xmod_mod:4:2",
                             "--format", "json", "--out", str(out_dir))
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["found"] is True
    assert payload["results"]["wbar_sizes"] == [1, 2, 16, 512]
    assert payload["results"]["duskin_sizes"] == [1, 2, 16, 512]
    files = list(out_dir.iterdir())
    assert [f.name for f in files] == [payload["results"]["dictionary_file"]]
    art = json.loads(files[0].read_text())
    assert isinstance(art, dict) and art


def test_truncation_out_of_range_exit_2(capsys):
    code, out, err = run_cli(capsys, "duskin-compare", "--xmod", "xmod_mod:4:2",
                             "--truncation", "5")
    assert code == 2


def test_classify_bundles_s3(capsys):
    code, out, err = run_cli(capsys, "classify-bundles", "--sset", "circle",
                             "--group", "symmetric:3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["twisting_classes"] == 3
    assert payload["results"]["map_classes"] == 3
    assert payload["results"]["bijection"] is True


def test_gauge_verify_known_and_unknown(capsys):
    code, out, err = run_cli(capsys, "gauge-verify", "--case",
                             "so3-conjugation-T", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["cases"]["so3-conjugation-T"]["passed"] is True
    code2, *_ = run_cli(capsys, "gauge-verify", "--case", "bogus")
    assert code2 == 2


def test_lift_sphere4_all_lift(capsys):
    code, out, err = run_cli(capsys, "lift", "--cover", "sphere:4",
                             "--xmod", "xmod_mod:4:2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    r = payload["results"]
    assert r["cocycles"] == 64
    assert r["lifted"] == 64
    assert r["all_lift"] is True
    ob = payload["oracles"]["obstruction"]
    assert ob["agree"] is True and ob["emitted"] is True
    assert ob["h3_kernel_invariants"] == []


def test_table_format_has_no_json(capsys):
    code, out, err = run_cli(capsys, "xmod-check", "xmod_id:cyclic:3")
    assert code == 0
    assert not out.lstrip().startswith("{")
    assert "valid" in out
