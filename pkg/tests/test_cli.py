import json
import math

import numpy as np
import pytest

from spectralcert.cli import main, EXIT_OK, EXIT_VALIDATION, EXIT_INCONCLUSIVE
from spectralcert.config import parse_config, ConfigError
from spectralcert.report import canonical_json, make_report, write_report


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


CERT_CFG = {
    "theorem": "2.3", "kind": "dirac", "n": 3, "m": 1.0,
    "potential": {"preset": "inverse-square", "c": 5e-6},
    "weight": {"kind": "rho2", "eps": 0.5, "delta": 0.5},
}


# -- config validation --------------------------------------------------

def test_parse_valid_config():
    cfg = parse_config(json.dumps(CERT_CFG), "certify")
    assert cfg.theorem == "2.3"
    assert cfg.n == 3 and cfg.m == 1.0


def test_config_collects_all_errors():
    bad = {"theorem": "9.9", "kind": "weird", "n": 2, "m": -1.0,
           "potential": {"preset": "nope", "bogus": 1}, "extra_key": True}
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(bad), "certify")
    msgs = "\n".join(exc.value.errors)
    for frag in ("$.theorem", "$.kind", "$.n", "$.m",
                 "$.potential.preset", "$.potential.bogus", "$.extra_key"):
        assert frag in msgs
    assert len(exc.value.errors) >= 7


def test_config_rejects_unknown_command_and_bad_json():
    with pytest.raises(ConfigError):
        parse_config("{}", "frobnicate")
    with pytest.raises(ConfigError):
        parse_config("{not json", "certify")


def test_config_grid_and_rectangle_rules():
    doc = {"kind": "schrodinger", "potential": {"preset": "bump"},
           "grid": {"L": 4.0, "M": 7},
           "rectangle": {"re_min": 1.0, "re_max": -1.0, "im_min": 0.0, "im_max": 1.0},
           "resolution": {"n_re": 4, "n_im": 4}}
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(doc), "scan")
    msgs = "\n".join(exc.value.errors)
    assert "must be even" in msgs
    assert "re_min > re_max" in msgs


def test_config_norms_pq():
    doc = {"p": 3, "q": 2, "weight": {"kind": "rho2"}}
    with pytest.raises(ConfigError):
        parse_config(json.dumps(doc), "norms")
    cfg = parse_config(json.dumps({"p": "inf", "q": 2, "weight": {"kind": "rho2"}}), "norms")
    assert math.isinf(cfg.p) and cfg.q == 2.0


# -- canonical reports --------------------------------------------------

def test_canonical_json_normalization():
    doc = {"b": 1 + 2j, "a": np.float64(0.1) * 3, "c": [np.int64(4), float("nan"),
                                                        float("inf"), True]}
    text = canonical_json(doc)
    back = json.loads(text)
    assert list(back.keys()) == ["a", "b", "c"]
    assert back["b"] == {"im": 2.0, "re": 1.0}
    assert back["c"] == [4, "nan", "inf", True]
    assert back["a"] == 0.3  # 12 significant digits


def test_write_report_with_sibling(tmp_path):
    rep = make_report("scan", {"seed": 0}, {"x": 1}, warnings=["w"])
    out = tmp_path / "r.json"
    write_report(rep, str(out), {"scan": (("a", "b"), [(1, 2.5), (3, float("nan"))])})
    doc = json.loads(out.read_text())
    assert doc["files"] == ["r_scan.csv"]
    assert doc["warnings"] == ["w"]
    csv = (tmp_path / "r_scan.csv").read_text().strip().split("\n")
    assert csv == ["a,b", "1,2.5", "3,nan"]


# -- end-to-end subcommands ---------------------------------------------

def test_cli_certify_stable(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", CERT_CFG)
    out = str(tmp_path / "rep.json")
    assert main(["certify", "--config", cfg, "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    cert = doc["results"]["certificate"]
    assert cert["verdict"] == "stable"
    assert cert["constant"] * cert["norm_upper"] < 1.0
    assert doc["schema_version"] == 1
    assert doc["command"] == "certify"
    assert isinstance(doc["warnings"], list)


def test_cli_certify_inconclusive_exit_code(tmp_path):
    doc = dict(CERT_CFG)
    doc["potential"] = {"preset": "inverse-square", "c": 1.0}
    cfg = _write(tmp_path, "c.json", doc)
    assert main(["certify", "--config", cfg, "--out", str(tmp_path / "r.json")]) \
        == EXIT_INCONCLUSIVE


def test_cli_validation_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"theorem": "2.3"})
    assert main(["certify", "--config", cfg]) == EXIT_VALIDATION
    assert "invalid configuration" in capsys.readouterr().err
    assert main(["certify", "--config", str(tmp_path / "missing.json")]) == EXIT_VALIDATION


def test_cli_disks(tmp_path):
    doc = {"n": 3, "m": 1.0, "j": 1,
           "potential": {"preset": "inverse-square", "c": 1e-5}}
    cfg = _write(tmp_path, "d.json", doc)
    out = str(tmp_path / "d_rep.json")
    assert main(["disks", "--config", cfg, "--out", out]) == EXIT_OK
    disks = json.loads(open(out).read())["results"]["certificate"]["disks"]
    # tangency invariant of the reported geometry
    assert disks["x0_plus"] ** 2 - disks["r0"] ** 2 == pytest.approx(1.0, abs=1e-6)
    assert disks["x0_minus"] == -disks["x0_plus"]


def test_cli_scan_and_csv(tmp_path):
    doc = {"kind": "schrodinger", "n": 3, "m": 0.0,
           "potential": {"preset": "bump", "c": 2.0, "R": 2.5, "N": 1},
           "grid": {"L": 3.0, "M": 4},
           "rectangle": {"re_min": -1.0, "re_max": 1.0, "im_min": 0.3, "im_max": 0.9},
           "resolution": {"n_re": 3, "n_im": 2}, "seed": 0}
    cfg = _write(tmp_path, "s.json", doc)
    out = str(tmp_path / "s_rep.json")
    assert main(["scan", "--config", cfg, "--out", out]) == EXIT_OK
    rep = json.loads(open(out).read())
    assert rep["files"] == ["s_rep_scan.csv"]
    lines = (tmp_path / "s_rep_scan.csv").read_text().strip().split("\n")
    assert lines[0] == "re_z,im_z,norm_estimate,excluded_flag"
    assert len(lines) == 7
    assert rep["results"]["max_norm_estimate"] > 0.0


def test_cli_eig(tmp_path):
    doc = {"kind": "schrodinger", "n": 3, "m": 0.0,
           "potential": {"preset": "bump", "c": 1.0, "N": 1},
           "grid": {"L": 3.0, "M": 4}}
    cfg = _write(tmp_path, "e.json", doc)
    out = str(tmp_path / "e_rep.json")
    assert main(["eig", "--config", cfg, "--out", out]) == EXIT_OK
    rep = json.loads(open(out).read())
    assert rep["results"]["count"] == 64
    csv = (tmp_path / "e_rep_spectrum.csv").read_text().strip().split("\n")
    assert csv[0] == "re_lambda,im_lambda"
    assert len(csv) == 65


def test_cli_bench(tmp_path):
    doc = {"estimate": "KY", "n": 3, "m": 1.0, "trials": 5,
           "grid": {"L": 8.0, "M": 16}, "seed": 0}
    cfg = _write(tmp_path, "b.json", doc)
    out = str(tmp_path / "b_rep.json")
    assert main(["bench", "--config", cfg, "--out", out]) == EXIT_OK
    res = json.loads(open(out).read())["results"]
    assert res["passed"] is True
    assert res["max_ratio"] <= res["paper_constant"] * (1 + res["slack"])


def test_cli_norms(tmp_path):
    doc = {"n": 3, "p": 2, "q": "inf", "weight": {"kind": "rho2", "eps": 0.5, "delta": 0.5}}
    cfg = _write(tmp_path, "n.json", doc)
    out = str(tmp_path / "n_rep.json")
    assert main(["norms", "--config", cfg, "--out", out]) == EXIT_OK
    res = json.loads(open(out).read())["results"]["norms"]["weight"]
    assert res["value"] == pytest.approx(1.3010, rel=1e-3)


def test_cli_seed_override_echoed(tmp_path):
    doc = {"estimate": "KY", "trials": 2, "grid": {"L": 8.0, "M": 16}, "seed": 0}
    cfg = _write(tmp_path, "b.json", doc)
    out = str(tmp_path / "b_rep.json")
    assert main(["bench", "--config", cfg, "--out", out, "--seed", "9"]) == EXIT_OK
    rep = json.loads(open(out).read())
    assert rep["config"]["seed"] == 9


def test_cli_reports_byte_identical(tmp_path):
    cfg = _write(tmp_path, "c.json", CERT_CFG)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["certify", "--config", cfg, "--out", a]) == EXIT_OK
    assert main(["certify", "--config", cfg, "--out", b]) == EXIT_OK
    assert open(a, "rb").read() == open(b, "rb").read()
