import json

import pytest

from stabfold.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code = main(list(argv) + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_dims_text_and_values(capsys):
    code, out = run(capsys, "dims")
    assert code == 0
    assert "247552" in out and "6710912" in out and "33554432" in out
    assert "152" in out and "7736" in out


def test_dims_json_deterministic(capsys):
    code1, js1 = run_json(capsys, "dims", "--n-max", "3")
    code2, js2 = run_json(capsys, "dims", "--n-max", "3")
    assert code1 == code2 == 0
    assert js1 == js2
    assert js1["rows"][0]["cc"] == 2
    assert js1["rows"][2]["fsc"] == 176


def test_dims_csv(capsys):
    code = main(["dims", "--n-max", "2", "--format", "csv"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "n,p,cc,fsc,full,cc_q,fsc_q,full_q"
    assert "2,11,8,8,16,2,2,4" in out


def test_betti_ravenel_full_n2(capsys, tmp_path):
    code, js = run_json(capsys, "betti", "--lie", "ravenel", "--complex", "full",
                        "--n", "2", "--p", "11", "--cache-dir", str(tmp_path))
    assert code == 0
    assert js["grand_total"] == 12


def test_betti_gl_cc_n3(capsys, tmp_path):
    code, js = run_json(capsys, "betti", "--lie", "gl", "--complex", "cc",
                        "--n", "3", "--p", "7", "--cache-dir", str(tmp_path))
    assert code == 0
    assert js["grand_total"] == 8
    assert js["totals_by_degree"] == {
        "0": 1, "1": 1, "3": 1, "4": 1, "5": 1, "6": 1, "8": 1, "9": 1
    }


def test_betti_ravenel_cc_n3_p19(capsys, tmp_path):
    code, js = run_json(capsys, "betti", "--lie", "ravenel", "--complex", "cc",
                        "--n", "3", "--p", "19", "--cache-dir", str(tmp_path))
    assert code == 0
    assert js["grand_total"] == 8


def test_betti_cache_roundtrip_identical(capsys, tmp_path):
    argv = ["betti", "--lie", "ravenel", "--complex", "full", "--n", "2",
            "--p", "11", "--cache-dir", str(tmp_path), "--format", "json"]
    code1 = main(argv)
    out1 = capsys.readouterr().out
    # second run is served from the cache and must be byte-identical
    code2 = main(argv)
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    cached = json.loads(files[0].read_text())
    assert cached["schema_version"] == 1


def test_betti_rejects_bundle_epsilon(capsys):
    code = main(["betti", "--lie", "ravenel", "--n", "2", "--p", "11",
                 "--epsilon", "x"])
    assert code == 2


def test_betti_size_gate(capsys):
    code = main(["betti", "--lie", "ravenel", "--n", "4", "--p", "37",
                 "--no-cache"])
    assert code == 2
    err = capsys.readouterr().err
    assert "--slow" in err


def test_verify_unknown_suite(capsys):
    assert main(["verify", "bogus"]) == 2


def test_verify_tables(capsys):
    code, js = run_json(capsys, "verify", "tables")
    assert code == 0
    assert js["ok"]
    assert len(js["checks"]) == 6


def test_verify_dd_zero_n2(capsys):
    code, js = run_json(capsys, "verify", "dd-zero", "--n", "2")
    assert code == 0 and js["ok"]
    names = [c["name"] for c in js["checks"]]
    assert any("bundle" in n for n in names)


def test_verify_containment_n4_p2(capsys):
    code, js = run_json(capsys, "verify", "containment", "--n", "4", "--p", "2")
    assert code == 0 and js["ok"]


def test_verify_model_kernel_n2(capsys):
    code, js = run_json(capsys, "verify", "model-kernel", "--n", "2")
    assert code == 0 and js["ok"]


def test_verify_collapse_n2(capsys):
    code, js = run_json(capsys, "verify", "collapse", "--n", "2")
    assert code == 0 and js["ok"]


def test_verify_invariant_cycles_n2(capsys):
    code, js = run_json(capsys, "verify", "invariant-cycles", "--n", "2")
    assert code == 0 and js["ok"]


def test_presentations_all_heights(capsys):
    for n in ("1", "2", "3"):
        code, js = run_json(capsys, "presentations", "--n", n)
        assert code == 0, f"height {n}"
        assert js["ok"], f"height {n}"


def test_presentations_rejects_n4(capsys):
    assert main(["presentations", "--n", "4"]) == 2


def test_pages_critical_collapse(capsys):
    code, js = run_json(capsys, "pages", "--n", "2", "--p", "11")
    assert code == 0
    assert js["collapse_page"] == 1
    assert js["notes"]["e_infinity_matches_betti"]


def test_pages_full_has_differentials(capsys):
    code, js = run_json(capsys, "pages", "--n", "2", "--p", "11",
                        "--block", "full")
    assert code == 0
    assert any(row["rank_out"] for row in js["pages"])


def test_monodromy_sigma_core(capsys):
    code, js = run_json(capsys, "monodromy", "--n", "2", "--p", "11",
                        "--flavor", "sigma")
    assert code == 0
    assert js["closed"] and js["homogeneous"]
    assert js["collapse_page"] == 1


def test_monodromy_semilinear_core_witness(capsys):
    code, js = run_json(capsys, "monodromy", "--n", "3", "--p", "7",
                        "--flavor", "semilinear")
    assert code == 0
    assert not js["homogeneous"]
    assert js["witness"]["source"].startswith("h[3,")
    assert not js["closed"]


def test_monodromy_medial(capsys):
    code, js = run_json(capsys, "monodromy", "--n", "1", "--p", "5",
                        "--flavor", "sigma", "--which", "medial")
    assert code == 0
    rows = {(r["s"], r["t"]): r["dim"] for r in js["pages"]}
    assert rows[(1, -1)] == 1
    assert rows[(0, 0)] == 1


def test_monodromy_custom_params(capsys, tmp_path):
    spec = {"params": [
        {"i": i, "j": j, "num": -i, "den": 2} for i in (1, 2) for j in (1, 2)
    ]}
    path = tmp_path / "conn.json"
    path.write_text(json.dumps(spec))
    code, js = run_json(capsys, "monodromy", "--n", "2", "--p", "11",
                        "--flavor", "custom", "--params", str(path))
    assert code == 0
    # these parameters reproduce the sigma flavor, so the core is homogeneous
    assert js["homogeneous"]
