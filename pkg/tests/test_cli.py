import json
import os
import subprocess
import sys

import pytest

from pfk import corpus
from pfk.cli import run_command
from pfk.schemas import (SchemaError, dump_bundle, dump_lattice, dump_linloc,
                         dump_space, load_bundle, load_lattice, load_linloc,
                         load_space)


@pytest.fixture(scope="module")
def fixtures(tmp_path_factory):
    fx = tmp_path_factory.mktemp("fx")

    def dump(name, obj):
        path = fx / name
        path.write_text(json.dumps(obj))
        return str(path)

    return {
        "c3": dump("c3.json", dump_lattice(corpus.chain(3))),
        "m3": dump("m3.json", dump_lattice(corpus.diamond_m3())),
        "S": dump("S.json", dump_space(corpus.sierpinski())),
        "q2d1": dump("q2d1.json", {"q": 2, "dim": 1, "carrier": "discrete"}),
        "q2d2": dump("q2d2.json", {"q": 2, "dim": 2, "carrier": "discrete"}),
        "b1": dump("b1.json", dump_bundle(corpus.bundle_b1())),
        "b2": dump("b2.json", dump_bundle(corpus.bundle_b2())),
        "b3": dump("b3.json", dump_bundle(corpus.bundle_b3())),
        "bad_kappa": dump("bad.json", {
            "space": dump_space(corpus.sierpinski()),
            "fq": {"q": 2, "dim": 1, "carrier": "discrete"},
            "kappa": {"x0": {"basis": ["1"]}, "x1": {"basis": []}}}),
        "l1": dump("l1.json", dump_linloc(corpus.linloc_l1())),
        "morphism": dump("f.json", {"f_flat": {"y0": "0", "y1": "0"},
                                    "f_star": [[1]]}),
        "broken": dump("broken.json", {"points": ["a"], "opens": "nope"}),
    }


def test_primes_command(fixtures):
    code, rep = run_command(["primes", "--lattice", fixtures["c3"]])
    assert code == 0
    assert rep["primes"] == ["0", "m"]


def test_lattice_check_m3_exits_one(fixtures):
    code, rep = run_command(["lattice-check", "--lattice", fixtures["m3"],
                             "--level", "frame"])
    assert code == 1
    bad = [v for v in rep["verdicts"] if v["status"] == "fail"]
    assert bad and bad[0]["witness"]["B"] == ["b", "c"]


def test_bundle_enumerate_spectral_count(fixtures):
    code, rep = run_command(["bundle-enumerate", "--space", fixtures["S"],
                             "--fq", fixtures["q2d1"], "--filter", "spectral"])
    assert code == 0
    assert rep["count"] == 2


def test_bundle_build_rejects_discontinuous_kernel(fixtures):
    code, rep = run_command(["bundle-build", "--bundle", fixtures["bad_kappa"]])
    assert code == 1
    assert not rep["ok"]


def test_bundle_classify_b2(fixtures):
    code, rep = run_command(["bundle-classify", "--bundle", fixtures["b2"]])
    assert code == 0
    assert rep["open_support_property"] is False
    assert rep["kernel_continuous"] is True
    assert rep["spectral"] is False


def test_soberify_command(fixtures):
    code, rep = run_command(["soberify", "--space", fixtures["S"]])
    assert code == 0
    assert rep["sob"] == {"x0": "{x1}", "x1": "{}"}
    assert rep["surjective"] and rep["open_map"]


def test_subspaces_command(fixtures):
    code, rep = run_command(["subspaces", "--fq", fixtures["q2d2"]])
    assert code == 0
    assert rep["count"] == 5
    assert rep["distributive"] is False


def test_spec_topology_command(fixtures):
    code, rep = run_command(["spec-topology", "--fq", fixtures["q2d2"],
                             "--topology", "open-support"])
    assert code == 0
    assert rep["open_count"] == 32
    assert rep["max_restriction_T1"] is True
    assert rep["vietoris_vs_open_support"] == "first_strictly_coarser"


def test_morphism_check_command(fixtures, tmp_path):
    mor = tmp_path / "m.json"
    mor.write_text(json.dumps({"f_flat": {"y0": "x0", "y1": "x1"},
                               "f_star": [[1]]}))
    code, rep = run_command(["morphism-check", "--src", fixtures["b3"],
                             "--dst", fixtures["b1"], "--morphism", str(mor)])
    assert code == 0
    assert rep["accepted"] and rep["strict"] is False


def test_linloc_check_command(fixtures):
    code, rep = run_command(["linloc-check", "--linloc", fixtures["l1"]])
    assert code == 0
    assert rep["kernel"] == {"0": "0:", "m": "0:"}
    assert rep["max_variant"]["is_max_linearized"] is True


def test_linloc_check_rejects_bad_sigma(fixtures, tmp_path):
    bad = tmp_path / "bad_ll.json"
    bad.write_text(json.dumps({
        "frame": dump_lattice(corpus.chain(3)),
        "fq": {"q": 2, "dim": 1, "carrier": "discrete"},
        "sigma": {"0:": "0", "1:1": "m"}}))
    code, rep = run_command(["linloc-check", "--linloc", str(bad)])
    assert code == 1
    assert not rep["ok"]


def test_spec_and_omega_commands(fixtures):
    code, rep = run_command(["spec", "--linloc", fixtures["l1"]])
    assert code == 0
    assert rep["base_points"] == ["0", "m"]
    code, rep = run_command(["omega", "--bundle", fixtures["b1"]])
    assert code == 0
    assert rep["sigma"] == {"0:": "{}", "1:1": "{x0,x1}"}


def test_omega_rejects_non_spectral(fixtures):
    code, rep = run_command(["omega", "--bundle", fixtures["b2"]])
    assert code == 1


def test_transpose_command(fixtures):
    code, rep = run_command(["transpose", "--bundle", fixtures["b3"],
                             "--linloc", fixtures["l1"],
                             "--morphism", fixtures["morphism"]])
    assert code == 0
    assert rep["inverse_image"] == {"0": "{}", "m": "{y0,y1}", "1": "{y0,y1}"}
    assert any(v["check"] == "transpose unique" and v["status"] == "pass"
               for v in rep["verdicts"])


def test_adjunction_census_command(fixtures):
    code, rep = run_command(["adjunction-census", "--bundle", fixtures["b1"],
                             "--linloc", fixtures["l1"]])
    assert code == 0
    assert rep["hom_bundle_side"] == rep["hom_linloc_side"] == 6
    assert rep["bijection"] and rep["triangle_identities"]


def test_dot_command_counts(fixtures):
    code, rep = run_command(["dot", "--lattice", fixtures["c3"]])
    assert code == 0
    assert rep["nodes"] == 3 and rep["edges"] == 2
    code, rep = run_command(["dot", "--bundle", fixtures["b3"]])
    assert code == 0
    assert rep["edges"] == 2


def test_dot_sub_f2_2_cover_edges(fixtures, tmp_path):
    from pfk.linfq import FqSpace, enumerate_subspaces

    lat = enumerate_subspaces(FqSpace(2, 2)).lattice
    path = tmp_path / "sub.json"
    path.write_text(json.dumps(dump_lattice(lat)))
    code, rep = run_command(["dot", "--lattice", str(path)])
    assert rep["nodes"] == 5 and rep["edges"] == 6


def test_schema_error_exits_two(fixtures):
    code, rep = run_command(["soberify", "--space", fixtures["broken"]])
    assert code == 2
    assert rep["errors"]


def test_unknown_command_exits_two():
    code, _ = run_command(["not-a-command"])
    assert code == 2


def test_missing_input_exits_two():
    code, rep = run_command(["primes"])
    assert code == 2


def test_loader_normalization_notes(tmp_path):
    path = tmp_path / "latt.json"
    path.write_text(json.dumps({"elements": ["a", "b"], "leq": [["a", "b"]]}))
    loaded = load_lattice(json.loads(path.read_text()))
    assert any("reflexively" in n for n in loaded.notes)
    sp = load_space({"points": ["a", "b"], "opens": [["a"]]})
    assert any("empty set" in n for n in sp.notes)
    assert any("full set" in n for n in sp.notes)


def test_space_loader_closes_families():
    sp = load_space({"points": ["a", "b", "c"],
                     "opens": [["a"], ["b"], ["a", "b", "c"], []]})
    assert any("closed under union" in n for n in sp.notes)
    assert sp.value.is_open(0b011)


def test_vector_string_error_has_path():
    with pytest.raises(SchemaError) as e:
        load_bundle({"space": dump_space(corpus.sierpinski()),
                     "fq": {"q": 2, "dim": 1},
                     "kappa": {"x0": {"basis": ["11"]}, "x1": {"basis": []}}})
    assert any("kappa[x0]" in p for p, _ in e.value.errors)


def _run_cli(args, env_seed):
    env = dict(os.environ)
    env["PYTHONHASHSEED"] = env_seed
    proc = subprocess.run([sys.executable, "-m", "pfk", *args],
                          capture_output=True, text=True, env=env,
                          cwd=os.path.dirname(os.path.dirname(__file__)))
    return proc.returncode, proc.stdout


def test_reports_byte_identical_across_hash_seeds(fixtures):
    # three runs in separate processes with different hash seeds
    args = ["adjunction-census", "--bundle", fixtures["b1"],
            "--linloc", fixtures["l1"]]
    outs = [_run_cli(args, seed) for seed in ("0", "1", "2")]
    assert all(code == 0 for code, _ in outs)
    assert outs[0][1] == outs[1][1] == outs[2][1]
