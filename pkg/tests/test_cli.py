import json
import subprocess
import sys

import pytest

from ordim import formats
from ordim.cli import main
from ordim.constructions import kelly, standard_example
from ordim.poset import random_poset


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_kelly_rec_file_parses(tmp_path, capsys):
    path = tmp_path / "k.json"
    code, _, _ = run(capsys, "gen", "kelly", "--n", 4, "--d", 2, "-o", path)
    assert code == 0
    kind, P = formats.load_any(path)
    assert kind == "poset" and P.size == 4 * 4 - 2 + 4 * 13


@pytest.mark.parametrize("family", ["standard", "kelly", "core", "chain", "antichain", "random"])
def test_poset_round_trip_is_byte_identical(tmp_path, capsys, family):
    args = ["gen", family, "--n", 3] + (["--d", 2] if family == "core" else [])
    code, text, _ = run(capsys, *args)
    assert code == 0
    P = formats.poset_from_dict(formats.loads(text))
    assert formats.dump_poset(P) == text


def test_kelly_rec_aliases_survive_round_trip(capsys):
    _, text, _ = run(capsys, "gen", "kelly", "--n", 3, "--d", 2)
    P = formats.poset_from_dict(formats.loads(text))
    assert P.index("(a1,b3)") == P.index("a1")
    assert formats.dump_poset(P) == text


def test_verify_boolean_canned(tmp_path, capsys):
    k6, br = tmp_path / "k6.json", tmp_path / "br.json"
    run(capsys, "gen", "kelly", "--n", 6, "-o", k6)
    run(capsys, "gen", "kelly-boolean", "--n", 6, "-o", br)
    code, out, _ = run(capsys, "verify", "boolean", k6, br)
    assert code == 0 and out.strip() == "valid"


def test_verify_local_reports_mu(tmp_path, capsys):
    k5, lr = tmp_path / "k5.json", tmp_path / "lr.json"
    run(capsys, "gen", "kelly", "--n", 5, "-o", k5)
    run(capsys, "gen", "kelly-local", "--n", 5, "-o", lr)
    code, out, _ = run(capsys, "verify", "local", k5, lr, "--json")
    assert code == 0
    assert json.loads(out)["mu_max"] == 3


def test_verify_invalid_realizer_exit_one(tmp_path, capsys):
    s3, r = tmp_path / "s3.json", tmp_path / "r.json"
    run(capsys, "gen", "standard", "--n", 3, "-o", s3)
    formats.write(r, formats.realizer_to_dict([[0, 1, 2, 3, 4, 5]]))
    code, out, _ = run(capsys, "verify", "realizer", s3, r)
    assert code == 1 and out.startswith("invalid")


def test_solve_ldim_of_s3(tmp_path, capsys):
    s3, cert = tmp_path / "s3.json", tmp_path / "cert.json"
    run(capsys, "gen", "standard", "--n", 3, "-o", s3)
    code, out, _ = run(capsys, "solve", "ldim", s3, "--budget-nodes", "1e7", "--json", "--certificate", cert)
    assert code == 0
    assert json.loads(out)["value"] == 3
    code, _, _ = run(capsys, "verify", "local", s3, cert)
    assert code == 0


def test_solve_dim_and_bdim(tmp_path, capsys):
    s3 = tmp_path / "s3.json"
    run(capsys, "gen", "standard", "--n", 3, "-o", s3)
    assert run(capsys, "solve", "dim", s3)[1].strip() == "dim = 3"
    assert run(capsys, "solve", "bdim", s3, "--k", 2)[0] == 1
    assert run(capsys, "solve", "bdim", s3, "--k", 3)[0] == 0


def test_solve_budget_exhausted_exit_three(tmp_path, capsys):
    s5 = tmp_path / "s5.json"
    formats.write(s5, formats.poset_to_dict(standard_example(5)))
    code, out, _ = run(capsys, "solve", "ldim", s5, "--budget-nodes", 1)
    assert code == 3 and "budget exhausted" in out


def test_bad_budget_rejected(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "dim", "x.json", "--budget-nodes", "0.5"])
    assert info.value.code == 2


def test_missing_file_exit_two(capsys):
    code, _, err = run(capsys, "solve", "dim", "/nonexistent/p.json")
    assert code == 2 and "error" in err


def test_malformed_poset_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "poset", "elements": [{"id": 0, "label": ["a1"]}], "covers": [[0, 7]]}')
    assert run(capsys, "structure", "blocks", bad)[0] == 2
    bad.write_text("not json")
    assert run(capsys, "structure", "blocks", bad)[0] == 2


def test_cyclic_covers_exit_two(tmp_path, capsys):
    bad = tmp_path / "cyc.json"
    bad.write_text(json.dumps({"kind": "poset", "elements": [{"id": 0, "label": ["x1"]}, {"id": 1, "label": ["x2"]}],
                               "covers": [[0, 1], [1, 0]]}))
    assert run(capsys, "export", "dot", bad)[0] == 2


def test_ramsey_bound_and_overflow(capsys):
    code, out, _ = run(capsys, "ramsey", "bound", "-r", 2, "-t", 2, "-m", 2)
    assert code == 0 and out.strip() == "9"
    code, out, _ = run(capsys, "ramsey", "bound", "-r", 2, "-t", 4, "-m", 3, "--json")
    assert code == 0 and json.loads(out)["value"] is None


def test_ramsey_extract(tmp_path, capsys):
    grid = tmp_path / "g.json"
    formats.write(grid, {"kind": "grid", "axes": [2, 2], "colors": [1, 0, 0, 1]})
    assert run(capsys, "ramsey", "extract", "--grid", grid, "-m", 2)[0] == 1
    assert run(capsys, "ramsey", "extract", "--grid", grid, "-m", 2, "--exact")[0] == 1
    formats.write(grid, {"kind": "grid", "axes": [3, 3], "colors": [0] * 9})
    code, out, _ = run(capsys, "ramsey", "extract", "--grid", grid, "-m", 2, "--json")
    assert code == 0 and json.loads(out)["color"] == 0


def test_adversary_cli(tmp_path, capsys):
    fam, out = tmp_path / "L.json", tmp_path / "out.json"
    formats.write(fam, formats.local_realizer_to_dict([[3, 0]]))
    code, _, _ = run(capsys, "adversary", "--n", 3, "--d", 1, "--realizer", fam, "-o", out)
    assert code == 0
    assert formats.read(out)["kind"] == "adversary_certificate"
    formats.write(fam, formats.local_realizer_to_dict([list(range(21))]))
    code, _, _ = run(capsys, "adversary", "--n", 3, "--d", 2, "--realizer", fam, "-o", out)
    assert code == 1
    assert formats.read(out)["reason"] == "UnreversedPair"
    assert run(capsys, "adversary", "--n", 3, "--d", 2, "--realizer", fam, "--targets", "1,2")[0] == 2


def test_structure_commands(tmp_path, capsys):
    k = tmp_path / "k.json"
    td = tmp_path / "td.json"
    run(capsys, "gen", "kelly", "--n", 3, "--d", 2, "-o", k)
    assert run(capsys, "structure", "blocks", k)[1].startswith("20 blocks")
    assert run(capsys, "structure", "planar", k)[0] == 0
    assert run(capsys, "structure", "treedecomp", "--n", 3, "--d", 2, "-o", td)[0] == 0
    code, out, _ = run(capsys, "structure", "verify-td", k, td)
    assert code == 0 and out.strip() == "valid, width 3"
    s5 = tmp_path / "s5.json"
    run(capsys, "gen", "standard", "--n", 5, "-o", s5)
    assert run(capsys, "structure", "planar", s5)[0] == 1


def test_export_dot(tmp_path, capsys):
    s3 = tmp_path / "s3.json"
    run(capsys, "gen", "standard", "--n", 3, "-o", s3)
    code, first, _ = run(capsys, "export", "dot", s3)
    assert code == 0
    assert first.count("->") == 6 and first.count("[label=") == 6
    assert run(capsys, "export", "dot", s3)[1] == first
    k6 = tmp_path / "k6.json"
    formats.write(k6, formats.poset_to_dict(kelly(6)))
    text = run(capsys, "export", "dot", k6)[1]
    assert text.count("->") == 28 and text.count("[label=") == 22


def test_grid_and_td_round_trip():
    g = formats.grid_from_dict({"kind": "grid", "axes": [2, 3], "colors": [0, 1, 0, 1, 1, 0]})
    assert formats.grid_to_dict(g) == {"kind": "grid", "axes": [2, 3], "colors": [0, 1, 0, 1, 1, 0]}
    from ordim.structure import kelly_tree_decomposition

    td = kelly_tree_decomposition(3, 1)
    again = formats.td_from_dict(formats.loads(formats.dumps(formats.td_to_dict(td))))
    assert again.bags == td.bags and again.edges == td.edges


def test_random_poset_json_is_deterministic():
    a = formats.dump_poset(random_poset(8, 0.4, 5))
    b = formats.dump_poset(random_poset(8, 0.4, 5))
    assert a == b


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ordim.cli", "ramsey", "bound", "-r", "2", "-t", "1", "-m", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "5"
