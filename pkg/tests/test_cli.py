import json
import subprocess
import sys

import pytest

from khops.cli import main, parse_structured
from khops.complex import unified_complex
from khops.diagram import mirror, parse_pd
from khops.operations import Engine

from conftest import TREFOIL_PD


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homology_ascii(capsys):
    code, out, _ = run(capsys, "homology", TREFOIL_PD, "--theory", "even")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split("|")[0].strip() == "even inline"
    assert any(line.split("|")[0].strip() == "-7" and "Z₂" in line for line in lines)


def test_homology_json_round_trip(capsys):
    code, out, _ = run(capsys, "homology", TREFOIL_PD, "--format", "json")
    tables, ops = parse_structured(out)
    eng = Engine(unified_complex(parse_pd(TREFOIL_PD)))
    for th in ("even", "odd", "mod2"):
        assert tables[th] == eng.homology(th)
    assert ops == {}


def test_ops_json_and_csv(capsys, tmp_path):
    f = tmp_path / "k.pd"
    f.write_text("3_1: " + TREFOIL_PD + "\n")
    code, out, _ = run(capsys, "ops", str(f), "--op", "beta", "--op", "phi_eo", "--format", "json")
    tables, ops = parse_structured(out)
    eng = Engine(unified_complex(parse_pd(TREFOIL_PD)))
    assert ops["beta"] == eng.rank_table("beta")
    assert ops["phi_eo"] == eng.rank_table("phi_eo")
    assert json.loads(out)["knot"] == "3_1"
    code, out, _ = run(capsys, "ops", str(f), "--format", "csv")
    assert out.splitlines()[0] == "operation,i,q,target_i,target_q,rank"
    assert "beta_e,-3,-7,-2,-7,1" in out


def test_ops_ascii_marks_zero_maps(capsys):
    code, out, _ = run(capsys, "ops", TREFOIL_PD, "--reduced", "--op", "beta")
    assert code == 0 and "beta: zero" in out


def test_bad_operation_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ops", TREFOIL_PD, "--op", "gamma"])
    assert exc.value.code == 2


def test_bad_pd_exits_1(capsys):
    code, _, err = run(capsys, "homology", "X(1,2,3)")
    assert code == 1 and err.startswith("khops: error:")


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", TREFOIL_PD, TREFOIL_PD, "--op", "beta")
    assert "identical fingerprints; no operation rank differs" in out
    code, out, _ = run(capsys, "compare", TREFOIL_PD, mirror(parse_pd(TREFOIL_PD)).to_pd())
    assert "homologies differ" in out


def test_census(capsys, tmp_path):
    f = tmp_path / "t.pd"
    f.write_text("3_1: " + TREFOIL_PD + "\nbroken: X(1,2)\n")
    rec = tmp_path / "r.jsonl"
    code, out, err = run(capsys, "census", str(f), "--op", "beta", "--records", str(rec))
    assert code == 0
    assert out.splitlines()[0] == "1 knots, 0 distinguished pairs"
    assert ":2:" in err
    assert len(rec.read_text().splitlines()) == 1


def test_cache_commands(capsys, tmp_path):
    d = str(tmp_path / "c")
    run(capsys, "homology", TREFOIL_PD, "--cache-dir", d)
    code, out, _ = run(capsys, "cache", "info", "--cache-dir", d)
    assert "1 entries" in out
    code, out, _ = run(capsys, "cache", "list", "--cache-dir", d)
    assert out.strip().endswith(".json")
    code, out, _ = run(capsys, "cache", "clear", "--cache-dir", d)
    assert out.strip() == "removed 1 entries"
    code, out, _ = run(capsys, "cache", "path", "--cache-dir", d)
    assert out.strip() == d


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "khops", "homology", TREFOIL_PD, "--theory",
                          "mod2", "--format", "csv", "--no-cache"],
                         capture_output=True, text=True, check=True).stdout
    assert out.splitlines()[0] == "theory,i,q,rank,torsion"


def _grid(out):
    """ASCII grid -> {(i, q): cell} for the first table in the output."""
    lines = out.split("\n\n")[0].splitlines()
    head = [c.strip() for c in lines[0].split("|")]
    cells = {}
    for line in lines[2:]:
        if "|" not in line:
            continue
        row = [c.strip() for c in line.split("|")]
        for i, c in zip(head[1:], row[1:]):
            if c:
                cells[(int(i), int(row[0]))] = c
    return cells


def test_homology_grid_8_19(capsys, targets):
    code, out, _ = run(capsys, "homology", targets["8_19"].to_pd(), "--theory", "even")
    cells = _grid(out)
    assert cells == {(0, 5): "Z", (0, 7): "Z", (2, 9): "Z", (3, 11): "Z₂", (4, 11): "Z",
                     (3, 13): "Z", (4, 13): "Z", (5, 15): "Z", (5, 17): "Z"}


def test_homology_unknot_odd(capsys):
    code, out, _ = run(capsys, "homology", "", "--theory", "odd")
    assert code == 0 and _grid(out) == {(0, 0): "Z"}   # the empty link
    code, out, _ = run(capsys, "homology", "Loop()", "--theory", "odd")
    assert _grid(out) == {(0, 1): "Z", (0, -1): "Z"}


def test_ops_examples(capsys, targets):
    code, out, _ = run(capsys, "ops", targets["8_19"].to_pd(), "--op", "beta_o")
    assert "beta_o: (3, 11) -> (4, 11) rank 1" in out
    assert "beta_o: (3, 13) -> (4, 13) rank 1" in out
    code, out, _ = run(capsys, "ops", targets["10_124"].to_pd(), "--op", "beta_e beta_o",
                       "--format", "csv")
    assert out.splitlines()[1:] == ["beta_e beta_o,5,19,7,19,1"]
    code, out, _ = run(capsys, "ops", "Loop()", "--op", "theta_o")
    assert "theta_o: zero" in out


@pytest.mark.slow
def test_compare_13n1002_14n6487(capsys, tmp_path, targets):
    f = tmp_path / "pair.pd"
    f.write_text("".join(f"{n}: {targets[n].to_pd()}\n" for n in ("13n1002", "14n6487")))
    code, out, _ = run(capsys, "compare", targets["13n1002"].to_pd(), targets["14n6487"].to_pd(),
                       "--op", "beta")
    assert "homologies equal; beta rank tables differ" in out


@pytest.mark.slow
def test_census_theta_o_pair(capsys, tmp_path, targets):
    f = tmp_path / "t.pd"
    f.write_text("".join(f"{n}: {targets[n].to_pd()}\n" for n in ("13n651", "14n16550", "8_19")))
    code, out, _ = run(capsys, "census", str(f), "--op", "theta_o", "--workers", "3")
    assert "13n651 / 14n16550: homologies equal; theta_o rank tables differ" in out
