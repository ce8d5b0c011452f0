import json
import subprocess
import sys
from importlib import resources

import pytest

from quasieq.cli import run_command
from quasieq.normalform import random_normal_form
from quasieq.io import dump_game

DATA = resources.files("quasieq") / "data"


def data(name):
    return str(DATA / name)


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_count_text_and_json_agree(capsys):
    code, text, _ = run(capsys, "count", data("mclennan_4x3.nf"))
    code2, js, _ = run(capsys, "count", data("mclennan_4x3.nf"), "--json")
    assert code == code2 == 0
    rep = json.loads(js)
    assert "count.permanent_g: 4752" in text and rep["count"]["permanent_g"] == 4752
    assert rep["sha256"] in text


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "solve-linear", data("saboteur.ent"), "--relaxed", "--json")[1]
            for _ in range(2)}
    assert len(outs) == 1


def test_zero_count_exit_code(capsys):
    code, out, _ = run(capsys, "count", data("hyperbola.ext"))
    assert code == 1 and "caveat" in out


def test_input_errors_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.nf"
    bad.write_text('{"format": "normal_form", "strategies": [2], "payoffs": [[1, "0.5"]]}')
    code, _, err = run(capsys, "count", str(bad))
    assert code == 2 and "0.5" in err
    assert run(capsys, "count", str(tmp_path / "missing.nf"))[0] == 2
    assert run(capsys, "count", data("mclennan_4x3.nf"), "--distinguished", "A=B")[0] == 2
    assert run(capsys, "normalize", data("mclennan_4x3.nf"))[0] == 2
    assert run(capsys, "solve-linear", data("saboteur.ent"))[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "count", data("mclennan_4x3.nf"), "--cap", "4")[0] == 2


def test_nonlinear_system_exit_one(capsys, tmp_path):
    f = tmp_path / "three.nf"
    f.write_text(dump_game(random_normal_form([2, 2, 2], 3)))
    code, out, _ = run(capsys, "solve-linear", str(f))
    assert code == 1 and "linear: false" in out


def test_verify_points(capsys):
    code, out, _ = run(capsys, "verify", data("hyperbola.ext"), data("on_hyperbola.pt"))
    assert code == 0 and "all_zero: true" in out
    code, out, _ = run(capsys, "verify", data("saboteur.ent"), data("saboteur_leaves.pt"))
    assert code == 0 and "relaxed_residuals: 0, 0, 0, 0, 0, 0" in out


def test_verify_nonzero_exit_one(capsys, tmp_path):
    pt = tmp_path / "off.pt"
    pt.write_text(json.dumps({"format": "point",
                              "values": {"B": "1/2", "E": "1/2", "G": "1/2", "H": "1/4"}}))
    assert run(capsys, "verify", data("hyperbola.ext"), str(pt))[0] == 1


def test_distinguished_flag(capsys):
    code, out, _ = run(capsys, "equations", data("hyperbola.ext"), "--distinguished", "E=H")
    assert code == 0 and "[E->F]" in out and "[E->G]" in out
    code, js, _ = run(capsys, "count", data("hyperbola.ext"), "--distinguished", "A=C", "--json")
    assert json.loads(js)["distinguished"]["A"] == "C"


def test_graph_dot_and_plot(capsys, tmp_path):
    dot, png = tmp_path / "g.dot", tmp_path / "g.png"
    code, out, _ = run(capsys, "graph", data("saboteur.ent"), "--dot", str(dot),
                       "--plot", str(png))
    assert code == 0
    text = dot.read_text()
    assert text.count("->") == 10 and text.count('    "s') == 6
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert "scaled_matrix[4]: 0, 0, 0, 0, 0, 1" in out


def test_induct_normalize_oracle(capsys):
    code, out, _ = run(capsys, "induct", data("hyperbola.ext"))
    assert code == 0 and "choices.A: C" in out and "ties: E" in out
    code, out, _ = run(capsys, "normalize", data("hyperbola.ext"), "--json")
    assert code == 0 and json.loads(out)["strategies"] == [2, 2, 3]
    code, out, _ = run(capsys, "oracle", data("cycle4.graphical"))
    assert code == 0 and "oracle.agree: true" in out


def test_polygraph_and_system_inputs(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"format": "polygraph", "blocks": [[0], [1]],
                             "edges": [[0, 1], [1, 0]]}))
    code, out, _ = run(capsys, "count", str(g))
    assert code == 0 and "bernstein_count: 1" in out
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"format": "system", "variables": ["a", "b"],
                             "blocks": [["a"], ["b"]],
                             "equations": [[["-1", []], [2, ["b"]]], [[1, []], [-5, ["a"]]]]}))
    code, out, _ = run(capsys, "solve-linear", str(s))
    assert code == 0 and "solution.a: 1/5" in out and "solution.b: 1/2" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quasieq", "count", data("fourplayers_2.nf")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "bernstein_count: 9" in proc.stdout


@pytest.mark.parametrize("flag", ["--help", "--version"])
def test_help_and_version(capsys, flag):
    assert run_command([flag]) == 0
