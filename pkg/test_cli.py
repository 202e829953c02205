import json

import pytest

import decomposition
import supercharacter_cli
from supercharacter_cli import render, run

SECTION_ARCS = "1-1-3,2-1-10,4-1-7,7-1-9,3-1-8,5-1-6"


def test_restriction_coefficient_is_zero():
    output, code = run(["restrict", "--q", "2", "--L", "1..10", "--K", "1,4,5,6,7,9",
                        "--arcs", SECTION_ARCS, "--coeff-of", ""])
    assert code == 0
    assert output == "0"


def test_expand_three_parallel_arcs():
    output, code = run(["expand", "--q", "3", "--K", "1..5", "--arcs", "1-1-5,1-1-5,1-1-5", "--coeff-of", ""])
    assert (output, code) == ("7", 0)


def test_trivial_tensor():
    output, code = run(["tensor", "--q", "2", "--K", "1..1", "--a", "", "--b", ""])
    assert code == 0
    assert json.loads(output) == {"": 1}


def test_full_combination_is_sorted_json():
    output, code = run(["expand", "--q", "2", "--K", "1..3", "--arcs", "1-1-3,1-1-3"])
    assert code == 0
    assert output == '{"": 1, "1-1-2": 1, "1-1-2,2-1-3": 1, "2-1-3": 1}'


def test_verify_flag_passes():
    output, code = run(["restrict", "--q", "3", "--L", "1..4", "--K", "1,3,4",
                        "--arcs", "1-1-3,2-1-4", "--verify"])
    assert code == 0
    assert json.loads(output)


def test_parse_error_exit_code():
    assert run(["expand", "--q", "2", "--K", "1..3", "--arcs", "1-x-3"])[1] == 1
    assert run(["no-such-command"])[1] == 1
    assert run([])[1] == 1


def test_precondition_exit_code():
    # K is not inside L
    assert run(["restrict", "--q", "2", "--L", "1..3", "--K", "1,5", "--arcs", "1-1-3"])[1] == 2
    assert run(["expand", "--q", "4", "--K", "1..3", "--arcs", "1-1-3"])[1] == 2


def test_closed_form_rejects_parallel_arcs():
    _, code = run(["explicit", "--q", "3", "--K", "1..5", "--arcs", "1-1-5,1-1-5,1-1-5"])
    assert code == 2


def test_nonzero_trivial_with_witness():
    output, code = run(["nonzero-trivial", "--q", "2", "--L", "1..10", "--K", "1,4,5,6,7,9",
                        "--arcs", SECTION_ARCS, "--witness", "--verify"])
    data = json.loads(output)
    assert code == 0
    assert data["nonzero"] is False
    assert data["hall_violator"]
    assert sorted(data["graph"]["open"]) == ["2-1-10@1", "3-1-8@2"]


def test_nonzero_tensor():
    output, code = run(["nonzero-tensor", "--q", "3", "--K", "1..6", "--a", "1-1-6,2-1-5",
                        "--b", "1-1-6,2-1-5,3-1-4", "--nu", "1-2-6,2-1-3,3-1-5", "--verify"])
    assert code == 0
    assert json.loads(output) == {"nonzero": True}


def test_nonzero_restriction():
    output, code = run(["nonzero-restriction", "--q", "2", "--L", "1..3", "--K", "1,3",
                        "--arcs", "1-1-3", "--mu", "1-1-3", "--verify"])
    assert (json.loads(output), code) == ({"nonzero": True}, 0)


def test_gamma_lists_labels():
    output, code = run(["gamma", "--q", "2", "--K", "2,3", "--L", "1..4", "--arcs", "1-1-4,2-1-3"])
    data = json.loads(output)
    assert code == 0
    assert data["graph"]["edges"] == [["1-1-4@0", "2-1-3@1"]]
    assert data["labels"] == ["1-1-4@0(∘,∘)", "2-1-3@1(•,•)"]


def test_straighten_command():
    output, code = run(["straighten", "--q", "3", "--K", "1..3", "--arcs", "1-1-3,1-2-3", "--verify"])
    data = json.loads(output)
    assert code == 0
    assert data["tilde_lambda"] == "1-1-4,2-1-5"
    assert data["r"] == 2


def test_explicit_command():
    output, code = run(["explicit", "--q", "3", "--K", "2,3", "--L", "1..4", "--arcs", "1-1-3,2-1-4", "--verify"])
    assert code == 0
    assert json.loads(output) == {"coefficient": 3, "significant_crossings": ["1-1-3@0|2-1-4@1"]}


def test_poset_steps_command():
    output, code = run(["poset-steps", "--q", "2", "--K", "1..3", "--arcs", "1-1-2,1-1-3"])
    assert code == 0
    assert json.loads(output) == ["{1-1-2,1-1-3} => {1-1-3} [PL, CL@1[1-1-3@1,1-1-2@0]]"]
    output, _ = run(["poset-steps", "--q", "2", "--K", "1..3", "--arcs", "1-1-2,1-1-3", "--depth", "3"])
    assert json.loads(output)["levels"] == [1, 1]


def test_enumerate_command():
    output, code = run(["enumerate", "--q", "2", "--K", "1..3", "--verify"])
    assert code == 0
    assert len(json.loads(output)) == 5
    output, _ = run(["enumerate", "--q", "2", "--K", "1..3", "--arc-count", "2"])
    assert json.loads(output) == ["1-1-2,2-1-3"]
    output, _ = run(["enumerate", "--q", "2", "--K", "1..3", "--max-arcs", "1"])
    assert json.loads(output) == ["", "1-1-2", "1-1-3", "2-1-3"]


def test_value_command():
    output, code = run(["value", "--q", "2", "--K", "1..3", "--arcs", "1-1-3", "--superclass", "1-1-3"])
    assert code == 0
    assert json.loads(output) == {"1-1-3": ["-2"]}


def test_verify_sweep():
    output, code = run(["verify", "--q", "2", "--sweep", "3"])
    assert code == 0
    assert json.loads(output)["mismatches"] == 0
    output, code = run(["verify", "--q", "2", "--suite", "orthogonality", "--n", "3"])
    assert code == 0


def test_unknown_suite():
    assert run(["verify", "--suite", "nope", "--n", "3"])[1] == 1


def test_text_format():
    output, code = run(["expand", "--q", "2", "--K", "1..3", "--arcs", "1-1-3,1-1-3", "--format", "text"])
    assert code == 0
    assert "∅" in output
    assert "1-1-2,2-1-3" in output


def test_render_scalars_and_lists():
    assert render(5, "text") == "5"
    assert render(["a", "b"], "text") == "a\nb"
    assert render({}, "text") == "(empty)"


def test_batch_preserves_order(tmp_path):
    batch = tmp_path / "requests.txt"
    batch.write_text(
        "# worked examples\n"
        "expand --q 3 --K 1..5 --arcs 1-1-5,1-1-5,1-1-5 --coeff-of ''\n"
        "tensor --q 2 --K 1..1 --a '' --b ''\n"
        "\n"
        "restrict --q 2 --L 1..3 --K 1,5 --arcs 1-1-3\n"
    )
    output, code = run(["--batch", str(batch)])
    assert code == 2
    assert output.splitlines()[:2] == ["7", '{"": 1}']


def test_missing_batch_file(tmp_path):
    assert run(["--batch", str(tmp_path / "missing.txt")])[1] == 1


@pytest.mark.parametrize("argv", [["--help"], ["restrict", "--help"]])
def test_help_exits_cleanly(argv, capsys):
    assert run(argv)[1] == 0
    assert "usage" in capsys.readouterr().out


def _too_deep(*args):
    raise RecursionError("maximum recursion depth exceeded")


def test_deep_rewriting_exits_as_guard(monkeypatch):
    monkeypatch.setattr(decomposition, "_expand_terms", _too_deep)
    assert run(["expand", "--q", "2", "--K", "1..3", "--arcs", "1-1-3,1-1-3"]) == ("", 2)


def test_stray_recursion_exits_as_guard(monkeypatch):
    monkeypatch.setattr(supercharacter_cli.SupercharacterTool, "run", _too_deep)
    assert run(["expand", "--q", "2", "--K", "1..3", "--arcs", "1-1-3"]) == ("", 2)
