"""Command parsing, output shapes and exit codes."""

import json

import pytest

from hermlab.cli import build_parser, main, parse, parse_element
from hermlab.errors import ParseError
from hermlab.lab import basis_ij, basis_j, scalar, standard_algebra


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


def test_parse_builds_commands():
    args = parse(["isotropy", "quad", "--field", "CDV(F5)", "--form", "1,u"])
    assert args.verb == "isotropy" and args.what == "quad"
    args = parse(["uinv", "exact", "--field", "CDV(GFF(9))", "--class", "(u,pi)",
                  "--type", "plus", "--assert-division", "residue"])
    assert args.assertions == ["residue"]
    args = parse(["bounds", "tensor", "--n", "2", "--uk", "8"])
    assert args.n == 2


def test_parse_errors_do_not_exit():
    with pytest.raises(ParseError):
        parse(["isotropy", "quad", "--field", "CDV(F5)"])
    with pytest.raises(ParseError):
        parse(["nonsense"])


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "isotropy", "quad", "--field", "CDV(F5)")
    assert code == 1 and "usage error" in err
    code, _, err = run(capsys, "isotropy", "quad", "--field", "F6", "--form", "1")
    assert code == 1
    code, _, err = run(capsys, "uinv", "exact", "--field", "CDV(F5)",
                       "--class", "(u,pi)", "--type", "zero")
    assert code == 1  # unitary kind without the extension class


def test_quad_json_payload(capsys):
    code, payload, _ = run_json(capsys, "isotropy", "quad", "--field", "CDV(F5)",
                                "--form", "1,u,pi,u*pi", "--oracle")
    assert code == 0
    assert payload["isotropic"] is False
    assert payload["oracle"] is False
    assert payload["path"] and payload["path"][0]["field"] == "CDV(F5)"
    # stable under reserialization
    assert json.loads(json.dumps(payload)) == payload


def test_herm_json_payload(capsys):
    code, payload, _ = run_json(
        capsys, "isotropy", "herm", "--field", "CDV(F5)", "--class", "(u,pi)",
        "--eps", "+1", "--canonical", "--form", "1,pi")
    assert code == 0
    assert payload["shape"] == "a"
    assert payload["isotropic"] is True
    assert payload["reduced_quadratic"].startswith("<")


def test_herm_requires_an_involution(capsys):
    code, _, err = run(capsys, "isotropy", "herm", "--field", "CDV(F5)",
                       "--class", "(u,pi)", "--form", "1")
    assert code == 1 and "involution" in err


def test_usearch(capsys):
    code, payload, _ = run_json(capsys, "usearch", "--shape", "a",
                                "--field", "CDV(F5)", "--class", "(u,pi)")
    assert code == 0 and payload["u"] == 1
    code, payload, _ = run_json(capsys, "usearch", "--shape", "b",
                                "--field", "CDV(F5)", "--lambda", "u")
    assert code == 0 and payload["u"] == 2


def test_uinv_exact_json_includes_derivation(capsys):
    code, payload, _ = run_json(
        capsys, "uinv", "exact", "--field", "CDV(CDV(F5))", "--class", "(u,t)",
        "--type", "plus", "--witness")
    assert code == 0
    assert payload["value"] == 6
    deriv = payload["derivation"]
    assert set(deriv) >= {"rule", "field", "class", "kind", "value", "cite", "children"}
    assert [c["value"] for c in deriv["children"]] == [2, 4]
    assert payload["witness"]["rank"] == 6
    assert payload["witness"]["verified"] is True


def test_uinv_missing_assertion_exit_code(capsys):
    code, _, err = run(capsys, "uinv", "exact", "--field", "CDV(GFF(9))",
                       "--class", "(a,b);(v,pi)", "--type", "plus")
    assert code == 3 and "assert" in err


def test_uinv_not_division_exit_code(capsys):
    code, _, err = run(capsys, "uinv", "exact", "--field", "CDV(CDV(F5))",
                       "--class", "(u,p)", "--type", "zero", "--lambda", "u")
    assert code == 3 and "division" in err


def test_unsupported_shape_exit_code(capsys):
    code, _, err = run(capsys, "usearch", "--shape", "a", "--field", "CDV(F5)",
                       "--class", "(u,pi)", "--eps", "-1")
    assert code == 3


def test_bounds_commands(capsys):
    code, payload, _ = run_json(capsys, "bounds", "ai", "--i", "3", "--d", "4")
    assert code == 0 and payload["plus"] == "5" and payload["minus"] == "3"
    code, payload, _ = run_json(capsys, "bounds", "tensor", "--n", "2", "--uk", "8")
    assert code == 0
    assert payload["minus"] == "13/2" and payload["minus_floor"] == 6


def test_lab_commands(capsys):
    code, payload, _ = run_json(capsys, "lab", "pid", "--p", "5",
                                "--sigma", "inti-gamma", "--t", "j")
    assert code == 0 and payload["case"] == 1 and all(payload["checks"].values())
    code, payload, _ = run_json(capsys, "lab", "pid", "--p", "5",
                                "--sigma", "gamma", "--t", "j")
    assert code == 0 and payload["case"] == 2
    code, payload, _ = run_json(capsys, "lab", "larmour", "--p", "5",
                                "--sigma", "gamma", "--form", "1,5")
    assert code == 0
    assert payload["isotropic"] is True
    assert payload["trace_reduction"] is True


def test_parse_element_grammar():
    alg = standard_algebra(5)
    assert parse_element(alg, "j") == basis_j(alg)
    assert parse_element(alg, "5j") == basis_j(alg).scale(5)
    assert parse_element(alg, "-j") == -basis_j(alg)
    assert parse_element(alg, "k") == basis_ij(alg)
    assert parse_element(alg, "7") == scalar(alg, 7)
    assert parse_element(alg, "1,2,3,4").coords == (1, 2, 3, 4)
    with pytest.raises(ParseError):
        parse_element(alg, "1,2,3")
    with pytest.raises(ParseError):
        parse_element(alg, "zebra")


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "paper", "--only", "bounds")
    assert code == 0
    assert "[PASS]" in out and "bounds" in out and "lab" not in out


def test_verify_unknown_section(capsys):
    code, _, err = run(capsys, "verify", "paper", "--only", "nonsense")
    assert code == 1


def test_verify_json(capsys):
    code, payload, _ = run_json(capsys, "verify", "paper", "--only", "sequence")
    assert code == 0
    assert payload["ok"] is True
    assert all(row["ok"] for row in payload["rows"])


def test_help_text_lists_verbs():
    helptext = build_parser().format_help()
    for verb in ("isotropy", "usearch", "uinv", "bounds", "lab", "verify"):
        assert verb in helptext
