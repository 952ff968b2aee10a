import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given

from mahlercert.algebra import RatFun, z
from mahlercert.cli import JobSpec, main, run_job
from mahlercert.errors import ERROR_CODES, DivisionByZero, ExprSyntaxError, NonRectangularMatrix
from mahlercert.parser import BinOp, Matrix, Neg, Num, Paren, Pow, Var, eval_expr, evaluate, parse_expr, to_text
from mahlercert.systems import baum_sweet_system, rudin_shapiro_system
from strategies import ratfuns

README = Path(__file__).resolve().parents[1] / "README.md"

# -- parser ------------------------------------------------------------------------


def test_quotient_ast():
    ast = parse_expr("(1+z^2)/(1+z)")
    assert ast == BinOp(
        "/",
        Paren(BinOp("+", Num(1), Pow(Var(), 2))),
        Paren(BinOp("+", Num(1), Var())),
    )


def test_matrix_ast_and_value():
    ast = parse_expr("[[0,1],[1,-z]]")
    assert isinstance(ast, Matrix)
    assert ast.rows == ((Num(0), Num(1)), (Num(1), Neg(Var())))
    assert eval_expr(ast) == baum_sweet_system().A


def test_scaled_matrix():
    assert evaluate("(1/2)*[[1,1],[1/z,-1/z]]") == rudin_shapiro_system().A


def test_precedence_and_associativity():
    assert evaluate("-z^2") == -(z() ** 2)
    assert evaluate("1-2-3") == RatFun.coerce(-4)
    assert evaluate("8/2/2") == RatFun.coerce(2)
    assert evaluate("2*z^-1") == RatFun.z_power(-1, 2)
    assert evaluate(" ( 1 - z ) * ( 1 + z ) ") == 1 - z() ** 2


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("1+")
    assert (info.value.line, info.value.column) == (1, 3)
    assert "z" in info.value.expected and "integer" in info.value.expected


def test_syntax_error_multiline():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("1 +\n * 2")
    assert (info.value.line, info.value.column) == (2, 2)


@pytest.mark.parametrize("text", ["z^z", "z^2^3", "(1", "[[1,2]", "1 $ 2", "", "[1,2]"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text)


def test_division_by_zero_at_evaluation():
    ast = parse_expr("1/(z-z)")
    with pytest.raises(DivisionByZero):
        eval_expr(ast)


def test_ragged_matrix():
    with pytest.raises(NonRectangularMatrix):
        evaluate("[[1,2],[3]]")


@given(ratfuns())
def test_print_parse_round_trip(f):
    assert evaluate(str(f)) == f


def test_ast_printer_round_trip():
    for text in ["(1+z^2)/(1+z)", "[[0,1],[1,-z]]", "1-(2-z)", "2*z^-3"]:
        ast = parse_expr(text)
        assert evaluate(to_text(ast)) == eval_expr(ast)


# -- run_job ------------------------------------------------------------------------


def test_run_job_certify_baum_sweet():
    doc = run_job(JobSpec("certify", ("[[0,1],[1,-z]]",), {"p": 2}, "Galois group of BS equals mu_4 SL_2(C)"))
    assert doc["outcome"] == "Hypertranscendental"
    assert doc["result"]["branch"] == "monomial determinant"
    assert doc["certificate"]["assumptions"][0]["provenance"] == "Galois group of BS equals mu_4 SL_2(C)"
    assert list(doc) == ["tool", "version", "command", "inputs", "outcome", "result", "certificate", "digest"]


def test_run_job_telescope():
    doc = run_job(JobSpec("telescope", ("3",), {"p": 2, "lambda": 2}))
    assert doc["outcome"] == "Found"
    assert doc["result"]["d"] == "3"


def test_run_job_relations_echoes_params():
    doc = run_job(
        JobSpec(
            "relations",
            ("gen:baum-sweet", "gen:baum-sweet:phi"),
            {"p": 2, "precision": 400, "deriv_order": 1, "total_degree": 2, "z_degree": 8},
        )
    )
    assert doc["outcome"] == "no-relation"
    assert doc["result"]["relations"] == []
    assert doc["result"]["search_params"] == {"r": 1, "D": 2, "e": 8, "N": 400}


def test_run_job_deterministic():
    job = JobSpec("certify", ("(1/2)*[[1,1],[1/z,-1/z]]",), {"p": 2}, "RS citation")
    assert json.dumps(run_job(job)) == json.dumps(run_job(job))


def test_jobspec_validation():
    from mahlercert.errors import InvalidArgument

    with pytest.raises(InvalidArgument):
        JobSpec("certify", ("[[1]]",), {"p": 1})
    with pytest.raises(InvalidArgument):
        JobSpec("nope", ())
    with pytest.raises(InvalidArgument):
        JobSpec("classify1", ("z",), {"max_num_deg": 0})


# -- main ----------------------------------------------------------------------------


def run_cli(args, capsys):
    status = main(args)
    out = capsys.readouterr()
    text = out.out if status == 0 else out.err
    return status, json.loads(text)


def test_cli_certify_and_replay_stanza(capsys):
    status, doc = run_cli(["certify", "[[0,1],[1,-z]]", "--assumption", "BS citation"], capsys)
    assert status == 0
    assert doc["replay"]["argv"] == ["certify", "[[0,1],[1,-z]]", "--assumption", "BS citation"]
    assert doc["replay"]["command_line"].startswith("mahlercert certify")


def test_cli_digest_excludes_replay(capsys):
    _, a = run_cli(["classify1", "1/(1-z)"], capsys)
    _, b = run_cli(["classify1", "1/(1-z)", "--format", "compact"], capsys)
    assert a["digest"] == b["digest"]
    assert a["replay"] != b["replay"]


def test_cli_exit_zero_regardless_of_verdict(capsys):
    status, doc = run_cli(["certify", "[[z,0],[0,1]]", "--assumption", "fictitious"], capsys)
    assert status == 0 and doc["outcome"] == "Inconclusive"


def test_cli_file_inputs(tmp_path, capsys):
    (tmp_path / "A.txt").write_text("[[0,1],\n [1,-z]]\n")
    (tmp_path / "cite.txt").write_text("citation from a file\n")
    status, doc = run_cli(["certify", f"@{tmp_path / 'A.txt'}", "--assumption", f"@{tmp_path / 'cite.txt'}"], capsys)
    assert status == 0
    assert doc["inputs"]["assumption"] == "citation from a file"


def test_cli_series_file_round_trip(tmp_path, capsys):
    _, doc = run_cli(["series", "gen:rudin-shapiro", "--precision", "64", "--series-format", "text"], capsys)
    path = tmp_path / "rs.txt"
    path.write_text(doc["result"]["series"])
    _, doc = run_cli(["series", "gen:rudin-shapiro:neg", "--precision", "64"], capsys)
    neg = tmp_path / "rsneg.txt"
    neg.write_text(doc["result"]["series"])
    status, doc = run_cli(
        ["verify", "(1/2)*[[1,1],[1/z,-1/z]]", f"@{path}", f"@{neg}", "--precision", "64"], capsys
    )
    assert status == 0 and doc["outcome"] == "residual-ok"


def test_cli_batch(tmp_path, capsys):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text(
        "# fixtures\n"
        "certify '[[0,1],[1,-z]]' --assumption 'BS citation'\n"
        "telescope 3 --lambda 2\n"
        "classify1 '1+'\n"
    )
    status = main(["batch", str(jobs), "--jobs", "2", "--format", "compact"])
    out = json.loads(capsys.readouterr().out)
    assert status == 1
    assert [d.get("outcome") for d in out["jobs"]] == ["Hypertranscendental", "Found", None]
    assert out["jobs"][2]["error"]["code"] == "SYNTAX_ERROR"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mahlercert.cli", "telescope", "3", "--format", "compact"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["d"] == "3"


# -- error taxonomy -------------------------------------------------------------------

ERROR_TRIGGERS = {
    "ZERO_INPUT": ["classify1", "0"],
    "INVALID_ARGUMENT": ["series", "gen:fibonacci"],
    "UNSUPPORTED_LAMBDA": ["telescope", "1", "--lambda", "1"],
    "POLE_STRUCTURE": ["telescope", "1/z"],
    "SINGULAR_SYSTEM": ["certify", "[[1,z],[1,z]]", "--assumption", "x"],
    "SHAPE_MISMATCH": ["verify", "[[0,1],[1,-z]]", "gen:baum-sweet"],
    "ASSUMPTION_MISSING": ["certify", "[[0,1],[1,-z]]"],
    "RADIX_MISMATCH": ["direct-sum", "[[1]]", "[[1]]", "--p2", "3"],
    "INVALID_EQUATION": ["certify-eq", "1", "z", "0", "--assumption", "x"],
    "SYNTAX_ERROR": ["classify1", "1+"],
    "DIVISION_BY_ZERO": ["classify1", "1/(z-z)"],
    "NON_RECTANGULAR_MATRIX": ["certify", "[[1,2],[3]]", "--assumption", "x"],
}


@pytest.mark.parametrize("code", sorted(ERROR_TRIGGERS))
def test_error_codes_surface_through_cli(code, capsys):
    status, doc = run_cli(ERROR_TRIGGERS[code], capsys)
    assert status == 1
    assert doc["error"]["code"] == code


def test_series_format_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n")
    status, doc = run_cli(["relations", f"@{bad}", "--precision", "4"], capsys)
    assert status == 1 and doc["error"]["code"] == "SERIES_FORMAT"


def test_insufficient_precision_code(tmp_path, capsys):
    short = tmp_path / "short.txt"
    short.write_text("4;1,1,0,1")
    status, doc = run_cli(["verify", "[[0,1],[1,-z]]", f"@{short}", f"@{short}", "--precision", "16"], capsys)
    assert status == 1 and doc["error"]["code"] == "INSUFFICIENT_PRECISION"


def test_internal_inconsistency_code(monkeypatch, capsys):
    import mahlercert.certifier as certifier
    from mahlercert.solvers import NotFoundWithin

    monkeypatch.setattr(certifier, "solve_telescoper", lambda b, p, lam, bounds: NotFoundWithin(bounds))
    status, doc = run_cli(["classify1", "(1+z^2)/(1+z)"], capsys)
    assert status == 1 and doc["error"]["code"] == "INTERNAL_INCONSISTENCY"


def test_every_error_code_is_tested_and_documented():
    covered = set(ERROR_TRIGGERS) | {"SERIES_FORMAT", "INTERNAL_INCONSISTENCY", "INSUFFICIENT_PRECISION"}
    assert covered == set(ERROR_CODES)
    readme = README.read_text()
    for code in ERROR_CODES:
        assert f"`{code}`" in readme
