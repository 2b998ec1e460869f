import subprocess
import sys
from pathlib import Path

import pytest

from qcl2hol import thf
from qcl2hol.cli import (
    EXIT_COUNTERMODEL,
    EXIT_DISAGREEMENT,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    main,
)
from qcl2hol.semantics import parse_model

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def sig_file(tmp_path):
    path = tmp_path / "sig.txt"
    path.write_text("pred b 1\n")
    return str(path)


def test_translate_conditional(capsys, sig_file):
    code, out, _ = run(capsys, "translate", "a => forall X. b(X)", "--sig", sig_file)
    assert code == EXIT_OK
    assert "combinator: ( ccond @ a @ ( cforall_ind @ ^ [X: mu] : ( b @ X ) ) )" in out
    assert "type: $i > $o" in out


def test_translate_propositional_variable(capsys):
    code, out, _ = run(capsys, "translate", "p")
    assert code == EXIT_OK
    assert "combinator: p" in out
    assert "type: $i > $o" in out


def test_translate_is_deterministic(capsys, sig_file):
    first = run(capsys, "translate", "p => b(X)", "--sig", sig_file)
    second = run(capsys, "translate", "p => b(X)", "--sig", sig_file)
    assert first == second


def test_emit_writes_golden_files(capsys, tmp_path, sig_file):
    out_dir = tmp_path / "out"
    code, out, _ = run(
        capsys,
        "emit",
        "(forall X. (a => b(X))) -> (a => forall X. b(X))",
        "--name",
        "bf",
        "--out",
        str(out_dir),
        "--sig",
        sig_file,
    )
    assert code == EXIT_OK
    assert str(out_dir / "bf.p") in out
    axioms = (out_dir / "CK_axioms.ax").read_text()
    problem = (out_dir / "bf.p").read_text()
    assert thf.tokens_equal(axioms, (GOLDEN / "CK_axioms.ax").read_text())
    assert thf.tokens_equal(problem, (GOLDEN / "bf.p").read_text())


def test_validate_valid_formula(capsys):
    code, out, _ = run(
        capsys, "validate", "forallp q. (q | ~q)", "--worlds", "2", "--individuals", "1"
    )
    assert code == EXIT_OK
    assert "valid-within-bounds" in out
    assert "models_checked = 65540" in out


def test_validate_reports_countermodel(capsys):
    code, out, _ = run(capsys, "validate", "p", "--worlds", "1")
    assert code == EXIT_COUNTERMODEL
    assert "countermodel" in out
    # The serialized model block must parse back.
    lines = out.splitlines()
    start = next(i for i, line in enumerate(lines) if line.startswith("worlds "))
    model = parse_model("\n".join(lines[start:]))
    assert model.num_worlds == 1


def test_validate_non_theorem_conditional(capsys):
    code, out, _ = run(capsys, "validate", "(p => q) -> (p -> q)", "--worlds", "2")
    assert code == EXIT_COUNTERMODEL


def test_validate_resource_limit(capsys):
    code, _, err = run(capsys, "validate", "p", "--worlds", "4")
    assert code == EXIT_RESOURCE
    assert "resource limit" in err


def test_correspond_small_sweep(capsys):
    code, out, _ = run(
        capsys,
        "correspond",
        "--worlds",
        "2",
        "--individuals",
        "1",
        "--depth",
        "2",
        "--seed",
        "7",
        "--max-models",
        "20",
        "--format",
        "structured",
    )
    assert code == EXIT_OK
    assert "disagreements: 0" in out
    assert "seed: 7" in out
    assert "formulas: 562" in out


def test_correspond_replay_is_identical(capsys):
    args = (
        "correspond", "--worlds", "1", "--individuals", "2", "--depth", "3",
        "--seed", "11", "--samples", "50", "--max-models", "10",
    )
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second
    assert first[0] == EXIT_OK


def test_rules_sweep(capsys):
    code, out, _ = run(
        capsys, "rules", "--worlds", "2", "--individuals", "1", "--max-models", "30",
        "--format", "structured",
    )
    assert code == EXIT_OK
    assert "violations: 0" in out


def test_validate_with_explicit_prop_domain_file(capsys, tmp_path):
    q_file = tmp_path / "q.txt"
    q_file.write_text("0 1\n")
    code, out, _ = run(
        capsys,
        "validate",
        "forallp q. (q | ~q)",
        "--worlds",
        "1",
        "--q-mode",
        "file",
        "--q-file",
        str(q_file),
    )
    assert code == EXIT_OK
    assert "q_mode = file" in out


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "validate", "p |")
    assert code == EXIT_USAGE
    assert "error" in err


def test_unknown_command_exit_code(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE


def test_formula_from_file(capsys, tmp_path):
    path = tmp_path / "formula.txt"
    path.write_text("p | ~p")
    code, out, _ = run(capsys, "translate", f"@{path}")
    assert code == EXIT_OK
    assert "( cor @ p @ ( cnot @ p ) )" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qcl2hol", "translate", "p | ~p"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "cor" in proc.stdout
