import json
import logging
from unittest.mock import patch

import pytest

import main as cli
from main import ExitStatus, main, parse_command
from services.forms import TowerField
from utils.form_parser import parse_form

def _records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]

@pytest.mark.parametrize(
    "argv, code, verdict",
    [
        (["isotropy", "--tower", "t1", "<1,t1>"], 1, "anisotropic"),
        (["isotropy", "<1,1,1,-3>"], 0, "isotropic"),
        (["hyperbolic", "<1,-1,2,-2>"], 0, "hyperbolic"),
        (["hyperbolic", "--tower", "t1", "<1,-t1>"], 1, "not_hyperbolic"),
        (["witt-equal", "<1,-1,3>", "<3>"], 0, "equal"),
        (["isometric", "<1,-1,3>", "<3>"], 1, "not_isometric"),
        (["isometric", "<5,5>", "<1,1>"], 0, "isometric"),
        (["similar", "<1,1>", "2"], 0, "similar"),
        (["similar", "<1,1>", "3"], 1, "not_similar"),
        (["represents", "--tower", "t1", "<1,t1>", "t1"], 0, "represents"),
        (["annihilates", "<<1>>", "2"], 0, "annihilated"),
        (["annihilates", "<<1>>", "3"], 1, "not_annihilated"),
    ],
)
def test_decision_verbs(capsys, argv, code, verdict):
    """Prueba el veredicto y el código de salida de cada decisor."""
    assert main(argv) == code
    assert capsys.readouterr().out.strip() == verdict

def test_structured_decision(capsys):
    """Prueba el registro JSON de un decisor."""
    assert main(["isotropy", "--tower", "t1", "--format", "structured", "<1,t1>"]) == 1
    (record,) = _records(capsys.readouterr().out)
    assert record == {
        "command": "isotropy",
        "verdict": "anisotropic",
        "dim": 2,
        "anisotropic_dim": 2,
    }

def test_structured_isotropy_reports_anisotropic_part(capsys):
    """Prueba que ⟨1, 1, 1, −3⟩ es isótropa con parte anisótropa de dimensión 2."""
    assert main(["isotropy", "--format", "structured", "<1,1,1,-3>"]) == 0
    (record,) = _records(capsys.readouterr().out)
    assert (record["dim"], record["anisotropic_dim"]) == (4, 2)

def test_structured_annihilation_names_pfister(capsys):
    """Prueba que el registro de annihilates incluye la forma de Pfister normalizada."""
    assert main(["annihilates", "--tower", "t1", "--format", "structured", "<<1, t1>>", "2"]) == 0
    (record,) = _records(capsys.readouterr().out)
    assert record["pfister"] == "<<1, 1*t1>>"
    assert record["verdict"] == "annihilated"

def test_invariants(capsys):
    """Prueba los invariantes de ⟨1, −2, −3, 6⟩ en formato estructurado."""
    assert main(["invariants", "--format", "structured", "<1,-2,-3,6>"]) == 0
    (record,) = _records(capsys.readouterr().out)
    assert record["verdict"] == "computed"
    assert record["dim"] == 4
    assert record["signature"] == 0
    assert record["signed_disc"] == 1
    assert record["hasse"]["3"] == -1

def test_invariants_by_component(capsys):
    """Prueba que sobre una torre se reportan invariantes por componente."""
    assert main(["invariants", "--tower", "t1", "--format", "structured", "<1, 2*t1, 3*t1>"]) == 0
    (record,) = _records(capsys.readouterr().out)
    assert sorted(record["components"]) == ["0", "1"]
    assert record["components"]["1"]["dim"] == 2

def test_residue(capsys):
    """Prueba la separación q = q₀ ⊥ t1·q₁."""
    argv = ["residue", "--tower", "t1,t2", "--var", "t1", "--format", "structured"]
    assert main(argv + ["<1, 3*t1, -5*t1*t2>"]) == 0
    (record,) = _records(capsys.readouterr().out)
    residue_tower = TowerField(("t2",))
    assert record["residue_tower"] == ["t2"]
    assert parse_form(record["first"], residue_tower) == parse_form("<1>", residue_tower)
    assert parse_form(record["second"], residue_tower) == parse_form("<3, -5*t2>", residue_tower)

def test_verify_cert(capsys, seed_file):
    """Prueba la verificación de la semilla de prueba."""
    assert main(["verify-cert", str(seed_file)]) == 0
    out = capsys.readouterr().out
    assert "non_hyp: asserted (semilla de prueba)" in out
    assert "overall: pass" in out

def test_verify_cert_failure(capsys, tmp_path, worked_seed_document):
    """Prueba que un λ incorrecto da código 1 y cláusulas fallidas."""
    path = tmp_path / "wrong.cert"
    path.write_text(json.dumps({**worked_seed_document, "lambda": "3"}), encoding="utf-8")
    assert main(["verify-cert", "--format", "structured", str(path)]) == 1
    (record,) = _records(capsys.readouterr().out)
    assert record["verdict"] == "fail"
    failed = {c["clause"] for c in record["clauses"] if c["verdict"] == "fail"}
    assert failed == {"lambda_similarity", "annihilation[1]"}

def test_construct_and_reverify(capsys, tmp_path, seed_file):
    """Prueba construct con --out y la verificación de la transcripción escrita."""
    out_path = tmp_path / "transcript.json"
    argv = ["construct", str(seed_file), "--levels", "2", "--out", str(out_path)]
    assert main(argv + ["--format", "structured"]) == 0
    records = _records(capsys.readouterr().out)
    assert [r["dim"] for r in records] == [2, 4, 8]
    assert [r["level"] for r in records] == [1, 2, 3]
    assert [r["tower_level"] for r in records] == [0, 1, 2]
    assert all(r["verdict"] == "pass" for r in records)

    assert main(["verify-cert", "--format", "structured", str(out_path)]) == 0
    verified = _records(capsys.readouterr().out)
    assert [r["n"] for r in verified] == [1, 2, 3]
    assert verified[-1]["tower"] == ["t1", "t2"]
    assert all(r["verdict"] == "pass" for r in verified)

def test_construct_text(capsys, seed_file):
    """Prueba el reporte de texto de construct."""
    assert main(["construct", str(seed_file)]) == 0
    assert capsys.readouterr().out.splitlines() == ["n=1 m=0 dim=2: pass", "n=2 m=1 dim=4: pass"]

def test_construct_bad_seed(capsys, tmp_path, worked_seed_document):
    """Prueba que una semilla que no verifica es un error de entrada con código 2."""
    path = tmp_path / "wrong.cert"
    path.write_text(json.dumps({**worked_seed_document, "lambda": "3"}), encoding="utf-8")
    assert main(["construct", str(path)]) == ExitStatus.INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("error:")
    assert "lambda_similarity" in captured.err

def test_construct_reaches_level_four(capsys, seed_file):
    """Prueba que la semilla de prueba llega a n = 4 con dimensiones 2, 4, 8, 16."""
    assert main(["construct", str(seed_file), "--levels", "3", "--format", "structured"]) == 0
    records = _records(capsys.readouterr().out)
    assert [r["dim"] for r in records] == [2, 4, 8, 16]
    assert [r["level"] for r in records] == [1, 2, 3, 4]
    assert all(r["verdict"] == "pass" for r in records)

def test_seed_search(capsys, tmp_path):
    """Prueba seed-search con λ = 2 sobre ⟨1, 1⟩ y la semilla escrita con --out."""
    out_path = tmp_path / "found.cert"
    argv = ["seed-search", "<1,1>", "--lambdas", "3,2", "--format", "structured", "--out", str(out_path)]
    assert main(argv) == 0
    (record,) = _records(capsys.readouterr().out)
    assert record["verdict"] == "found"
    assert record["albert_profile"] == {
        "dimension_six": False,
        "nontrivial_signed_disc": True,
        "anisotropic": True,
        "even_clifford_division": "unasserted",
    }
    assert record["certificate"]["lambda"] == "2"
    assert record["certificate"]["asserted_non_hyp"] is False

    assert main(["verify-cert", str(out_path)]) == 0
    assert "non_hyp: unasserted" in capsys.readouterr().out

def test_seed_search_not_found(capsys):
    """Prueba que sin λ válido se reporta not_found con código 1."""
    assert main(["seed-search", "<1,1>", "--lambdas", "3"]) == 1
    assert "not_found" in capsys.readouterr().out

def test_seed_search_asserted_flag(capsys):
    """Prueba que --assert-non-hyp queda registrado en la semilla."""
    argv = ["seed-search", "<1,1>", "--lambdas", "2", "--assert-non-hyp", "cálculo externo"]
    assert main(argv + ["--format", "structured"]) == 0
    (record,) = _records(capsys.readouterr().out)
    assert record["certificate"]["asserted_non_hyp"] is True
    assert record["certificate"]["provenance"] == "cálculo externo"

@pytest.mark.parametrize(
    "argv",
    [
        ["isotropy", "<1, 2"],
        ["isotropy", "<1, t1>"],
        ["isotropy", "--tower", "t1,t1", "<1>"],
        ["residue", "--tower", "t1", "--var", "t2", "<1>"],
        ["seed-search", "<1,1,1>", "--lambdas", "2"],
        ["verify-cert", "/nonexistent/missing.cert"],
    ],
)
def test_input_errors(capsys, argv):
    """Prueba que entradas mal formadas devuelven código 2 y un mensaje en stderr."""
    assert main(argv) == ExitStatus.INPUT_ERROR
    assert capsys.readouterr().err.startswith("error:")

def test_input_error_reported_once(capsys, caplog):
    """Prueba que un error de entrada se reporta una sola vez: la línea de stderr."""
    assert main(["isotropy", "<1, 2"]) == ExitStatus.INPUT_ERROR
    err_lines = capsys.readouterr().err.splitlines()
    assert len(err_lines) == 1
    assert err_lines[0].startswith("error:")
    assert not [r for r in caplog.records if r.name == "main" and r.levelno >= logging.WARNING]

def test_zero_budget_is_input_error(capsys):
    """Prueba que --budget 0 se rechaza en lugar de usar el presupuesto por defecto."""
    assert main(["seed-search", "<1,1>", "--lambdas", "2", "--budget", "0"]) == ExitStatus.INPUT_ERROR
    assert "budget" in capsys.readouterr().err

def test_levels_out_of_range(capsys, seed_file):
    """Prueba que --levels mayor que PIPELINE_MAX_LEVELS es un error de entrada."""
    assert main(["construct", str(seed_file), "--levels", "99"]) == ExitStatus.INPUT_ERROR
    assert "levels" in capsys.readouterr().err

def test_malformed_certificate(capsys, tmp_path):
    """Prueba que un certificado con JSON inválido devuelve código 2."""
    path = tmp_path / "bad.cert"
    path.write_text("{", encoding="utf-8")
    assert main(["verify-cert", str(path)]) == ExitStatus.INPUT_ERROR

def test_usage_errors():
    """Prueba que argparse rechaza verbos y argumentos desconocidos con código 2."""
    assert main(["frobnicate"]) == 2
    assert main(["residue", "<1>"]) == 2

def test_internal_error(capsys):
    """Prueba que un fallo inesperado se reporta con código 3."""

    def broken(cmd, tower):
        raise RuntimeError("fallo")

    with patch.dict(cli.HANDLERS, {"isotropy": broken}):
        assert main(["isotropy", "<1>"]) == ExitStatus.INTERNAL_ERROR
    assert capsys.readouterr().out == ""

def test_parse_command():
    """Prueba la traducción de argv a CliCommand."""
    cmd = parse_command(["seed-search", "<1,1>", "--lambdas", "2, 3", "--budget", "10"])
    assert cmd.verb == "seed-search"
    assert cmd.inputs == ["<1,1>"]
    assert cmd.lambdas == ["2", "3"]
    assert cmd.budget == 10
    assert cmd.output_format == "text"

    cmd = parse_command(["annihilates", "--tower", "t1", "<<1, t1>>", "t1"])
    assert cmd.inputs == ["<<1, t1>>", "t1"]
    assert cmd.tower == "t1"
