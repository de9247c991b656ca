"""
CLI principal de WittTower.
Parsea formas y certificados, ejecuta los decisores y el pipeline de
construcción, y emite reportes en texto o en registros JSON por línea.

Los decisores devuelven 0 si el veredicto es verdadero y 1 si es falso;
una entrada mal formada devuelve 2 y un fallo interno 3.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional

from config import settings
from services.base_deciders import invariants_q
from services.certificates import (
    certificate_to_document,
    dump_certificate,
    dump_transcript,
    load_certificate,
    load_certificates,
)
from services.construct import (
    PipelineError,
    albert_profile,
    run_pipeline,
    seed_search,
    verify_star,
)
from services.forms import TowerField
from services.scalars import DomainError
from services.tower_deciders import (
    anisotropic_dimension_tower,
    annihilated_by,
    component_invariants,
    is_hyperbolic_tower,
    is_isotropic_tower,
    is_similarity_factor,
    isometric_tower,
    represents,
    second_residue,
    witt_equivalent_tower,
)
from utils.form_parser import (
    format_form,
    format_pfister,
    parse_form,
    parse_pfister,
    parse_square_class,
    parse_tower,
)
from utils.logger import set_global_level, setup_logger

logger = setup_logger("main")

VERBS = (
    "invariants",
    "isotropy",
    "hyperbolic",
    "witt-equal",
    "isometric",
    "similar",
    "represents",
    "annihilates",
    "residue",
    "verify-cert",
    "construct",
    "seed-search",
)

class ExitStatus(IntEnum):
    SUCCESS = 0
    FALSE = 1
    INPUT_ERROR = 2
    INTERNAL_ERROR = 3

@dataclass
class CliCommand:
    """
    Comando ya parseado.

    Attributes:
        verb (str): Uno de VERBS
        inputs (List[str]): Formas, escalares o rutas, en orden
        tower (str): Declaración de la torre ("t1,t2")
        output_format (str): "text" o "structured"
        levels (int): Pasos de construct
        budget (Optional[int]): Presupuesto de seed-search
        out (Optional[str]): Archivo de salida
        lambdas (List[str]): Candidatos a λ de seed-search
        var (Optional[str]): Variable de residue
        assert_non_hyp (Optional[str]): Procedencia de la bandera afirmada
        log_level (Optional[str]): Nivel de logging
    """

    verb: str
    inputs: List[str] = field(default_factory=list)
    tower: str = ""
    output_format: str = "text"
    levels: int = 1
    budget: Optional[int] = None
    out: Optional[str] = None
    lambdas: List[str] = field(default_factory=list)
    var: Optional[str] = None
    assert_non_hyp: Optional[str] = None
    log_level: Optional[str] = None

@dataclass
class CommandResult:
    """Registros y líneas de texto producidos por un comando."""

    ok: bool
    records: List[Dict[str, Any]] = field(default_factory=list)
    lines: List[str] = field(default_factory=list)

def _decision(verb: str, value: bool, true_label: str, false_label: str, **extra) -> CommandResult:
    verdict = true_label if value else false_label
    return CommandResult(
        ok=value,
        records=[{"command": verb, "verdict": verdict, **extra}],
        lines=[verdict],
    )

def _cmd_invariants(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    if tower.level == 0:
        inv = invariants_q(q).as_dict()
        lines = [f"{key}: {value}" for key, value in inv.items()]
        return CommandResult(True, [{"command": cmd.verb, "verdict": "computed", **inv}], lines)
    components = {
        "".join(map(str, eps)): inv.as_dict() for eps, inv in component_invariants(q).items()
    }
    lines = [f"ε={eps}: {inv}" for eps, inv in components.items()]
    return CommandResult(
        True, [{"command": cmd.verb, "verdict": "computed", "components": components}], lines
    )

def _cmd_isotropy(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    return _decision(
        cmd.verb,
        is_isotropic_tower(q),
        "isotropic",
        "anisotropic",
        dim=q.dim,
        anisotropic_dim=anisotropic_dimension_tower(q),
    )

def _cmd_hyperbolic(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    return _decision(cmd.verb, is_hyperbolic_tower(q), "hyperbolic", "not_hyperbolic", dim=q.dim)

def _cmd_witt_equal(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q1, q2 = (parse_form(text, tower) for text in cmd.inputs[:2])
    return _decision(cmd.verb, witt_equivalent_tower(q1, q2), "equal", "not_equal")

def _cmd_isometric(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q1, q2 = (parse_form(text, tower) for text in cmd.inputs[:2])
    return _decision(cmd.verb, isometric_tower(q1, q2), "isometric", "not_isometric")

def _cmd_similar(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    lam = parse_square_class(cmd.inputs[1], tower)
    return _decision(cmd.verb, is_similarity_factor(q, lam), "similar", "not_similar")

def _cmd_represents(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    c = parse_square_class(cmd.inputs[1], tower)
    return _decision(cmd.verb, represents(q, c), "represents", "not_represents")

def _cmd_annihilates(cmd: CliCommand, tower: TowerField) -> CommandResult:
    p = parse_pfister(cmd.inputs[0], tower)
    lam = parse_square_class(cmd.inputs[1], tower)
    return _decision(
        cmd.verb,
        annihilated_by(p, lam),
        "annihilated",
        "not_annihilated",
        pfister=format_pfister(p),
    )

def _cmd_residue(cmd: CliCommand, tower: TowerField) -> CommandResult:
    if not cmd.var:
        raise DomainError("residue requiere --var")
    q = parse_form(cmd.inputs[0], tower)
    q0, q1 = second_residue(q, tower.index(cmd.var) + 1)
    record = {
        "command": cmd.verb,
        "verdict": "computed",
        "residue_tower": list(q0.tower.variables),
        "first": format_form(q0),
        "second": format_form(q1),
    }
    return CommandResult(True, [record], [f"q0 = {format_form(q0)}", f"q1 = {format_form(q1)}"])

def _cmd_verify_cert(cmd: CliCommand, tower: TowerField) -> CommandResult:
    result = CommandResult(ok=True)
    for certificate in load_certificates(cmd.inputs[0]):
        report = verify_star(certificate)
        result.ok = result.ok and report.passed
        result.records.append(
            {
                "command": cmd.verb,
                "verdict": report.overall,
                "n": certificate.n,
                "tower": list(certificate.tower.variables),
                "dim": certificate.dim,
                "clauses": [c.model_dump() for c in report.clauses],
            }
        )
        result.lines.append(f"n={certificate.n} sobre {certificate.tower}, dim {certificate.dim}")
        result.lines.extend(
            f"  {c.clause}: {c.verdict}" + (f" ({c.detail})" if c.detail else "")
            for c in report.clauses
        )
        result.lines.append(f"  overall: {report.overall}")
    return result

def _cmd_construct(cmd: CliCommand, tower: TowerField) -> CommandResult:
    seed = load_certificate(cmd.inputs[0])
    transcript = run_pipeline(seed, cmd.levels)
    if cmd.out:
        dump_transcript(transcript, cmd.out)
    result = CommandResult(ok=True)
    for step in transcript.steps:
        result.records.append(
            {
                "command": cmd.verb,
                "verdict": step.report.overall,
                "level": step.level,
                "tower_level": step.tower_level,
                "dim": step.dim,
            }
        )
        result.lines.append(
            f"n={step.level} m={step.tower_level} dim={step.dim}: {step.report.overall}"
        )
    return result

def _cmd_seed_search(cmd: CliCommand, tower: TowerField) -> CommandResult:
    q = parse_form(cmd.inputs[0], tower)
    profile = albert_profile(q)
    lambdas = [parse_square_class(text, tower) for text in cmd.lambdas]
    seed = seed_search(
        q,
        lambdas,
        budget=cmd.budget,
        asserted_non_hyp=cmd.assert_non_hyp is not None,
        provenance=cmd.assert_non_hyp or "",
    )
    record: Dict[str, Any] = {
        "command": cmd.verb,
        "verdict": "found" if seed else "not_found",
        "albert_profile": profile.model_dump(),
    }
    lines = [f"albert_profile: {profile.model_dump()}", record["verdict"]]
    if seed:
        record["certificate"] = certificate_to_document(seed).model_dump(by_alias=True)
        lines.append(json.dumps(record["certificate"], ensure_ascii=False))
        if cmd.out:
            dump_certificate(seed, cmd.out)
    return CommandResult(seed is not None, [record], lines)

HANDLERS: Dict[str, Callable[[CliCommand, TowerField], CommandResult]] = {
    "invariants": _cmd_invariants,
    "isotropy": _cmd_isotropy,
    "hyperbolic": _cmd_hyperbolic,
    "witt-equal": _cmd_witt_equal,
    "isometric": _cmd_isometric,
    "similar": _cmd_similar,
    "represents": _cmd_represents,
    "annihilates": _cmd_annihilates,
    "residue": _cmd_residue,
    "verify-cert": _cmd_verify_cert,
    "construct": _cmd_construct,
    "seed-search": _cmd_seed_search,
}

def _emit(cmd: CliCommand, result: CommandResult) -> None:
    if cmd.output_format == "structured":
        for record in result.records:
            print(json.dumps(record, ensure_ascii=False, sort_keys=True))
    else:
        for line in result.lines:
            print(line)

def run(cmd: CliCommand) -> int:
    """
    Ejecuta un comando y escribe el reporte en stdout.

    Args:
        cmd (CliCommand): Comando bien formado

    Returns:
        int: Código de ExitStatus
    """
    if cmd.log_level:
        set_global_level(cmd.log_level)
    try:
        tower = parse_tower(cmd.tower)
        result = HANDLERS[cmd.verb](cmd, tower)
    except PipelineError as e:
        logger.error(f"Pipeline interrumpido: {str(e)}")
        if e.report is not None:
            for clause in e.report.failures():
                logger.error(f"  {clause.clause}: {clause.detail}")
        return ExitStatus.INTERNAL_ERROR
    except (DomainError, OSError) as e:
        logger.debug(f"Entrada inválida en {cmd.verb}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return ExitStatus.INPUT_ERROR
    except Exception as e:
        logger.error(f"Error interno en {cmd.verb}: {str(e)}", exc_info=True)
        return ExitStatus.INTERNAL_ERROR
    _emit(cmd, result)
    return ExitStatus.SUCCESS if result.ok else ExitStatus.FALSE

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tower", default="", help="Variables de la torre en orden: t1,t2,…")
    common.add_argument(
        "--format",
        dest="output_format",
        choices=("text", "structured"),
        default=settings.DEFAULT_OUTPUT_FORMAT,
    )
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(
        prog="witttower",
        description="Formas cuadráticas sobre torres ℚ((t₁))…((t_m)) y certificados ⋆",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb in ("invariants", "isotropy", "hyperbolic"):
        sub.add_parser(verb, parents=[common]).add_argument("form")
    for verb in ("witt-equal", "isometric"):
        p = sub.add_parser(verb, parents=[common])
        p.add_argument("form")
        p.add_argument("other")
    for verb in ("similar", "represents"):
        p = sub.add_parser(verb, parents=[common])
        p.add_argument("form")
        p.add_argument("scalar")
    p = sub.add_parser("annihilates", parents=[common])
    p.add_argument("pfister")
    p.add_argument("scalar")

    p = sub.add_parser("residue", parents=[common])
    p.add_argument("form")
    p.add_argument("--var", required=True)

    sub.add_parser("verify-cert", parents=[common]).add_argument("path")

    p = sub.add_parser("construct", parents=[common])
    p.add_argument("path")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("seed-search", parents=[common])
    p.add_argument("form")
    p.add_argument("--lambdas", required=True, help="Candidatos a λ separados por coma")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--assert-non-hyp", default=None, metavar="PROVENANCE")
    return parser

def parse_command(argv: Optional[List[str]] = None) -> CliCommand:
    """
    Traduce argv a un CliCommand.

    Raises:
        SystemExit: Si argparse rechaza los argumentos (código 2)
    """
    args = build_parser().parse_args(argv)
    positional = ("form", "other", "pfister", "scalar", "path")
    inputs = [getattr(args, name) for name in positional if getattr(args, name, None) is not None]
    lambdas = getattr(args, "lambdas", None)
    return CliCommand(
        verb=args.verb,
        inputs=inputs,
        tower=args.tower,
        output_format=args.output_format,
        levels=getattr(args, "levels", 1),
        budget=getattr(args, "budget", None),
        out=getattr(args, "out", None),
        lambdas=[s.strip() for s in lambdas.split(",")] if lambdas else [],
        var=getattr(args, "var", None),
        assert_non_hyp=getattr(args, "assert_non_hyp", None),
        log_level=args.log_level,
    )

def main(argv: Optional[List[str]] = None) -> int:
    try:
        cmd = parse_command(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return int(run(cmd))

if __name__ == "__main__":
    sys.exit(main())
