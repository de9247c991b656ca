"""
Formato de archivo de certificados y transcripciones.

Un certificado es un objeto JSON con campos estables:

    {"n": 1, "lambda": "2", "tower": [], "phi": "<1, 1>",
     "terms": [{"alpha": "1", "slots": ["1"]}],
     "asserted_non_hyp": false, "provenance": ""}

Las clases de cuadrados y las formas usan la gramática de texto de
utils.form_parser. Una transcripción es una lista de registros
{level, tower_level, dim, certificate, report}.
"""

import json
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, Field, ValidationError

from services.construct import (
    CertificateError,
    PipelineTranscript,
    StarCertificate,
    VerificationReport,
)
from services.forms import GeneralizedPfisterTerm, PfisterSlots, TowerField
from services.scalars import DomainError
from utils.form_parser import (
    format_form,
    format_square_class,
    parse_form,
    parse_square_class,
)
from utils.logger import setup_logger

logger = setup_logger("certificates")

class TermDocument(BaseModel):
    """Término α·⟨⟨a₁, …, a_n⟩⟩ serializado."""

    alpha: str
    slots: List[str]

class CertificateDocument(BaseModel):
    """
    Certificado serializado.

    Attributes:
        n (int): Nivel de pliegue
        lam (str): Escalar λ (campo "lambda" en el archivo)
        tower (List[str]): Variables de la torre, en orden
        phi (str): Forma φ
        terms (List[TermDocument]): Términos de la descomposición
        asserted_non_hyp (bool): Bandera afirmada
        provenance (str): Procedencia de la bandera
    """

    model_config = {"populate_by_name": True}

    n: int
    lam: str = Field(alias="lambda")
    tower: List[str] = Field(default_factory=list)
    phi: str
    terms: List[TermDocument]
    asserted_non_hyp: bool = False
    provenance: str = ""

class TranscriptRecord(BaseModel):
    """Nivel de una transcripción de run_pipeline."""

    level: int
    tower_level: int
    dim: int
    certificate: CertificateDocument
    report: VerificationReport

def certificate_to_document(c: StarCertificate) -> CertificateDocument:
    return CertificateDocument(
        n=c.n,
        lam=format_square_class(c.lam),
        tower=list(c.tower.variables),
        phi=format_form(c.phi),
        terms=[
            TermDocument(
                alpha=format_square_class(t.alpha),
                slots=[format_square_class(s) for s in t.pfister.slots],
            )
            for t in c.terms
        ],
        asserted_non_hyp=c.asserted_non_hyp,
        provenance=c.provenance,
    )

def certificate_from_document(doc: CertificateDocument) -> StarCertificate:
    """
    Reconstruye un StarCertificate desde su documento.

    Args:
        doc (CertificateDocument): Documento validado

    Returns:
        StarCertificate: Certificado sobre la torre declarada

    Raises:
        DomainError: Si alguna cadena no respeta la gramática de formas
    """
    tower = TowerField(tuple(doc.tower))
    terms = tuple(
        GeneralizedPfisterTerm(
            parse_square_class(t.alpha, tower),
            PfisterSlots(tower, tuple(parse_square_class(s, tower) for s in t.slots)),
        )
        for t in doc.terms
    )
    return StarCertificate(
        n=doc.n,
        lam=parse_square_class(doc.lam, tower),
        tower=tower,
        phi=parse_form(doc.phi, tower),
        terms=terms,
        asserted_non_hyp=doc.asserted_non_hyp,
        provenance=doc.provenance,
    )

def _read_json(path: Union[str, Path]) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CertificateError(f"JSON inválido en {path}: {e}") from e

def load_certificates(path: Union[str, Path]) -> List[StarCertificate]:
    """
    Lee un certificado suelto o una transcripción completa.

    Args:
        path (Union[str, Path]): Archivo JSON

    Returns:
        List[StarCertificate]: Certificados en el orden del archivo

    Raises:
        CertificateError: Si el archivo no respeta el formato
        OSError: Si el archivo no se puede leer
    """
    data = _read_json(path)
    try:
        if isinstance(data, list):
            documents = [TranscriptRecord.model_validate(r).certificate for r in data]
        else:
            documents = [CertificateDocument.model_validate(data)]
    except ValidationError as e:
        raise CertificateError(f"Certificado mal formado en {path}: {e.error_count()} errores") from e
    try:
        certificates = [certificate_from_document(d) for d in documents]
    except CertificateError:
        raise
    except DomainError as e:
        raise CertificateError(f"Certificado inválido en {path}: {e}") from e
    logger.info(f"{len(certificates)} certificados leídos de {path}")
    return certificates

def load_certificate(path: Union[str, Path]) -> StarCertificate:
    """El último certificado del archivo (el nivel más alto en una transcripción)."""
    return load_certificates(path)[-1]

def dump_certificate(c: StarCertificate, path: Union[str, Path]) -> None:
    document = certificate_to_document(c)
    Path(path).write_text(
        json.dumps(document.model_dump(by_alias=True), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    logger.info(f"Certificado n={c.n} escrito en {path}")

def transcript_to_records(transcript: PipelineTranscript) -> List[TranscriptRecord]:
    return [
        TranscriptRecord(
            level=step.level,
            tower_level=step.tower_level,
            dim=step.dim,
            certificate=certificate_to_document(step.certificate),
            report=step.report,
        )
        for step in transcript.steps
    ]

def dump_transcript(transcript: PipelineTranscript, path: Union[str, Path]) -> None:
    """
    Escribe la transcripción como lista JSON de registros.

    Args:
        transcript (PipelineTranscript): Salida de run_pipeline
        path (Union[str, Path]): Archivo destino
    """
    records = [r.model_dump(by_alias=True) for r in transcript_to_records(transcript)]
    Path(path).write_text(
        json.dumps(records, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    logger.info(f"Transcripción de {len(records)} niveles escrita en {path}")
