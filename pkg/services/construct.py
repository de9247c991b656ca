"""
Certificados de la propiedad ⋆, el paso recursivo que lleva
(n, λ, K, φ) a (n+1, λ, K((t₁))…((t_m)), Q_m), el pipeline iterado y los
reportes de verificación.

La cláusula "λ ∉ Hyp(φ)·L^×²" no es decidible aquí: se transporta como
una bandera afirmada con su procedencia y nunca se reporta como "pass".
"""

from dataclasses import dataclass
from typing import Callable, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel

from config import settings
from services.base_deciders import anisotropic_dimension_q
from services.forms import (
    DiagonalForm,
    GeneralizedPfisterTerm,
    PfisterSlots,
    SquareClass,
    TowerField,
    annihilator,
    orthogonal_sum,
    pfister_expand,
    scale,
    sc_mul,
    signed_discriminant,
    tensor,
)
from services.scalars import DomainError, WittTowerError, squarefree_part
from services.tower_deciders import (
    annihilated_by,
    hyperbolicity_obstructions,
    is_anisotropic_tower,
    is_similarity_factor,
    represents,
    witt_equivalent_tower,
)
from utils.logger import setup_logger
from utils.search_budget import SearchBudget

logger = setup_logger("construct")

VarNamer = Callable[[TowerField, int], List[str]]

class CertificateError(DomainError):
    """Excepción para certificados estructuralmente inválidos."""
    pass

class PipelineError(WittTowerError):
    """Excepción para cláusulas decidibles que fallan dentro del pipeline."""

    def __init__(self, message: str, report: Optional["VerificationReport"] = None):
        super().__init__(message)
        self.report = report

@dataclass(frozen=True)
class StarCertificate:
    """
    Cuádrupla (n, λ, L, φ) con su descomposición {(α_i, p_i)}.

    Attributes:
        n (int): Nivel de pliegue (≥ 1)
        lam (SquareClass): Escalar λ
        tower (TowerField): Cuerpo L
        phi (DiagonalForm): Forma φ
        terms (Tuple[GeneralizedPfisterTerm, ...]): Términos α_i·p_i
        asserted_non_hyp (bool): Bandera afirmada "λ ∉ Hyp(φ)·L^×²"
        provenance (str): Procedencia de la bandera
    """

    n: int
    lam: SquareClass
    tower: TowerField
    phi: DiagonalForm
    terms: Tuple[GeneralizedPfisterTerm, ...]
    asserted_non_hyp: bool = False
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def dim(self) -> int:
        return self.phi.dim

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def decomposition(self) -> DiagonalForm:
        """⊥_i α_i·p_i."""
        result = DiagonalForm.empty(self.tower)
        for term in self.terms:
            result = orthogonal_sum(result, term.expand())
        return result

Verdict = Literal["pass", "fail", "asserted", "unasserted"]

class ClauseRecord(BaseModel):
    """Resultado de una cláusula del certificado."""

    clause: str
    verdict: Verdict
    detail: str = ""

    @property
    def decidable(self) -> bool:
        return self.verdict in ("pass", "fail")

class VerificationReport(BaseModel):
    """Reporte detallado de verify_star."""

    clauses: List[ClauseRecord]
    overall: Literal["pass", "fail"]

    @property
    def passed(self) -> bool:
        return self.overall == "pass"

    def failures(self) -> List[ClauseRecord]:
        return [c for c in self.clauses if c.verdict == "fail"]

@dataclass(frozen=True)
class PipelineStep:
    """
    Nivel del pipeline.

    Attributes:
        level (int): Nivel n del certificado
        tower_level (int): Nivel m de la torre
        certificate (StarCertificate): Certificado del nivel
        report (VerificationReport): Verificación del certificado
        dim (int): Dimensión de Q
    """

    level: int
    tower_level: int
    certificate: StarCertificate
    report: VerificationReport
    dim: int

@dataclass(frozen=True)
class PipelineTranscript:
    """Secuencia de niveles de run_pipeline, empezando por la semilla."""

    steps: Tuple[PipelineStep, ...]

    @property
    def final(self) -> PipelineStep:
        return self.steps[-1]

def _check_structure(c: StarCertificate) -> None:
    if c.n < 1:
        raise CertificateError(f"Nivel de pliegue inválido: {c.n}")
    if not c.terms:
        raise CertificateError("El certificado no tiene términos")
    towers = [c.lam.tower, c.phi.tower] + [t.tower for t in c.terms]
    for tower in towers:
        if tower != c.tower:
            raise CertificateError(f"Dato sobre {tower} en un certificado sobre {c.tower}")

def _record(clause: str, ok: bool, detail: str = "") -> ClauseRecord:
    return ClauseRecord(clause=clause, verdict="pass" if ok else "fail", detail=detail)

def _obstruction_detail(q: DiagonalForm, witness: str) -> str:
    """Testigo si q es hiperbólica; si no, la primera componente que falla."""
    obstructions = hyperbolicity_obstructions(q)
    if not obstructions:
        return witness
    eps, reason = next(iter(obstructions.items()))
    if not eps:
        return reason
    return f"componente ε={''.join(map(str, eps))}: {reason}"

def _lambda_similarity(c: StarCertificate) -> ClauseRecord:
    ok = is_similarity_factor(c.phi, c.lam)
    difference = orthogonal_sum(scale(c.lam, c.phi), c.phi.negate())
    return _record("lambda_similarity", ok, _obstruction_detail(difference, "λ·φ ≅ φ"))

def _annihilation(c: StarCertificate, i: int, term: GeneralizedPfisterTerm) -> ClauseRecord:
    ok = annihilated_by(term.pfister, c.lam)
    product = tensor(annihilator(c.lam), pfister_expand(term.pfister))
    witness = f"⟨1, −λ⟩ ⊗ p_{i} hiperbólica"
    return _record(f"annihilation[{i}]", ok, _obstruction_detail(product, witness))

def _i_power_necessary(c: StarCertificate) -> ClauseRecord:
    if c.phi.dim % 2:
        return _record("i_power_necessary", False, f"dim φ = {c.phi.dim} impar")
    if c.n >= 2:
        disc = signed_discriminant(c.phi)
        if not disc.is_one:
            return _record("i_power_necessary", False, "discriminante con signo no trivial")
    return _record("i_power_necessary", True, f"dim φ = {c.phi.dim}")

def verify_star(c: StarCertificate) -> VerificationReport:
    """
    Verifica todas las cláusulas decidibles de la propiedad ⋆.

    Orden: (a) pliegues; (a') Pfister anisótropas; (b) φ anisótropa;
    (c) φ = Σ α_i·p_i en W(L); (d) λ ∈ G(φ); (e) ⟨1, −λ⟩ ⊗ p_i = 0;
    condiciones necesarias de Iⁿ; (f) bandera Hyp afirmada.

    Args:
        c (StarCertificate): Certificado bien formado

    Returns:
        VerificationReport: Reporte cláusula por cláusula

    Raises:
        CertificateError: Si el certificado mezcla torres o está vacío
    """
    _check_structure(c)
    clauses: List[ClauseRecord] = []

    folds = [t.pfister.fold for t in c.terms]
    clauses.append(_record("fold_counts", all(f == c.n for f in folds), f"pliegues {folds}, n = {c.n}"))

    anisotropic_pfisters = [is_anisotropic_tower(pfister_expand(t.pfister)) for t in c.terms]
    clauses.append(
        _record(
            "pfister_anisotropic",
            all(anisotropic_pfisters),
            f"{sum(anisotropic_pfisters)}/{len(anisotropic_pfisters)} anisótropas",
        )
    )
    clauses.append(_record("phi_anisotropic", is_anisotropic_tower(c.phi), f"dim φ = {c.phi.dim}"))
    clauses.append(
        _record(
            "witt_decomposition",
            witt_equivalent_tower(c.phi, c.decomposition()),
            f"{c.term_count} términos",
        )
    )
    clauses.append(_lambda_similarity(c))
    for i, term in enumerate(c.terms, start=1):
        clauses.append(_annihilation(c, i, term))
    clauses.append(_i_power_necessary(c))

    if c.asserted_non_hyp:
        clauses.append(ClauseRecord(clause="non_hyp", verdict="asserted", detail=c.provenance))
    else:
        clauses.append(ClauseRecord(clause="non_hyp", verdict="unasserted", detail=c.provenance))

    passed = all(r.verdict == "pass" for r in clauses if r.decidable)
    report = VerificationReport(clauses=clauses, overall="pass" if passed else "fail")
    if not passed:
        failed = ", ".join(r.clause for r in report.failures())
        logger.warning(f"Certificado n={c.n} sobre {c.tower}: fallan {failed}")
    return report

def default_var_namer(tower: TowerField, count: int) -> List[str]:
    """
    Nombres t{k+1}, …, t{k+m} para k = nivel de la torre; se saltan los
    nombres ya usados.
    """
    names: List[str] = []
    used = set(tower.variables)
    k = tower.level
    while len(names) < count:
        k += 1
        candidate = f"t{k}"
        if candidate not in used:
            names.append(candidate)
    return names

def construct_step(
    c: StarCertificate, fresh_vars: Optional[Sequence[str]] = None
) -> StarCertificate:
    """
    Un paso recursivo: certificado de nivel n+1 sobre K_m = L((t₁))…((t_m)).

    Q_m = φ ⊥ t₁·p₁ ⊥ … ⊥ t_m·p_m y los nuevos términos son
    α_i·⟨⟨p_i, α_i·t_i⟩⟩, ya que α_i·(p_i ⊗ ⟨1, α_i t_i⟩) = p_i ⊗ ⟨α_i, t_i⟩
    en W(K_m).

    Args:
        c (StarCertificate): Certificado que verifica sus cláusulas decidibles
        fresh_vars (Optional[Sequence[str]]): Una variable fresca por término
            (default: default_var_namer)

    Returns:
        StarCertificate: Certificado (n+1, λ, K_m, Q_m)

    Raises:
        CertificateError: Si hay colisión de variables o no hay tantas
            variables como términos
    """
    _check_structure(c)
    m = c.term_count
    fresh = list(fresh_vars) if fresh_vars is not None else default_var_namer(c.tower, m)
    if len(fresh) != m:
        raise CertificateError(f"Se esperaban {m} variables frescas, se recibieron {len(fresh)}")
    if len(set(fresh)) != m or set(fresh) & set(c.tower.variables):
        raise CertificateError(f"Colisión de variables: {fresh} con {list(c.tower.variables)}")
    try:
        tower = c.tower.extend(fresh)
    except DomainError as e:
        raise CertificateError(str(e)) from e

    q = c.phi.lift(tower)
    terms = []
    for term, name in zip(c.terms, fresh):
        t = SquareClass.variable(name, tower)
        lifted = term.lift(tower)
        q = orthogonal_sum(q, scale(t, pfister_expand(lifted.pfister)))
        terms.append(
            GeneralizedPfisterTerm(lifted.alpha, lifted.pfister.append(sc_mul(lifted.alpha, t)))
        )

    provenance = f"recursive step n={c.n}->{c.n + 1} over {', '.join(fresh)}"
    if c.provenance:
        provenance = f"{c.provenance}; {provenance}"
    logger.info(f"Paso recursivo n={c.n} -> {c.n + 1}: torre {tower}, dim {q.dim}")
    return StarCertificate(
        n=c.n + 1,
        lam=c.lam.lift(tower),
        tower=tower,
        phi=q,
        terms=tuple(terms),
        asserted_non_hyp=c.asserted_non_hyp,
        provenance=provenance,
    )

def run_pipeline(
    seed: StarCertificate, levels: int, var_namer: Optional[VarNamer] = None
) -> PipelineTranscript:
    """
    Aplica construct_step `levels` veces, verificando cada nivel.

    Args:
        seed (StarCertificate): Semilla que verifica sus cláusulas decidibles
        levels (int): Número de pasos
        var_namer (Optional[VarNamer]): Esquema de nombres
            (default: default_var_namer)

    Returns:
        PipelineTranscript: Semilla y niveles construidos

    Raises:
        DomainError: Si levels es negativo o supera PIPELINE_MAX_LEVELS
        CertificateError: Si la semilla no verifica sus cláusulas decidibles
        PipelineError: Si falla una cláusula decidible en un nivel construido
    """
    if levels < 0 or levels > settings.PIPELINE_MAX_LEVELS:
        raise DomainError(f"levels debe estar entre 0 y {settings.PIPELINE_MAX_LEVELS}")
    namer = var_namer or default_var_namer

    report = verify_star(seed)
    if not report.passed:
        failed = ", ".join(r.clause for r in report.failures())
        raise CertificateError(f"La semilla no verifica sus cláusulas decidibles: {failed}")
    steps = [PipelineStep(seed.n, seed.tower.level, seed, report, seed.dim)]

    current = seed
    for _ in range(levels):
        following = construct_step(current, namer(current.tower, current.term_count))
        expected = current.dim + current.term_count * 2**current.n
        if following.dim != expected:
            logger.error(f"Dimensión {following.dim} en el nivel {following.n}, se esperaba {expected}")
            raise PipelineError(f"Recurrencia de dimensión violada en el nivel {following.n}")
        report = verify_star(following)
        if not report.passed:
            logger.error(f"El nivel {following.n} no verifica: {report.failures()}")
            raise PipelineError(f"El certificado de nivel {following.n} no verifica", report)
        steps.append(PipelineStep(following.n, following.tower.level, following, report, following.dim))
        current = following

    logger.info(f"Pipeline completo: n={current.n}, torre de nivel {current.tower.level}, dim {current.dim}")
    return PipelineTranscript(tuple(steps))

def small_square_classes(bound: int, tower: TowerField) -> List[SquareClass]:
    """Clases racionales ±s con s libre de cuadrados y s ≤ bound, por |s|."""
    classes = []
    for s in range(1, bound + 1):
        if squarefree_part(s) == s:
            classes.append(SquareClass(s, (0,) * tower.level, tower))
            classes.append(SquareClass(-s, (0,) * tower.level, tower))
    return classes

def seed_search(
    q: DiagonalForm,
    lambda_candidates: Sequence[SquareClass],
    budget: Optional[int] = None,
    coeff_bound: Optional[int] = None,
    asserted_non_hyp: bool = False,
    provenance: str = "",
) -> Optional[StarCertificate]:
    """
    Busca una semilla de nivel 1 para q sobre ℚ.

    Toma el primer λ candidato con λ ∈ G(q) y descompone q de forma voraz:
    elige α ∈ D(r) y una ranura a con ⟨⟨a⟩⟩ anisótropa y
    ⟨1, −λ⟩ ⊗ ⟨⟨a⟩⟩ = 0 tal que
    r − α·⟨1, a⟩ baje estrictamente la dimensión anisótropa, hasta que el
    resto sea hiperbólico.

    Args:
        q (DiagonalForm): Forma sobre ℚ, de dimensión par y anisótropa
        lambda_candidates (Sequence[SquareClass]): Candidatos a λ, en orden
        budget (Optional[int]): Evaluaciones máximas de cada fase, filtrado de
            ranuras y descomposición voraz (default: SEED_SEARCH_BUDGET)
        coeff_bound (Optional[int]): Cota de coeficientes (default: SEED_COEFF_BOUND)
        asserted_non_hyp (bool): Bandera a registrar en el certificado
        provenance (str): Procedencia de la bandera

    Returns:
        Optional[StarCertificate]: Certificado, o None si la búsqueda falla

    Raises:
        DomainError: Si q no está sobre ℚ, es de dimensión impar o es isótropa,
            o si budget o coeff_bound no son positivos
    """
    if q.tower.level != 0:
        raise DomainError("seed_search requiere una forma sobre ℚ")
    if q.dim == 0 or q.dim % 2:
        raise DomainError(f"seed_search requiere dimensión par positiva, dim = {q.dim}")
    if not is_anisotropic_tower(q):
        raise DomainError("seed_search requiere una forma anisótropa")

    if budget is None:
        budget = settings.SEED_SEARCH_BUDGET
    if coeff_bound is None:
        coeff_bound = settings.SEED_COEFF_BOUND
    if budget < 1 or coeff_bound < 1:
        raise DomainError(f"budget y coeff_bound deben ser positivos: {budget}, {coeff_bound}")
    limiter = SearchBudget(budget)
    candidates = small_square_classes(coeff_bound, q.tower)

    lam = next((c for c in lambda_candidates if is_similarity_factor(q, c)), None)
    if lam is None:
        logger.warning("Ningún λ candidato es factor de similitud")
        return None

    slots = []
    for a in candidates:
        if not limiter.consume("slots"):
            return None
        pfister = PfisterSlots(q.tower, (a,))
        if is_anisotropic_tower(pfister_expand(pfister)) and annihilated_by(pfister, lam):
            slots.append(a)
    logger.debug(f"{len(slots)} ranuras admisibles; quedan {limiter.remaining('terms')} evaluaciones para términos")

    remainder = q
    current = anisotropic_dimension_q(remainder)
    terms: List[GeneralizedPfisterTerm] = []
    while current > 0:
        chosen = None
        for alpha in candidates:
            if not limiter.consume("terms"):
                return None
            if not represents(remainder, alpha):
                continue
            for a in slots:
                if not limiter.consume("terms"):
                    return None
                term = GeneralizedPfisterTerm(alpha, PfisterSlots(q.tower, (a,)))
                candidate = orthogonal_sum(remainder, term.expand().negate())
                reduced = anisotropic_dimension_q(candidate)
                if reduced < current:
                    chosen = (term, candidate, reduced)
                    break
            if chosen:
                break
        if chosen is None:
            logger.warning(f"Búsqueda voraz atascada con dimensión anisótropa {current}")
            return None
        term, remainder, current = chosen
        terms.append(term)
        logger.debug(f"Término α={term.alpha.coeff}, a={term.pfister.slots[0].coeff}; resto {current}")

    certificate = StarCertificate(
        n=1,
        lam=lam,
        tower=q.tower,
        phi=q,
        terms=tuple(terms),
        asserted_non_hyp=asserted_non_hyp,
        provenance=provenance,
    )
    if not verify_star(certificate).passed:
        logger.warning("La semilla encontrada no verifica")
        return None
    logger.info(
        f"Semilla encontrada: λ={lam.coeff}, {len(terms)} términos, "
        f"{limiter.used('slots')} + {limiter.used('terms')} evaluaciones"
    )
    return certificate

class AlbertProfile(BaseModel):
    """Diagnóstico de la condición de semilla de forma de Albert virtual."""

    dimension_six: bool
    nontrivial_signed_disc: bool
    anisotropic: bool
    even_clifford_division: Verdict = "unasserted"

    @property
    def candidate(self) -> bool:
        return self.dimension_six and self.nontrivial_signed_disc and self.anisotropic

def albert_profile(q: DiagonalForm, division_asserted: bool = False) -> AlbertProfile:
    """
    Parte decidible de la condición de semilla: dimensión 6, discriminante
    con signo no trivial y anisotropía. Que C₀(q) sea de división no se
    decide y se registra como afirmado.
    """
    return AlbertProfile(
        dimension_six=q.dim == 6,
        nontrivial_signed_disc=not signed_discriminant(q).is_one,
        anisotropic=is_anisotropic_tower(q),
        even_clifford_division="asserted" if division_asserted else "unasserted",
    )
