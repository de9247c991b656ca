"""
Segundo residuo, descomposición en componentes sobre
K = ℚ((t₁))…((t_m)) y decisores basados en Springer.

Las componentes se indexan por el vector completo de exponentes
ε ∈ {0,1}^m. Por exactitud iterada de la sucesión del residuo,
W(K) ≅ ⊕_ε W(ℚ) y cada decisión se reduce a decisiones sobre ℚ en cada
componente, en orden determinista.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from services.base_deciders import (
    RationalFormInvariants,
    anisotropic_dimension_q,
    hyperbolic_obstruction_q,
    invariants_q,
    is_hyperbolic_q,
    is_isotropic_q,
    witt_equivalent_q,
)
from services.forms import (
    QQ,
    DiagonalForm,
    PfisterSlots,
    SquareClass,
    TowerField,
    TowerMismatchError,
    annihilator,
    orthogonal_sum,
    pfister_expand,
    scale,
    tensor,
)
from services.scalars import DomainError
from utils.logger import setup_logger

logger = setup_logger("tower_deciders")

Exponents = Tuple[int, ...]

@dataclass(frozen=True)
class ComponentDecomposition:
    """
    Componentes q_ε sobre ℚ de una forma sobre una torre.

    Solo se guardan las componentes no vacías.

    Attributes:
        tower (TowerField): Torre de la forma original
        components (Dict[Exponents, DiagonalForm]): ε -> q_ε sobre ℚ
    """

    tower: TowerField
    components: Dict[Exponents, DiagonalForm] = field(default_factory=dict, hash=False)

    def component(self, eps: Exponents) -> DiagonalForm:
        """q_ε, o la forma vacía si no hay entradas con exponentes ε."""
        return self.components.get(tuple(eps), DiagonalForm.empty(QQ))

    def reassemble(self) -> DiagonalForm:
        """⊥_ε t^ε·q_ε sobre la torre original."""
        entries = []
        for eps, comp in self.components.items():
            for entry in comp.entries:
                entries.append(SquareClass(entry.coeff, eps, self.tower))
        return DiagonalForm(self.tower, tuple(entries))

    @property
    def total_dim(self) -> int:
        return sum(comp.dim for comp in self.components.values())

def decompose(q: DiagonalForm) -> ComponentDecomposition:
    """
    Agrupa las entradas de q por vector de exponentes.

    Args:
        q (DiagonalForm): Forma sobre una torre de nivel m

    Returns:
        ComponentDecomposition: Componentes no vacías, ordenadas por ε
    """
    groups: Dict[Exponents, list] = {}
    for entry in q.entries:
        groups.setdefault(entry.exponents, []).append(SquareClass(entry.coeff))
    components = {
        eps: DiagonalForm(QQ, tuple(groups[eps])) for eps in sorted(groups)
    }
    return ComponentDecomposition(q.tower, components)

def second_residue(q: DiagonalForm, i: int) -> Tuple[DiagonalForm, DiagonalForm]:
    """
    Separa q = q₀ ⊥ t_i·q₁ según el i-ésimo bit; δ_{2,t_i}(q) = q₁.

    Args:
        q (DiagonalForm): Forma sobre una torre de nivel m
        i (int): Índice de la variable, 1 ≤ i ≤ m

    Returns:
        Tuple[DiagonalForm, DiagonalForm]: (q₀, q₁) sobre la torre sin t_i

    Raises:
        DomainError: Si el índice está fuera de rango
    """
    m = q.tower.level
    if not 1 <= i <= m:
        raise DomainError(f"Índice de variable fuera de rango: {i} (nivel {m})")
    residue_tower = q.tower.drop(i - 1)
    halves: Tuple[list, list] = ([], [])
    for entry in q.entries:
        bits = entry.exponents[: i - 1] + entry.exponents[i:]
        halves[entry.exponents[i - 1]].append(
            SquareClass(entry.coeff, bits, residue_tower)
        )
    return (
        DiagonalForm(residue_tower, tuple(halves[0])),
        DiagonalForm(residue_tower, tuple(halves[1])),
    )

def is_anisotropic_tower(q: DiagonalForm) -> bool:
    """
    Springer iterado: q es anisótropa si y solo si cada q_ε lo es sobre ℚ.
    """
    for eps, comp in decompose(q).components.items():
        if is_isotropic_q(comp):
            logger.debug(f"Componente {eps} isótropa: {comp.coefficients()}")
            return False
    return True

def is_isotropic_tower(q: DiagonalForm) -> bool:
    return not is_anisotropic_tower(q)

def is_hyperbolic_tower(q: DiagonalForm) -> bool:
    """q hiperbólica si y solo si cada componente es hiperbólica sobre ℚ."""
    return all(is_hyperbolic_q(c) for c in decompose(q).components.values())

def hyperbolicity_obstructions(q: DiagonalForm) -> Dict[Exponents, str]:
    """
    Componentes que no son hiperbólicas y el invariante que lo impide.

    Returns:
        Dict[Exponents, str]: ε -> obstrucción de q_ε; vacío si q es hiperbólica
    """
    obstructions: Dict[Exponents, str] = {}
    for eps, comp in sorted(decompose(q).components.items()):
        reason = hyperbolic_obstruction_q(comp)
        if reason is not None:
            obstructions[eps] = reason
    return obstructions

def _check_tower(q1: DiagonalForm, q2: DiagonalForm) -> None:
    if q1.tower != q2.tower:
        raise TowerMismatchError(f"Torres distintas: {q1.tower} y {q2.tower}")

def witt_equivalent_tower(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    """
    q1 = q2 en W(K_m), componente a componente.

    Raises:
        TowerMismatchError: Si las formas viven en torres distintas
    """
    _check_tower(q1, q2)
    left = decompose(q1)
    right = decompose(q2)
    for eps in sorted(set(left.components) | set(right.components)):
        if not witt_equivalent_q(left.component(eps), right.component(eps)):
            logger.debug(f"Componente {eps} distinta en W(ℚ)")
            return False
    return True

def isometric_tower(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    """Misma dimensión y Witt-equivalentes (cancelación de Witt)."""
    _check_tower(q1, q2)
    return q1.dim == q2.dim and witt_equivalent_tower(q1, q2)

def anisotropic_part_dims(q: DiagonalForm) -> Dict[Exponents, int]:
    """
    Dimensión anisótropa de cada componente no vacía. Q_an ≅ ⊥_ε t^ε·(q_ε)_an.

    Returns:
        Dict[Exponents, int]: ε -> dim (q_ε)_an
    """
    return {
        eps: anisotropic_dimension_q(comp)
        for eps, comp in decompose(q).components.items()
    }

def anisotropic_dimension_tower(q: DiagonalForm) -> int:
    return sum(anisotropic_part_dims(q).values())

def component_invariants(q: DiagonalForm) -> Dict[Exponents, RationalFormInvariants]:
    """Invariantes sobre ℚ de cada componente no vacía."""
    return {eps: invariants_q(comp) for eps, comp in decompose(q).components.items()}

def represents(q: DiagonalForm, c: SquareClass) -> bool:
    """
    c ∈ D(q). Las formas isótropas son universales; si no, c ∈ D(q) si y
    solo si q ⊥ ⟨−c⟩ es isótropa.
    """
    if c.tower != q.tower:
        raise TowerMismatchError(f"Torres distintas: {q.tower} y {c.tower}")
    if is_isotropic_tower(q):
        return True
    return is_isotropic_tower(
        orthogonal_sum(q, DiagonalForm(q.tower, (c.negate(),)))
    )

def is_similarity_factor(q: DiagonalForm, lam: SquareClass) -> bool:
    """λ ∈ G(q) = {a : a·q ≅ q}."""
    return isometric_tower(scale(lam, q), q)

def annihilated_by(p: PfisterSlots, lam: SquareClass) -> bool:
    """⟨1, −λ⟩ ⊗ p = 0 en W(K)."""
    return is_hyperbolic_tower(tensor(annihilator(lam), pfister_expand(p)))
