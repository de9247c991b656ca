"""
Invariantes completos y procedimientos de decisión sobre ℚ: signatura,
discriminante con signo, invariante de Hasse, isotropía local y global
(Hasse–Minkowski), hiperbolicidad, equivalencia de Witt, isometría y
dimensión anisótropa.

Convención de Hasse: c_v(q) = ∏_{i<j} (a_i, a_j)_v. Con ella el valor de
referencia de r·ℍ es (−1, −1)_v^{r(r−1)/2}.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from services.forms import DiagonalForm
from services.scalars import (
    DomainError,
    Place,
    hilbert_symbol,
    is_local_square,
    relevant_places,
    squarefree_mul,
)
from utils.logger import setup_logger

logger = setup_logger("base_deciders")

@dataclass(frozen=True)
class RationalFormInvariants:
    """
    Sistema completo de invariantes de una forma sobre ℚ.

    Attributes:
        dim (int): Dimensión
        signature (int): Positivos menos negativos sobre ℝ
        signed_disc (int): (−1)^{d(d−1)/2}·∏ entradas, libre de cuadrados
        hasse (Dict[Place, int]): c_v en los lugares relevantes; +1 fuera
    """

    dim: int
    signature: int
    signed_disc: int
    hasse: Dict[Place, int] = field(default_factory=dict, hash=False)

    def hasse_at(self, v: Place) -> int:
        return self.hasse.get(v, 1)

    def as_dict(self) -> Dict[str, object]:
        return {
            "dim": self.dim,
            "signature": self.signature,
            "signed_disc": self.signed_disc,
            "hasse": {str(v): c for v, c in sorted(self.hasse.items())},
        }

def _rational_coefficients(q: DiagonalForm) -> List[int]:
    if not q.is_rational:
        raise DomainError("Se esperaba una forma sobre ℚ (sin variables de la torre)")
    return q.coefficients()

def determinant_class(coeffs: Sequence[int]) -> int:
    """Clase libre de cuadrados de ∏ a_i."""
    det = 1
    for a in coeffs:
        det = squarefree_mul(det, a)
    return det

def hasse_invariant(coeffs: Sequence[int], v: Place) -> int:
    """
    c_v = ∏_{i<j} (a_i, a_j)_v, acumulado como ∏_j (a₁⋯a_{j−1}, a_j)_v.

    Args:
        coeffs (Sequence[int]): Entradas libres de cuadrados
        v (Place): Lugar

    Returns:
        int: -1 o +1
    """
    result = 1
    running = 1
    for a in coeffs:
        result *= hilbert_symbol(running, a, v)
        running = squarefree_mul(running, a)
    return result

def _signature(coeffs: Sequence[int]) -> int:
    return sum(1 if a > 0 else -1 for a in coeffs)

def _signed_disc(coeffs: Sequence[int]) -> int:
    det = determinant_class(coeffs)
    n = len(coeffs)
    return -det if (n * (n - 1) // 2) % 2 else det

def invariants_q(q: DiagonalForm) -> RationalFormInvariants:
    """
    Invariantes exactos (dim, signatura, discriminante con signo, Hasse).

    Args:
        q (DiagonalForm): Forma sobre la torre de nivel 0

    Returns:
        RationalFormInvariants: Invariantes de q

    Raises:
        DomainError: Si q tiene variables de la torre
    """
    coeffs = _rational_coefficients(q)
    places = relevant_places(coeffs)
    return RationalFormInvariants(
        dim=len(coeffs),
        signature=_signature(coeffs),
        signed_disc=_signed_disc(coeffs),
        hasse={v: hasse_invariant(coeffs, v) for v in sorted(places)},
    )

def is_locally_isotropic(coeffs: Sequence[int], v: Place) -> bool:
    """
    Isotropía de ⟨a₁, …, a_n⟩ sobre ℚ_v.

    Criterios: n = 2, −a₁a₂ cuadrado local; n = 3, c_v = (−1, −d)_v;
    n = 4, d no es cuadrado local o c_v = (−1, −1)_v; n ≥ 5 en lugares
    finitos, siempre. En el lugar real, indefinida.
    """
    n = len(coeffs)
    if n <= 1:
        return False
    if v.is_real:
        return any(a > 0 for a in coeffs) and any(a < 0 for a in coeffs)
    if n == 2:
        return is_local_square(-coeffs[0] * coeffs[1], v)
    if n >= 5:
        return True
    d = determinant_class(coeffs)
    c = hasse_invariant(coeffs, v)
    if n == 3:
        return c == hilbert_symbol(-1, -d, v)
    return not is_local_square(d, v) or c == hilbert_symbol(-1, -1, v)

@lru_cache(maxsize=65536)
def is_isotropic_q(q: DiagonalForm) -> bool:
    """
    Decide si q representa 0 de forma no trivial sobre ℚ (Hasse–Minkowski).

    Args:
        q (DiagonalForm): Forma sobre ℚ

    Returns:
        bool: True si q es isótropa

    Raises:
        DomainError: Si q tiene variables de la torre
    """
    coeffs = _rational_coefficients(q)
    n = len(coeffs)
    if n <= 1:
        return False
    if n == 2:
        return determinant_class(coeffs) == -1
    if n >= 5:
        # u-invariante de ℚ_p es 4: solo cuenta el lugar real
        return is_locally_isotropic(coeffs, Place.real())
    for v in sorted(relevant_places(coeffs)):
        if not is_locally_isotropic(coeffs, v):
            logger.debug(f"{coeffs} anisótropa en el lugar {v}")
            return False
    return True

def _hyperbolic_hasse(r: int, v: Place) -> int:
    return hilbert_symbol(-1, -1, v) ** ((r * (r - 1) // 2) % 2)

@lru_cache(maxsize=65536)
def hyperbolic_obstruction_q(q: DiagonalForm) -> Optional[str]:
    """
    Primer invariante que impide q ≅ r·ℍ sobre ℚ, o None si q es hiperbólica.

    Compara en orden la paridad de la dimensión, la signatura, el
    discriminante con signo y el invariante de Hasse con el de r·⟨1, −1⟩
    en cada lugar relevante.
    """
    coeffs = _rational_coefficients(q)
    n = len(coeffs)
    if n == 0:
        return None
    if n % 2:
        return f"dimensión impar {n}"
    signature = _signature(coeffs)
    if signature != 0:
        return f"signatura {signature}"
    disc = _signed_disc(coeffs)
    if disc != 1:
        return f"discriminante con signo {disc}"
    r = n // 2
    for v in sorted(relevant_places(coeffs)):
        if hasse_invariant(coeffs, v) != _hyperbolic_hasse(r, v):
            return f"Hasse en {v}"
    return None

def is_hyperbolic_q(q: DiagonalForm) -> bool:
    """Decide si q ≅ r·ℍ sobre ℚ."""
    return hyperbolic_obstruction_q(q) is None

def witt_equivalent_q(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    """q1 = q2 en W(ℚ), es decir q1 ⊥ −q2 hiperbólica."""
    _rational_coefficients(q1)
    _rational_coefficients(q2)
    return is_hyperbolic_q(DiagonalForm(q1.tower, q1.entries + q2.negate().entries))

def isometric_q(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    """Isometría sobre ℚ: misma dimensión y Witt-equivalentes (cancelación)."""
    return q1.dim == q2.dim and witt_equivalent_q(q1, q2)

def _realizable(n2: int, d2: int, k: int, coeffs: Sequence[int]) -> bool:
    """
    ¿Existe una forma q' de dimensión n2 con q ≅ q' ⊥ k·ℍ?

    det q' = d2 y c_v(q') = c_v(q)·(−1,−1)_v^{k(k−1)/2}·(d2, (−1)^k)_v.
    Condiciones locales: n2 = 1, c_v(q') = 1; n2 = 2, c_v(q') = 1 donde −d2
    es cuadrado local; n2 ≥ 3, sin restricción.
    """
    if n2 >= 3:
        return True
    sign = -1 if k % 2 else 1
    for v in sorted(relevant_places(list(coeffs) + [d2])):
        c2 = hasse_invariant(coeffs, v) * _hyperbolic_hasse(k, v)
        c2 *= hilbert_symbol(d2, sign, v)
        if c2 == 1:
            continue
        if n2 == 1 or is_local_square(-d2, v):
            return False
    return True

@lru_cache(maxsize=65536)
def anisotropic_dimension_q(q: DiagonalForm) -> int:
    """
    Dimensión del núcleo anisótropo de q sobre ℚ.

    Es el menor n' ≡ dim q (mod 2), n' ≥ |signatura|, para el que el triple
    (discriminante, Hasse, signatura) es realizable en dimensión n'.
    """
    coeffs = _rational_coefficients(q)
    n = len(coeffs)
    if is_hyperbolic_q(q):
        return 0
    det = determinant_class(coeffs)
    start = max(abs(_signature(coeffs)), 2 - n % 2)
    for n2 in range(start, n, 2):
        k = (n - n2) // 2
        d2 = -det if k % 2 else det
        if _realizable(n2, d2, k, coeffs):
            return n2
    return n
