"""
Clases de cuadrados sobre torres de cuerpos de series de Laurent, formas
diagonales, formas de Pfister y constructores del anillo de Witt
(suma ortogonal, escalado, producto tensorial, subforma pura).

Una forma se compara como multiconjunto de clases de cuadrados normalizadas:
la igualdad NO es isometría. Las decisiones semánticas viven en
base_deciders y tower_deciders.
"""

import re
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from services.scalars import (
    DomainError,
    RationalLike,
    squarefree_mul,
    squarefree_part,
)

_VARIABLE_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

class TowerMismatchError(DomainError):
    """Excepción para operandos que viven en torres distintas."""
    pass

@dataclass(frozen=True)
class TowerField:
    """
    Torre K_m = ℚ((t₁))…((t_m)).

    Attributes:
        variables (Tuple[str, ...]): Variables de Laurent, en orden de
            completación
        base (str): Cuerpo base (fijo a ℚ)
    """

    variables: Tuple[str, ...] = ()
    base: str = "QQ"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.base != "QQ":
            raise DomainError(f"Cuerpo base no soportado: {self.base}")
        if len(set(self.variables)) != len(self.variables):
            raise DomainError(f"Variables repetidas en la torre: {self.variables}")
        for name in self.variables:
            if not _VARIABLE_NAME.match(name):
                raise DomainError(f"Nombre de variable inválido: {name!r}")

    @property
    def level(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        """Posición (desde 0) de la variable en la torre."""
        try:
            return self.variables.index(name)
        except ValueError:
            raise DomainError(f"Variable no declarada en la torre: {name}")

    def extend(self, names: Iterable[str]) -> "TowerField":
        """
        Torre K((s₁))…((s_k)) con variables nuevas al final.

        Args:
            names (Iterable[str]): Variables frescas

        Returns:
            TowerField: Torre extendida

        Raises:
            DomainError: Si alguna variable ya existe
        """
        names = tuple(names)
        clash = set(names) & set(self.variables)
        if clash:
            raise DomainError(f"Variables ya usadas en la torre: {sorted(clash)}")
        return TowerField(self.variables + names)

    def drop(self, i: int) -> "TowerField":
        """Torre sin la variable en la posición i (desde 0)."""
        return TowerField(self.variables[:i] + self.variables[i + 1:])

    def __str__(self) -> str:
        if not self.variables:
            return "QQ"
        return "QQ" + "".join(f"(({name}))" for name in self.variables)

QQ = TowerField()

@dataclass(frozen=True)
class SquareClass:
    """
    Elemento de K^×/K^×² en forma normal: entero libre de cuadrados por un
    monomio en las variables de la torre con exponentes en {0, 1}. El
    coeficiente se normaliza al construir: SquareClass(12) es la clase de 3.

    Attributes:
        coeff (int): Representante libre de cuadrados de la parte racional
        exponents (Tuple[int, ...]): Un bit por variable de la torre
        tower (TowerField): Torre a la que pertenece
    """

    coeff: int
    exponents: Tuple[int, ...] = ()
    tower: TowerField = field(default=QQ)

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if self.coeff == 0:
            raise DomainError("Una clase de cuadrados no puede ser 0")
        object.__setattr__(self, "coeff", squarefree_part(self.coeff))
        if len(self.exponents) != self.tower.level:
            raise DomainError(
                f"Se esperaban {self.tower.level} exponentes, "
                f"se recibieron {len(self.exponents)}"
            )
        if any(bit not in (0, 1) for bit in self.exponents):
            raise DomainError(f"Exponentes no normalizados: {self.exponents}")

    @classmethod
    def one(cls, tower: TowerField = QQ) -> "SquareClass":
        return cls(1, (0,) * tower.level, tower)

    @classmethod
    def rational(cls, x: RationalLike, tower: TowerField = QQ) -> "SquareClass":
        """Clase de un escalar racional no nulo."""
        return cls(squarefree_part(x), (0,) * tower.level, tower)

    @classmethod
    def monomial(
        cls, x: RationalLike, names: Iterable[str], tower: TowerField
    ) -> "SquareClass":
        """
        Clase de x·∏ names. Las variables repetidas se cancelan (t² es cuadrado).
        """
        bits = [0] * tower.level
        for name in names:
            bits[tower.index(name)] ^= 1
        return cls(squarefree_part(x), tuple(bits), tower)

    @classmethod
    def variable(cls, name: str, tower: TowerField) -> "SquareClass":
        return cls.monomial(1, [name], tower)

    @property
    def is_one(self) -> bool:
        return self.coeff == 1 and not any(self.exponents)

    @property
    def is_rational(self) -> bool:
        return not any(self.exponents)

    def variables(self) -> List[str]:
        """Variables con exponente impar."""
        return [n for n, bit in zip(self.tower.variables, self.exponents) if bit]

    def negate(self) -> "SquareClass":
        return SquareClass(-self.coeff, self.exponents, self.tower)

    def lift(self, tower: TowerField) -> "SquareClass":
        """
        Misma clase vista en una torre que contiene todas sus variables.

        Raises:
            DomainError: Si alguna variable con exponente impar falta en tower
        """
        if tower == self.tower:
            return self
        return SquareClass.monomial(self.coeff, self.variables(), tower)

    def sort_key(self) -> Tuple[Tuple[int, ...], int]:
        return (self.exponents, self.coeff)

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return sc_mul(self, other)

def _check_same_tower(*towers: TowerField) -> TowerField:
    first = towers[0]
    for tower in towers[1:]:
        if tower != first:
            raise TowerMismatchError(f"Torres distintas: {first} y {tower}")
    return first

def sc_mul(x: SquareClass, y: SquareClass) -> SquareClass:
    """
    Ley de grupo en K^×/K^×²: producto de coeficientes normalizado y XOR de
    exponentes.

    Raises:
        TowerMismatchError: Si x e y viven en torres distintas
    """
    tower = _check_same_tower(x.tower, y.tower)
    return SquareClass(
        squarefree_mul(x.coeff, y.coeff),
        tuple(a ^ b for a, b in zip(x.exponents, y.exponents)),
        tower,
    )

@dataclass(frozen=True, eq=False)
class DiagonalForm:
    """
    Forma cuadrática diagonal no degenerada sobre una torre.

    La secuencia vacía es la forma nula (dimensión 0), el cero del anillo
    de Witt. La igualdad es igualdad de multiconjuntos de entradas.

    Attributes:
        tower (TowerField): Torre de definición
        entries (Tuple[SquareClass, ...]): Entradas diagonales
    """

    tower: TowerField
    entries: Tuple[SquareClass, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for entry in self.entries:
            if entry.tower != self.tower:
                raise TowerMismatchError(
                    f"Entrada sobre {entry.tower} en una forma sobre {self.tower}"
                )

    @classmethod
    def of(cls, values: Sequence[RationalLike], tower: TowerField = QQ) -> "DiagonalForm":
        """Forma ⟨a₁, …, a_n⟩ con entradas racionales."""
        return cls(tower, tuple(SquareClass.rational(v, tower) for v in values))

    @classmethod
    def empty(cls, tower: TowerField = QQ) -> "DiagonalForm":
        return cls(tower, ())

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_rational(self) -> bool:
        return all(entry.is_rational for entry in self.entries)

    def coefficients(self) -> List[int]:
        return [entry.coeff for entry in self.entries]

    def entry_multiset(self) -> Tuple[SquareClass, ...]:
        return tuple(sorted(self.entries, key=SquareClass.sort_key))

    def negate(self) -> "DiagonalForm":
        """−q, el opuesto en el anillo de Witt."""
        return DiagonalForm(self.tower, tuple(e.negate() for e in self.entries))

    def lift(self, tower: TowerField) -> "DiagonalForm":
        if tower == self.tower:
            return self
        return DiagonalForm(tower, tuple(e.lift(tower) for e in self.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagonalForm):
            return NotImplemented
        return (
            self.tower == other.tower
            and self.entry_multiset() == other.entry_multiset()
        )

    def __hash__(self) -> int:
        return hash((self.tower, self.entry_multiset()))

    def __len__(self) -> int:
        return len(self.entries)

def orthogonal_sum(q1: DiagonalForm, q2: DiagonalForm) -> DiagonalForm:
    """
    q1 ⊥ q2: concatenación de entradas.

    Raises:
        TowerMismatchError: Si las formas viven en torres distintas
    """
    tower = _check_same_tower(q1.tower, q2.tower)
    return DiagonalForm(tower, q1.entries + q2.entries)

def scale(c: SquareClass, q: DiagonalForm) -> DiagonalForm:
    """c·q: cada entrada multiplicada por c."""
    tower = _check_same_tower(c.tower, q.tower)
    return DiagonalForm(tower, tuple(sc_mul(c, e) for e in q.entries))

def tensor(q1: DiagonalForm, q2: DiagonalForm) -> DiagonalForm:
    """q1 ⊗ q2: todos los productos de entradas; dim = dim q1 · dim q2."""
    tower = _check_same_tower(q1.tower, q2.tower)
    return DiagonalForm(
        tower, tuple(sc_mul(x, y) for x in q1.entries for y in q2.entries)
    )

def annihilator(lam: SquareClass) -> DiagonalForm:
    """La forma ⟨1, −λ⟩."""
    return DiagonalForm(lam.tower, (SquareClass.one(lam.tower), lam.negate()))

@dataclass(frozen=True)
class PfisterSlots:
    """
    Forma de Pfister ⟨⟨a₁, …, a_n⟩⟩ = ⟨1, a₁⟩ ⊗ … ⊗ ⟨1, a_n⟩.

    Attributes:
        tower (TowerField): Torre de definición
        slots (Tuple[SquareClass, ...]): Las n ranuras
    """

    tower: TowerField
    slots: Tuple[SquareClass, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        _check_same_tower(self.tower, *(slot.tower for slot in self.slots))

    @property
    def fold(self) -> int:
        return len(self.slots)

    def append(self, slot: SquareClass) -> "PfisterSlots":
        """⟨⟨a₁, …, a_n, slot⟩⟩."""
        return PfisterSlots(self.tower, self.slots + (slot,))

    def lift(self, tower: TowerField) -> "PfisterSlots":
        return PfisterSlots(tower, tuple(s.lift(tower) for s in self.slots))

    def expand(self) -> DiagonalForm:
        return pfister_expand(self)

def pfister_expand(p: PfisterSlots) -> DiagonalForm:
    """
    ⊗_{i} ⟨1, a_i⟩; dimensión 2ⁿ y primera entrada 1.

    Args:
        p (PfisterSlots): Forma de Pfister

    Returns:
        DiagonalForm: Expansión diagonal
    """
    entries = [SquareClass.one(p.tower)]
    for slot in p.slots:
        entries = entries + [sc_mul(e, slot) for e in entries]
    return DiagonalForm(p.tower, tuple(entries))

def pure_subform(p: PfisterSlots) -> DiagonalForm:
    """
    Subforma pura p̃, con p̃ ⊥ ⟨1⟩ ≅ p.

    Raises:
        DomainError: Si p es 0-fold (la subforma pura sería vacía)
    """
    if p.fold == 0:
        raise DomainError("La forma de Pfister 0-fold no tiene subforma pura")
    expansion = pfister_expand(p)
    return DiagonalForm(p.tower, expansion.entries[1:])

@dataclass(frozen=True)
class GeneralizedPfisterTerm:
    """
    Término α·p de una suma de formas de Pfister generalizadas.

    Attributes:
        alpha (SquareClass): Escalar α
        pfister (PfisterSlots): Forma de Pfister p
    """

    alpha: SquareClass
    pfister: PfisterSlots

    def __post_init__(self):
        _check_same_tower(self.alpha.tower, self.pfister.tower)

    @property
    def tower(self) -> TowerField:
        return self.pfister.tower

    def expand(self) -> DiagonalForm:
        return scale(self.alpha, pfister_expand(self.pfister))

    def lift(self, tower: TowerField) -> "GeneralizedPfisterTerm":
        return GeneralizedPfisterTerm(self.alpha.lift(tower), self.pfister.lift(tower))

def signed_discriminant(q: DiagonalForm) -> SquareClass:
    """(−1)^{d(d−1)/2}·∏ entradas, como clase de cuadrados de la torre."""
    result = SquareClass.one(q.tower)
    for entry in q.entries:
        result = sc_mul(result, entry)
    if (q.dim * (q.dim - 1) // 2) % 2:
        result = result.negate()
    return result
