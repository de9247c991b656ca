"""
Sustrato aritmético exacto de WittTower.
Racionales exactos, parte libre de cuadrados, factorización por división de
prueba, símbolos de Legendre y de Hilbert y lugares relevantes de ℚ.
Todas las funciones son puras y pueden llamarse desde varios hilos.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import gcd
from typing import Dict, Iterable, Optional, Set, Tuple, Union

from sympy.ntheory import factorint, isprime, legendre_symbol

from config import settings
from utils.logger import setup_logger

logger = setup_logger("scalars")

ExactRational = Fraction
SquarefreeInt = int
RationalLike = Union[int, str, Fraction]

# Por debajo de este valor sympy.isprime es determinista
_DETERMINISTIC_PRIMALITY_LIMIT = 2**64

class WittTowerError(Exception):
    """Excepción base para errores de WittTower."""
    pass

class DomainError(WittTowerError, ValueError):
    """Excepción para entradas fuera del dominio de una operación."""
    pass

class FactorizationError(DomainError):
    """Excepción para factorizaciones que no se pudieron completar."""
    pass

def as_rational(x: RationalLike, nonzero: bool = False) -> Fraction:
    """
    Convierte un entero, cadena o Fraction en un racional exacto.

    Args:
        x (RationalLike): Valor a convertir (ej: 3, "-4/9")
        nonzero (bool): Si es True, el valor 0 se rechaza

    Returns:
        Fraction: Racional exacto normalizado

    Raises:
        DomainError: Si el valor no es un racional o es 0 cuando no se permite
    """
    if isinstance(x, bool):
        raise DomainError(f"No es un racional válido: {x!r}")
    try:
        value = x if isinstance(x, Fraction) else Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise DomainError(f"No es un racional válido: {x!r}") from e
    if nonzero and value == 0:
        raise DomainError("Se esperaba un escalar no nulo")
    return value

@lru_cache(maxsize=65536)
def _factor(n: int, bound: int) -> Tuple[Tuple[int, int], ...]:
    factors = factorint(n, limit=bound, use_rho=False, use_pm1=False)
    for p in factors:
        if p < bound * bound:
            continue
        # Cofactor sin divisores <= bound: solo se acepta con primalidad exacta
        if p < _DETERMINISTIC_PRIMALITY_LIMIT and isprime(p):
            continue
        logger.error(f"Factorización incompleta de {n}: cofactor {p}")
        raise FactorizationError(
            f"No se pudo factorizar {n} con división de prueba hasta {bound}"
        )
    return tuple(sorted(factors.items()))

def prime_factors(n: int, bound: Optional[int] = None) -> Dict[int, int]:
    """
    Factoriza |n| por división de prueba.

    Args:
        n (int): Entero no nulo
        bound (Optional[int]): Cota de división de prueba
            (default: FACTOR_TRIAL_BOUND)

    Returns:
        Dict[int, int]: Primo -> exponente

    Raises:
        DomainError: Si n es 0
        FactorizationError: Si queda un cofactor sin certificar
    """
    if n == 0:
        raise DomainError("No se puede factorizar 0")
    if bound is None:
        bound = settings.FACTOR_TRIAL_BOUND
    return dict(_factor(abs(n), bound))

@lru_cache(maxsize=65536)
def _squarefree_int(n: int) -> int:
    core = 1
    for p, e in prime_factors(n).items():
        if e % 2:
            core *= p
    return core if n > 0 else -core

def squarefree_part(x: RationalLike) -> SquarefreeInt:
    """
    Representante libre de cuadrados de la clase de x en ℚ^×/ℚ^×².

    El denominador se incorpora multiplicando por su cuadrado:
    p/q = (p·q)·(1/q)².

    Args:
        x (RationalLike): Racional no nulo

    Returns:
        SquarefreeInt: s libre de cuadrados con x = s·r² y signo(s) = signo(x)

    Raises:
        DomainError: Si x es 0
    """
    value = as_rational(x)
    if value == 0:
        raise DomainError("squarefree_part no está definido para 0")
    return _squarefree_int(value.numerator * value.denominator)

def squarefree_mul(a: SquarefreeInt, b: SquarefreeInt) -> SquarefreeInt:
    """
    Producto de dos clases libres de cuadrados, normalizado sin factorizar.

    Args:
        a (SquarefreeInt): Primer representante
        b (SquarefreeInt): Segundo representante

    Returns:
        SquarefreeInt: Representante de a·b
    """
    g = gcd(a, b)
    return (a // g) * (b // g)

def legendre(a: int, p: int) -> int:
    """
    Símbolo de Legendre (a|p).

    Args:
        a (int): Entero
        p (int): Primo impar

    Returns:
        int: -1, 0 o +1; 0 si y solo si p divide a a

    Raises:
        DomainError: Si p es par o compuesto
    """
    if p < 3 or p % 2 == 0 or not isprime(p):
        raise DomainError(f"El módulo {p} no es un primo impar")
    return int(legendre_symbol(a % p, p))

@total_ordering
@dataclass(frozen=True)
class Place:
    """
    Lugar de ℚ: el lugar real o un primo p.

    Attributes:
        prime (Optional[int]): Primo p, o None para el lugar real
    """

    prime: Optional[int] = None

    def __post_init__(self):
        if self.prime is not None and (self.prime < 2 or not isprime(self.prime)):
            raise DomainError(f"{self.prime} no es primo")

    @classmethod
    def real(cls) -> "Place":
        return cls(None)

    @classmethod
    def at(cls, p: int) -> "Place":
        return cls(p)

    @property
    def is_real(self) -> bool:
        return self.prime is None

    def _key(self) -> Tuple[int, int]:
        return (0, 0) if self.prime is None else (1, self.prime)

    def __lt__(self, other: "Place") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "real" if self.prime is None else str(self.prime)

def _split(n: int, p: int) -> Tuple[int, int]:
    """Descompone n = p^v·u con u unidad en p."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n

def _epsilon(u: int) -> int:
    return ((u - 1) // 2) % 2

def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2

@lru_cache(maxsize=262144)
def _hilbert_squarefree(a: int, b: int, p: Optional[int]) -> int:
    if p is None:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split(a, p)
    beta, w = _split(b, p)
    if p == 2:
        exponent = _epsilon(u) * _epsilon(w) + alpha * _omega(w) + beta * _omega(u)
        return -1 if exponent % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** beta * legendre(w, p) ** alpha

def hilbert_symbol(a: RationalLike, b: RationalLike, v: Place) -> int:
    """
    Símbolo de Hilbert (a, b)_v.

    Vale +1 si z² = a·x² + b·y² tiene solución no trivial en la completación
    de ℚ en v. Se usa la fórmula de valuación/unidad en p impar, la fórmula
    ε/ω (mod 8) en p = 2 y el signo en el lugar real.

    Args:
        a (RationalLike): Escalar no nulo
        b (RationalLike): Escalar no nulo
        v (Place): Lugar de ℚ

    Returns:
        int: -1 o +1

    Raises:
        DomainError: Si a o b es 0
    """
    return _hilbert_squarefree(squarefree_part(a), squarefree_part(b), v.prime)

def relevant_places(entries: Iterable[RationalLike]) -> Set[Place]:
    """
    Lugares donde algún dato de Hasse/Hilbert de la forma diagonal con estas
    entradas puede ser no trivial: {real, 2} y los primos de numeradores y
    denominadores.

    Args:
        entries (Iterable[RationalLike]): Entradas no nulas

    Returns:
        Set[Place]: Conjunto de lugares

    Raises:
        DomainError: Si alguna entrada es 0
    """
    places = {Place.real(), Place.at(2)}
    for x in entries:
        value = as_rational(x, nonzero=True)
        for n in (value.numerator, value.denominator):
            places.update(Place.at(p) for p in prime_factors(n))
    return places

def is_local_square(d: RationalLike, v: Place) -> bool:
    """
    Indica si d es un cuadrado en la completación ℚ_v.

    Args:
        d (RationalLike): Escalar no nulo
        v (Place): Lugar de ℚ

    Returns:
        bool: True si d ∈ ℚ_v^×²
    """
    s = squarefree_part(d)
    if v.is_real:
        return s > 0
    if v.prime == 2:
        return s % 8 == 1
    if s % v.prime == 0:
        return False
    return legendre(s, v.prime) == 1
