from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.scalars import (
    DomainError,
    FactorizationError,
    Place,
    as_rational,
    hilbert_symbol,
    is_local_square,
    legendre,
    prime_factors,
    relevant_places,
    squarefree_mul,
    squarefree_part,
)
from tests.oracles import hilbert_by_search

GRID = [1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10]

nonzero_ints = st.integers(min_value=-2000, max_value=2000).filter(lambda x: x != 0)
small_rationals = st.builds(
    Fraction,
    st.integers(min_value=-100, max_value=100).filter(lambda x: x != 0),
    st.integers(min_value=1, max_value=100),
)
places = st.sampled_from([Place.real(), Place.at(2), Place.at(3), Place.at(5), Place.at(7)])

@pytest.mark.parametrize(
    "value, expected",
    [
        (12, 3),
        (-18, -2),
        (1, 1),
        (Fraction(3, 4), 3),
        ("-4/9", -1),
        ("8/3", 6),
        (-50, -2),
    ],
)
def test_squarefree_part(value, expected):
    """Prueba la parte libre de cuadrados con enteros, fracciones y cadenas."""
    assert squarefree_part(value) == expected

def test_squarefree_part_rejects_zero():
    """Prueba que 0 no tiene clase de cuadrados."""
    with pytest.raises(DomainError):
        squarefree_part(0)

def test_as_rational():
    """Prueba la conversión a racional exacto."""
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational(5) == Fraction(5)
    with pytest.raises(DomainError):
        as_rational("x")
    with pytest.raises(DomainError):
        as_rational(0, nonzero=True)

@given(nonzero_ints, nonzero_ints)
def test_squarefree_mul_matches_product(a, b):
    """Prueba que el producto normalizado coincide con la parte libre del producto."""
    assert squarefree_mul(squarefree_part(a), squarefree_part(b)) == squarefree_part(a * b)

def test_prime_factors():
    """Prueba la factorización por división de prueba."""
    assert prime_factors(360) == {2: 3, 3: 2, 5: 1}
    assert prime_factors(-7) == {7: 1}
    assert prime_factors(2 * 1000003, bound=100) == {2: 1, 1000003: 1}

def test_prime_factors_incomplete():
    """Prueba que un cofactor compuesto sin certificar produce FactorizationError."""
    with pytest.raises(FactorizationError):
        prime_factors(1000003 * 1000033, bound=100)

def test_legendre():
    """Prueba el símbolo de Legendre."""
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    assert legendre(-1, 5) == 1
    with pytest.raises(DomainError):
        legendre(1, 2)
    with pytest.raises(DomainError):
        legendre(1, 9)

def test_place_ordering():
    """Prueba el orden real < 2 < 3 de los lugares."""
    places = sorted({Place.at(5), Place.real(), Place.at(2)})
    assert [str(v) for v in places] == ["real", "2", "5"]
    with pytest.raises(DomainError):
        Place.at(4)

@pytest.mark.parametrize(
    "a, b, place, expected",
    [
        (-1, -1, Place.real(), -1),
        (-1, -1, Place.at(2), -1),
        (-1, -1, Place.at(3), 1),
        (2, 3, Place.at(3), -1),
        (2, 3, Place.at(2), -1),
        (2, 3, Place.real(), 1),
        (3, 3, Place.at(3), -1),
        (5, 5, Place.at(5), 1),
        (2, -1, Place.at(2), 1),
    ],
)
def test_hilbert_symbol_values(a, b, place, expected):
    """Prueba valores conocidos del símbolo de Hilbert."""
    assert hilbert_symbol(a, b, place) == expected

def test_hilbert_symbol_on_squares():
    """Prueba que (a, b) no depende del representante de la clase."""
    assert hilbert_symbol(8, 12, Place.at(2)) == hilbert_symbol(2, 3, Place.at(2))
    assert hilbert_symbol(Fraction(1, 3), 5, Place.at(5)) == hilbert_symbol(3, 5, Place.at(5))

@settings(max_examples=100, deadline=None)
@given(nonzero_ints, nonzero_ints)
def test_hilbert_product_formula(a, b):
    """Prueba la fórmula del producto ∏_v (a, b)_v = 1."""
    product = 1
    for v in relevant_places([a, b]):
        product *= hilbert_symbol(a, b, v)
    assert product == 1

@given(nonzero_ints, nonzero_ints, places)
def test_hilbert_symmetric(a, b, v):
    """Prueba simetría y (a, −a)_v = 1."""
    assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
    assert hilbert_symbol(a, -a, v) == 1

@settings(max_examples=150, deadline=None)
@given(nonzero_ints, nonzero_ints, nonzero_ints, places)
def test_hilbert_bimultiplicative(a, b, c, v):
    """Prueba (a, bc)_v = (a, b)_v·(a, c)_v y (ab, c)_v = (a, c)_v·(b, c)_v."""
    assert hilbert_symbol(a, b * c, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a, c, v)
    assert hilbert_symbol(a * b, c, v) == hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v)

@settings(max_examples=100, deadline=None)
@given(small_rationals, small_rationals)
def test_hilbert_product_formula_over_rationals(a, b):
    """Prueba ∏_v (a, b)_v = 1 con numeradores y denominadores hasta 100."""
    product = 1
    for v in relevant_places([a, b]):
        product *= hilbert_symbol(a, b, v)
    assert product == 1

@pytest.mark.parametrize("p", [3, 5, 7])
def test_hilbert_matches_mod_p_cubed_search(p):
    """Prueba (a, b)_p contra la búsqueda de soluciones primitivas mod p³."""
    mismatches = [
        (a, b)
        for a in GRID
        for b in GRID
        if hilbert_symbol(a, b, Place.at(p)) != hilbert_by_search(a, b, p)
    ]
    assert mismatches == []

def test_relevant_places():
    """Prueba los lugares relevantes de numeradores y denominadores."""
    places = relevant_places([6, Fraction(5, 7)])
    assert places == {Place.real(), Place.at(2), Place.at(3), Place.at(5), Place.at(7)}
    with pytest.raises(DomainError):
        relevant_places([0])

@pytest.mark.parametrize(
    "d, place, expected",
    [
        (17, Place.at(2), True),
        (-7, Place.at(2), True),
        (5, Place.at(2), False),
        (2, Place.at(7), True),
        (7, Place.at(7), False),
        (3, Place.at(7), False),
        (-1, Place.real(), False),
        (Fraction(4, 9), Place.real(), True),
    ],
)
def test_is_local_square(d, place, expected):
    """Prueba cuadrados locales en ℚ_v."""
    assert is_local_square(d, place) is expected
