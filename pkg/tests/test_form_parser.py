import pytest
from hypothesis import given
from hypothesis import strategies as st

from services.forms import QQ, DiagonalForm, SquareClass, TowerField
from services.scalars import DomainError
from utils.form_parser import (
    FormSyntaxError,
    format_form,
    format_pfister,
    format_square_class,
    parse_form,
    parse_pfister,
    parse_square_class,
    parse_tower,
)

TOWER = TowerField(("t1", "t2"))

def test_parse_rational_form():
    """Prueba "<1,-2>" sobre ℚ."""
    assert parse_form("<1,-2>", QQ) == DiagonalForm.of([1, -2])

def test_parse_tower_form():
    """Prueba "<3*t1, -5*t1*t2>" sobre ℚ((t1))((t2))."""
    q = parse_form("<3*t1, -5*t1*t2>", TOWER)
    assert q == DiagonalForm(
        TOWER,
        (SquareClass.monomial(3, ["t1"], TOWER), SquareClass.monomial(-5, ["t1", "t2"], TOWER)),
    )

def test_parse_normalizes_squares():
    """Prueba que "<4>" se normaliza a ⟨1⟩ y "<2/3>" a ⟨6⟩."""
    assert parse_form("<4>", QQ) == DiagonalForm.of([1])
    assert parse_form("<2/3>", QQ) == DiagonalForm.of([6])

def test_parse_empty_and_bare_variable():
    """Prueba la forma vacía y una variable sin coeficiente."""
    assert parse_form("<>", QQ).dim == 0
    assert parse_form("<1, t1>", TOWER) == parse_form("<1, 1*t1>", TOWER)
    assert parse_form("<-t2>", TOWER) == parse_form("<-1*t2>", TOWER)

@pytest.mark.parametrize(
    "text, position",
    [
        ("<1, 0>", 4),
        ("<1, 2", 5),
        ("<1 2>", 3),
        ("1, 2>", 0),
        ("<1, $>", 4),
        ("<1/0>", 1),
    ],
)
def test_syntax_errors(text, position):
    """Prueba errores de sintaxis con su posición."""
    with pytest.raises(FormSyntaxError) as excinfo:
        parse_form(text, QQ)
    assert excinfo.value.position == position
    assert f"posición {position}" in str(excinfo.value)

def test_unbound_variable():
    """Prueba que una variable no declarada se rechaza."""
    with pytest.raises(FormSyntaxError):
        parse_form("<1, 2*t3>", TOWER)
    with pytest.raises(DomainError):
        parse_form("<t1>", QQ)

def test_parse_pfister_and_square_class():
    """Prueba literales de Pfister y clases de cuadrados."""
    p = parse_pfister("<<2, -t1>>", TOWER)
    assert p.fold == 2
    assert p.slots[1] == SquareClass.monomial(-1, ["t1"], TOWER)
    assert parse_pfister("<<>>", QQ).fold == 0
    assert parse_square_class("-12*t2", TOWER) == SquareClass.monomial(-3, ["t2"], TOWER)

def test_parse_tower():
    """Prueba la declaración de torre."""
    assert parse_tower("t1, t2") == TOWER
    assert parse_tower("") == QQ
    with pytest.raises(DomainError):
        parse_tower("t1,t1")

def test_printers():
    """Prueba las representaciones de texto."""
    q = parse_form("<1, -5*t1*t2, 3*t2>", TOWER)
    assert format_form(q) == "<1, -5*t1*t2, 3*t2>"
    assert format_form(DiagonalForm.empty()) == "<>"
    assert format_pfister(parse_pfister("<<1, t1>>", TOWER)) == "<<1, 1*t1>>"
    assert format_square_class(SquareClass.rational(-2)) == "-2"

@st.composite
def tower_entries(draw):
    coeff = draw(st.sampled_from([1, -1, 2, -3, 6, -10, 15]))
    bits = (draw(st.integers(0, 1)), draw(st.integers(0, 1)))
    return SquareClass(coeff, bits, TOWER)

@given(st.lists(tower_entries(), max_size=6))
def test_print_parse_round_trip(entries):
    """Prueba que imprimir y volver a parsear da el mismo valor."""
    q = DiagonalForm(TOWER, tuple(entries))
    assert parse_form(format_form(q), TOWER) == q
