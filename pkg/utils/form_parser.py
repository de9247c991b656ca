"""
Gramática de texto de formas, formas de Pfister y clases de cuadrados.

    form   := "<" entry ("," entry)* ">" | "<>"
    entry  := [sign] rational ("*" var)*        ej: <1, -2, 3*t1, -5*t1*t2>
    pfister:= "<<" entry ("," entry)* ">>" | "<<>>"

Las variables se resuelven por nombre contra la torre declarada; nunca se
infieren del texto.
"""

import re
from typing import List, Optional, Tuple

from services.forms import DiagonalForm, PfisterSlots, SquareClass, TowerField
from services.scalars import DomainError, as_rational

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><<|>>|[<>,*+-]))"
)

class FormSyntaxError(DomainError):
    """Excepción para errores de sintaxis en formas y certificados."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (posición {position})")
        self.position = position

class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if not match:
                bad = len(text) - len(text[pos:].lstrip())
                raise FormSyntaxError(f"Carácter inesperado {text[bad]!r}", bad)
            kind = match.lastgroup
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def position(self) -> int:
        token = self.peek()
        return token[2] if token else len(self.text)

    def accept(self, value: str) -> bool:
        token = self.peek()
        if token and token[0] == "op" and token[1] == value:
            self.index += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            raise FormSyntaxError(f"Se esperaba {value!r}", self.position())

    def expect_end(self) -> None:
        if self.peek() is not None:
            raise FormSyntaxError("Texto sobrante", self.position())

    def entry(self, tower: TowerField) -> SquareClass:
        start = self.position()
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        token = self.peek()
        names: List[str] = []
        if token and token[0] == "number":
            self.index += 1
            _, _, denominator = token[1].partition("/")
            if denominator and int(denominator) == 0:
                raise FormSyntaxError("Denominador nulo", token[2])
            value = as_rational(token[1])
        elif token and token[0] == "name":
            value = as_rational(1)
            self.index += 1
            names.append(self._bind(token, tower))
        else:
            raise FormSyntaxError("Se esperaba un racional", self.position())
        while self.accept("*"):
            token = self.peek()
            if not token or token[0] != "name":
                raise FormSyntaxError("Se esperaba una variable", self.position())
            self.index += 1
            names.append(self._bind(token, tower))
        if value == 0:
            raise FormSyntaxError("Entrada nula", start)
        return SquareClass.monomial(sign * value, names, tower)

    @staticmethod
    def _bind(token: Tuple[str, str, int], tower: TowerField) -> str:
        if token[1] not in tower.variables:
            raise FormSyntaxError(f"Variable no declarada: {token[1]}", token[2])
        return token[1]

    def entries(self, tower: TowerField, close: str) -> List[SquareClass]:
        result: List[SquareClass] = []
        if self.accept(close):
            return result
        result.append(self.entry(tower))
        while self.accept(","):
            result.append(self.entry(tower))
        self.expect(close)
        return result

def parse_tower(text: Optional[str]) -> TowerField:
    """
    Declaración de torre "t1,t2,…" (vacía para ℚ).

    Raises:
        DomainError: Si hay nombres repetidos o inválidos
    """
    if not text or not text.strip():
        return TowerField()
    return TowerField(tuple(name.strip() for name in text.split(",")))

def parse_form(text: str, tower: TowerField) -> DiagonalForm:
    """
    Parsea una forma diagonal; las entradas se normalizan a clases de cuadrados.

    Args:
        text (str): Texto de la forma (ej: "<1, -2, 3*t1>")
        tower (TowerField): Torre declarada

    Returns:
        DiagonalForm: Forma normalizada

    Raises:
        FormSyntaxError: Error de sintaxis, variable no declarada o entrada nula
    """
    scanner = _Scanner(text)
    scanner.expect("<")
    entries = scanner.entries(tower, ">")
    scanner.expect_end()
    return DiagonalForm(tower, tuple(entries))

def parse_pfister(text: str, tower: TowerField) -> PfisterSlots:
    """Parsea un literal de Pfister "<<a, b, …>>"."""
    scanner = _Scanner(text)
    scanner.expect("<<")
    slots = scanner.entries(tower, ">>")
    scanner.expect_end()
    return PfisterSlots(tower, tuple(slots))

def parse_square_class(text: str, tower: TowerField) -> SquareClass:
    """Parsea una clase de cuadrados "−5*t1*t2"."""
    scanner = _Scanner(text)
    entry = scanner.entry(tower)
    scanner.expect_end()
    return entry

def format_square_class(c: SquareClass) -> str:
    return str(c.coeff) + "".join(f"*{name}" for name in c.variables())

def format_form(q: DiagonalForm) -> str:
    if not q.entries:
        return "<>"
    return "<" + ", ".join(format_square_class(e) for e in q.entries) + ">"

def format_pfister(p: PfisterSlots) -> str:
    return "<<" + ", ".join(format_square_class(s) for s in p.slots) + ">>"
