import json

import pytest

from services.construct import StarCertificate
from services.forms import (
    QQ,
    DiagonalForm,
    GeneralizedPfisterTerm,
    PfisterSlots,
    SquareClass,
    TowerField,
)

@pytest.fixture
def tower1():
    """Fixture que proporciona la torre ℚ((t1))."""
    return TowerField(("t1",))

@pytest.fixture
def tower2():
    """Fixture que proporciona la torre ℚ((t1))((t2))."""
    return TowerField(("t1", "t2"))

@pytest.fixture
def worked_seed():
    """Fixture con la semilla (n=1, λ=2, ℚ, ⟨1,1⟩, un término 1·⟨⟨1⟩⟩)."""
    one = SquareClass.one(QQ)
    return StarCertificate(
        n=1,
        lam=SquareClass.rational(2),
        tower=QQ,
        phi=DiagonalForm.of([1, 1]),
        terms=(GeneralizedPfisterTerm(one, PfisterSlots(QQ, (one,))),),
        asserted_non_hyp=True,
        provenance="semilla de prueba",
    )

@pytest.fixture
def worked_seed_document():
    """Fixture con el archivo JSON de la semilla de prueba."""
    return {
        "n": 1,
        "lambda": "2",
        "tower": [],
        "phi": "<1, 1>",
        "terms": [{"alpha": "1", "slots": ["1"]}],
        "asserted_non_hyp": True,
        "provenance": "semilla de prueba",
    }

@pytest.fixture
def seed_file(tmp_path, worked_seed_document):
    """Fixture que escribe la semilla de prueba en un archivo temporal."""
    path = tmp_path / "seed.cert"
    path.write_text(json.dumps(worked_seed_document), encoding="utf-8")
    return path
