from fractions import Fraction

import pytest

from conecarve.errors import PreconditionError
from conecarve.linsys import LinearSystem, Row, Variable, make_row


def test_make_row_folds_constants():
    r = make_row([(2, "a"), (3, ({"a": 1, "b": -1}, 4)), (-1, 5)], "<=", 10, "r")
    assert r.coeff_map == {"a": 5, "b": -3}
    assert r.rhs == 10 - 12 + 5


def test_make_row_drops_cancelled_terms():
    r = make_row([(1, "a"), (-1, "a"), (1, "b")], "=", 0, "r")
    assert r.coeff_map == {"b": 1}


def test_row_senses():
    vals = {"a": Fraction(1), "b": Fraction(2)}
    assert make_row([(1, "a"), (1, "b")], "<=", 3, "r").satisfied(vals)
    assert not make_row([(1, "a"), (1, "b")], ">=", 4, "r").satisfied(vals)
    assert make_row([(1, "a"), (1, "b")], "=", 3, "r").satisfied(vals)
    with pytest.raises(PreconditionError):
        Row((), "<", Fraction(0), "r")


def test_variable_validation():
    with pytest.raises(PreconditionError):
        Variable("v", "w")
    with pytest.raises(PreconditionError):
        Variable("")
    with pytest.raises(PreconditionError):
        Variable("v" * 256)


def _toy(prov="Z", coef=2):
    v = [Variable("a"), Variable("b", "xi", Fraction(0))]
    return LinearSystem(v, [make_row([(coef, "a"), (1, "b")], "<=", 4, "r")], prov, "toy")


def test_system_checks():
    with pytest.raises(PreconditionError):
        _toy(coef=Fraction(1, 2))
    _toy("Q", Fraction(1, 2))
    with pytest.raises(PreconditionError):
        LinearSystem([Variable("a"), Variable("a")], [], "Q")
    with pytest.raises(PreconditionError):
        LinearSystem([Variable("a")], [make_row([(1, "zz")], "<=", 0, "r")], "Q")
    with pytest.raises(PreconditionError):
        LinearSystem([], [], "F")


def test_queries():
    s = _toy()
    assert s.shape == (1, 2) and s.nonzeros == 2
    assert s.max_abs_coefficient() == 2
    assert s.original_variables == ["a"]
    assert [v.name for v in s.variables_of_kind("xi")] == ["b"]
    assert s.violated_rows({"a": Fraction(1), "b": Fraction(-1)}) == ["lower:b"]
    assert s.violated_rows({"a": Fraction(3), "b": Fraction(0)}) == ["r"]
    assert s.is_satisfied({"a": Fraction(1), "b": Fraction(1)})


def test_combine_merges_and_weakens():
    q = _toy("Q")
    z = LinearSystem([Variable("a"), Variable("c")], [make_row([(1, "a"), (1, "c")], ">=", 0, "s")], "Z")
    both = LinearSystem.combine([z, q], tag="both", meta={"k": 1})
    assert both.variable_names == ["a", "c", "b"]
    assert both.provenance == "Q" and both.meta == {"k": 1}
    assert [r.name for r in both.rows] == ["s", "r"]
