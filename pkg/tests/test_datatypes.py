from __future__ import annotations

import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_registry, rand_value, randoms
from typedgraph.datatypes import (
    AnyType,
    BaseType,
    ConstrainedBase,
    ListType,
    RecordType,
    Tagged,
    TypeRef,
    TypeRegistry,
    UnionType,
    base_conforms,
    value_at,
)
from typedgraph.errors import DanglingReference, DuplicateTypeLabel, ReservedLabel, SchemaFrozen


def test_prebound_labels():
    reg = TypeRegistry()
    for label in ("int", "string", "bool", "decimal", "money", "date", "empty"):
        assert label in reg
    assert reg.check_value("date", {"day": 29, "month": 7, "year": 2012}).ok


@pytest.mark.parametrize("label", ["int", "date", "record", "list", "true"])
def test_reserved_labels_rejected(label):
    with pytest.raises(ReservedLabel):
        TypeRegistry().define_type(label, BaseType("int"))


def test_duplicate_label():
    reg = TypeRegistry().define_type("Rating", ConstrainedBase("int", ">=", 1))
    with pytest.raises(DuplicateTypeLabel):
        reg.define_type("Rating", BaseType("int"))


def test_frozen_registry():
    reg = TypeRegistry()
    reg.freeze()
    with pytest.raises(SchemaFrozen):
        reg.define_type("X", BaseType("int"))


def test_money_and_bool_conformance():
    assert base_conforms("money", Decimal("12.50"))
    assert not base_conforms("money", Decimal("12.505"))
    assert not base_conforms("money", 3)  # ints are widened by coerce, not accepted raw
    assert not base_conforms("int", True)
    assert not base_conforms("bool", 1)
    assert base_conforms("decimal", Decimal("1.125"))


def test_constrained_rating():
    reg = TypeRegistry().define_type("Rating", ConstrainedBase("int", ">=", 1))
    assert reg.check_value("Rating", 5).ok
    bad = reg.check_value("Rating", 0, "r1.rating")
    assert bad.codes() == ["TypeViolation"]
    assert bad.errors[0].subject == "r1.rating"


def test_record_value_paths():
    reg = TypeRegistry()
    reg.define_type("Line", RecordType([("qty", "int"), ("when", "date")]))
    reg.define_type("Lines", ListType("Line", 1, None))
    report = reg.check_value("Lines", [{"qty": 1, "when": {"day": 1, "month": 2, "year": 3}}, {"qty": "x"}], "o")
    subjects = sorted(i.subject for i in report.errors)
    assert "o[1].qty" in subjects
    assert any(s.startswith("o[1]") for s in subjects)
    assert not reg.check_value("Lines", [], "o").ok  # at least one line


def test_union_needs_tag():
    reg = TypeRegistry().define_type("U", UnionType(["int", "string"]))
    assert reg.check_value("U", Tagged("int", 3)).ok
    assert not reg.check_value("U", Tagged("bool", True)).ok
    assert not reg.check_value("U", 3).ok


def test_any_type_warns_but_accepts():
    reg = TypeRegistry().define_type("Blob", AnyType())
    report = reg.validate()
    assert report.ok and report.warnings[0].code == "AnyTypeUsed"
    assert reg.check_value("Blob", {"whatever": [1, 2]}).ok


def test_typeref_to_base_is_canonical():
    reg = TypeRegistry().define_type("Price", TypeRef("money"))
    assert reg["Price"] == BaseType("money")


def test_dangling_reference():
    reg = TypeRegistry().define_type("A", RecordType([("x", "Missing")]))
    assert "DanglingReference" in reg.validate().codes()
    with pytest.raises(DanglingReference):
        reg.is_finite("A")


def test_self_recursive_record_is_not_finite():
    reg = TypeRegistry()
    reg.define_type("Node", RecordType([("next", "Node")]))
    reg.define_type("Chain", RecordType([("next", "ChainOpt")]))
    reg.define_type("ChainOpt", ListType("Chain", 0, 1))
    assert not reg.is_finite("Node")
    assert reg.is_finite("Chain")
    assert "NonFiniteType" in reg.validate().codes()


def test_value_at():
    v = {"a": {"b": 3}}
    assert value_at(v, ("a", "b")) == (True, 3)
    assert value_at(v, ("a", "c"))[0] is False
    assert value_at(v, ()) == (True, v)


def test_coerce_int_to_decimal():
    reg = TypeRegistry().define_type("P", RecordType([("price", "money")]))
    assert reg.coerce("P", {"price": 3}) == {"price": Decimal(3)}


# -- finiteness against a bounded-construction oracle ----------------------------------

LABELS = [f"L{i}" for i in range(6)]


def _rand_cyclic_registry(rng: random.Random) -> TypeRegistry:
    """Types that may refer to any label, including later ones and themselves."""
    reg = TypeRegistry()
    pool = LABELS + ["int", "string"]
    for label in LABELS:
        roll = rng.random()
        if roll < 0.15:
            d = BaseType("int")
        elif roll < 0.5:
            d = RecordType([(f"f{i}", rng.choice(pool)) for i in range(rng.randint(0, 3))])
        elif roll < 0.75:
            lo = rng.choice((0, 0, 1, 2))
            d = ListType(rng.choice(pool), lo, None if rng.random() < 0.5 else max(lo, 1) + 1)
        else:
            d = UnionType(rng.sample(pool, rng.randint(2, 3)))
        reg.define_type(label, d)
    return reg


def constructible(reg: TypeRegistry, label: str, depth: int) -> bool:
    """Can a value of nesting depth at most ``depth`` be built?  Plain recursion, no fixed point."""
    d = reg.get(label)
    if isinstance(d, (BaseType, ConstrainedBase, AnyType)):
        return True
    if depth == 0:
        return False
    if isinstance(d, RecordType):
        return all(constructible(reg, t, depth - 1) for _, t in d.fields)
    if isinstance(d, ListType):
        return d.min_count == 0 or constructible(reg, d.element, depth - 1)
    if isinstance(d, UnionType):
        return any(constructible(reg, a, depth - 1) for a in d.alternatives)
    if isinstance(d, TypeRef):
        return constructible(reg, d.target, depth - 1)
    raise AssertionError(d)


@settings(max_examples=300, deadline=None)
@given(randoms)
def test_finiteness_matches_bounded_construction(rng):
    reg = _rand_cyclic_registry(rng)
    depth = max(8, len(LABELS) + 1)  # a finite value never needs more nesting than there are labels
    for label in LABELS:
        assert reg.is_finite(label) == constructible(reg, label, depth), label


@settings(max_examples=200, deadline=None)
@given(randoms)
def test_generated_values_conform(rng):
    reg = rand_registry(rng)
    for label in reg.labels():
        value = rand_value(rng, reg, label)
        assert reg.check_value(label, value).ok, (label, value)


@given(st.decimals(allow_nan=False, allow_infinity=False, places=2))
def test_two_place_decimals_are_money(d):
    assert base_conforms("money", d)
