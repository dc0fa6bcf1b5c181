from __future__ import annotations

from collections import Counter
from dataclasses import replace

from erdmc.model import (
    Attribute,
    CardinalityBody,
    CompulsoryBody,
    Diagram,
    ERModel,
    IntBound,
    Interval,
    ObjectSet,
    OtherBody,
    RangeBody,
    Restriction,
    Role,
    UniquenessBody,
    classify_restriction,
    validate_model,
    validation_errors,
)
from erdmc.parser import parse_model


def test_teaching_model_validates_clean(teaching_model):
    assert validate_model(teaching_model) == []


def test_empty_model_validates_clean():
    assert validate_model(ERModel()) == []


def test_dangling_role_target_yields_single_error(teaching_source):
    broken = teaching_source.replace("role Class -> CLASSES", "role Class -> CLASES")
    model = parse_model(broken)
    errors = validation_errors(model)
    assert len(errors) == 1
    assert errors[0].code == "unresolved-set"
    assert "CLASES" in errors[0].message


def test_validate_is_idempotent(teaching_model):
    assert validate_model(teaching_model) == validate_model(teaching_model)


def _restriction(teaching_model, label: str) -> Restriction:
    return next(r for r in teaching_model.restrictions if r.label == label)


def test_classify_uniqueness(teaching_model):
    assert classify_restriction(_restriction(teaching_model, "R28")) == "uniqueness"


def test_classify_informal_rule_as_other(teaching_model):
    assert classify_restriction(_restriction(teaching_model, "R38")) == "other"


def test_classify_cardinality_as_range(teaching_model):
    assert classify_restriction(_restriction(teaching_model, "R01")) == "range"


def test_every_restriction_classifies_into_exactly_one_tag(teaching_model):
    tags = {"inclusion", "range", "compulsory", "uniqueness", "other"}
    for r in teaching_model.restrictions:
        assert classify_restriction(r) in tags


def test_teaching_restriction_census(teaching_model):
    counts = Counter(classify_restriction(r) for r in teaching_model.restrictions)
    assert counts == {"range": 19, "compulsory": 8, "uniqueness": 9, "other": 5}
    cardinalities = sum(
        isinstance(r.body, CardinalityBody) for r in teaching_model.restrictions
    )
    attribute_ranges = sum(
        isinstance(r.body, RangeBody) for r in teaching_model.restrictions
    )
    assert (cardinalities, attribute_ranges) == (8, 11)


def _single_set_model(s: ObjectSet, restrictions=(), extra_sets=()) -> ERModel:
    return ERModel(
        diagrams=(Diagram("d", (s, *extra_sets)),), restrictions=tuple(restrictions)
    )


def test_relationship_without_roles_is_an_error():
    model = _single_set_model(ObjectSet(name="LINK", kind="relationship"))
    assert any(e.code == "relationship-without-roles" for e in validation_errors(model))


def test_single_role_relationship_is_a_warning_not_an_error():
    other = ObjectSet(name="A", kind="entity")
    model = _single_set_model(
        ObjectSet(name="LINK", kind="relationship", roles=(Role("r1", "A"),)),
        extra_sets=(other,),
    )
    issues = validate_model(model)
    assert validation_errors(model) == []
    assert any(i.code == "relationship-single-role" for i in issues)


def test_computed_set_may_not_declare_members():
    model = _single_set_model(ObjectSet(
        name="V", kind="computed", attributes=(Attribute("a"),),
        computed_definition="whatever",
    ))
    assert any(e.code == "computed-set-structure" for e in validation_errors(model))


def test_restrictions_may_not_target_computed_sets():
    model = _single_set_model(
        ObjectSet(name="V", kind="computed", computed_definition="whatever"),
        restrictions=[Restriction("R01", "V", CardinalityBody(10))],
    )
    assert any(e.code == "restriction-on-computed-set" for e in validation_errors(model))


def test_duplicate_range_declaration_is_an_error():
    s = ObjectSet(name="A", kind="entity",
                  attributes=(Attribute("a", Interval(IntBound(1), IntBound(5))),))
    model = _single_set_model(s, restrictions=[
        Restriction("R01", "A", RangeBody("a", Interval(IntBound(1), IntBound(9)))),
    ])
    assert any(e.code == "duplicate-range" for e in validation_errors(model))


def test_interval_with_inverted_static_bounds_is_an_error():
    s = ObjectSet(name="A", kind="entity",
                  attributes=(Attribute("a", Interval(IntBound(9), IntBound(1))),))
    assert any(e.code == "bad-range" for e in validation_errors(_single_set_model(s)))


def test_compulsory_naming_unknown_mapping_is_an_error():
    s = ObjectSet(name="A", kind="entity", attributes=(Attribute("a"),))
    model = _single_set_model(s, restrictions=[
        Restriction("R01", "A", CompulsoryBody(("nope",))),
    ])
    assert any(e.code == "unknown-mapping" for e in validation_errors(model))


def test_identical_uniqueness_twice_is_an_error():
    s = ObjectSet(name="A", kind="entity", attributes=(Attribute("a"), Attribute("b")))
    model = _single_set_model(s, restrictions=[
        Restriction("R01", "A", UniquenessBody(("a", "b"))),
        Restriction("R02", "A", UniquenessBody(("b", "a"))),
    ])
    assert any(e.code == "duplicate-key" for e in validation_errors(model))


def test_reserved_identifier_name_is_rejected():
    s = ObjectSet(name="A", kind="entity", attributes=(Attribute("x"),))
    assert any(e.code == "reserved-identifier" for e in validation_errors(_single_set_model(s)))


def test_tuple_formula_domain_must_match_target(teaching_model):
    r37 = _restriction(teaching_model, "R37")
    mismatched = Restriction("R99", "CLASSES", r37.body)
    model = replace(
        teaching_model, restrictions=teaching_model.restrictions + (mismatched,)
    )
    assert any(e.code == "tuple-domain-mismatch" for e in validation_errors(model))


def test_other_restriction_needs_informal_or_formal():
    s = ObjectSet(name="A", kind="entity")
    model = _single_set_model(s, restrictions=[
        Restriction("R01", "A", OtherBody(None, None)),
    ])
    assert any(e.code == "empty-restriction" for e in validation_errors(model))
