from __future__ import annotations

import copy

import pytest

from erdmc.parser import parse_model
from erdmc.scheme import (
    EMDMScheme,
    EMDMSet,
    Key,
    Mapping,
    check_scheme,
    is_implicit_key,
    structural_key,
)
from erdmc.translator import translate


@pytest.fixture(scope="module")
def golden_scheme(teaching_model):
    result = translate(teaching_model)
    assert result.scheme is not None
    return result.scheme


def test_structural_key_of_schedules(golden_scheme):
    key = structural_key(golden_scheme.set("SCHEDULES"))
    assert key.mappings == ("Room", "Competence")
    assert key.implicit


def test_structural_key_of_attendances(golden_scheme):
    assert structural_key(golden_scheme.set("ATTENDANCES")).mappings == ("Student", "Class")


def test_structural_key_spans_all_roles():
    s = EMDMSet(name="T", kind="relationship-derived", mappings=[
        Mapping("a", "T", "A", "role"),
        Mapping("b", "T", "B", "role"),
        Mapping("c", "T", "C", "role"),
    ])
    assert structural_key(s).mappings == ("a", "b", "c")


def test_structural_key_requires_roles():
    with pytest.raises(ValueError):
        structural_key(EMDMSet(name="E", kind="entity-derived"))


def test_full_role_key_is_implicit(golden_scheme):
    attendances = golden_scheme.set("ATTENDANCES")
    r35 = next(k for k in attendances.keys if k.label == "R35")
    assert is_implicit_key(r35, attendances)


def test_key_with_attributes_is_not_implicit(golden_scheme):
    schedules = golden_scheme.set("SCHEDULES")
    r33 = next(k for k in schedules.keys if k.label == "R33")
    assert not is_implicit_key(r33, schedules)


def test_proper_subset_of_roles_is_not_implicit(golden_scheme):
    schedules = golden_scheme.set("SCHEDULES")
    assert not is_implicit_key(Key("K", ("Room",)), schedules)


def test_entity_key_is_never_implicit(golden_scheme):
    classes = golden_scheme.set("CLASSES")
    r32 = next(k for k in classes.keys if k.label == "R32")
    assert not is_implicit_key(r32, classes)


def test_check_scheme_accepts_golden(golden_scheme):
    assert check_scheme(golden_scheme) == []


def test_check_scheme_accepts_empty():
    assert check_scheme(EMDMScheme()) == []


def test_check_scheme_flags_missing_codomain_set(golden_scheme):
    mutated = copy.deepcopy(golden_scheme)
    schedules = mutated.set("SCHEDULES")
    schedules.mapping("Room").codomain = "ROOMZ"
    diagnostics = check_scheme(mutated)
    assert any(d.code == "unresolved-codomain" for d in diagnostics)


def test_check_scheme_flags_non_total_role(golden_scheme):
    mutated = copy.deepcopy(golden_scheme)
    mutated.set("SCHEDULES").mapping("Room").total = False
    assert any(d.code == "role-totality" for d in check_scheme(mutated))


def test_check_scheme_flags_singleton_key(golden_scheme):
    mutated = copy.deepcopy(golden_scheme)
    mutated.set("ROOMS").keys.append(Key("R90", ("Room#",)))
    diagnostics = check_scheme(mutated)
    assert any(d.code == "singleton-key" for d in diagnostics)


def test_check_scheme_flags_missing_provenance(golden_scheme):
    mutated = copy.deepcopy(golden_scheme)
    del mutated.provenance["set:STUDENTS"]
    assert any(d.code == "missing-provenance" for d in check_scheme(mutated))


def test_check_scheme_flags_wrong_implicit_flag(golden_scheme):
    mutated = copy.deepcopy(golden_scheme)
    schedules = mutated.set("SCHEDULES")
    next(k for k in schedules.keys if k.label == "R33").implicit = True
    assert any(d.code == "implicit-flag" for d in check_scheme(mutated))


def test_check_scheme_flags_broken_formula(teaching_source):
    broken = teaching_source.replace(
        "(forall x in STUDENTS)(forall y in TEACHERS)(SSN(x) <> SSN(y))",
        "(forall x in STUDENTS)(forall y in TEACHERS)(SSN(x) <> Name(x))",
    )
    # Name(x) vs SSN: value-to-value comparison is fine; break it harder
    broken = broken.replace("SSN(x) <> Name(x)", "Nope(x) <> SSN(y)")
    result = translate(parse_model(broken))
    assert result.scheme is None
    assert any(d.code == "formula-resolution" for d in result.report.diagnostics)


def test_no_two_keys_share_a_mapping_set(golden_scheme):
    for s in golden_scheme.sets:
        seen = set()
        for k in s.keys:
            frozen = frozenset(k.mappings)
            assert frozen not in seen
            seen.add(frozen)
