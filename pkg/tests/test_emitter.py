from __future__ import annotations

import json

import pytest

from erdmc.emitter import (
    EmitError,
    StructuredFormatError,
    emit_structured,
    emit_text,
    load_structured,
    load_structured_with_warnings,
)
from erdmc.generator import random_model
from erdmc.scheme import EMDMScheme
from erdmc.translator import translate


@pytest.fixture(scope="module")
def golden(teaching_model):
    result = translate(teaching_model)
    assert result.scheme is not None
    return result


def test_golden_text_matches_fixture(golden, golden_scheme_text):
    assert emit_text(golden.scheme) == golden_scheme_text


def test_students_block_lines(golden):
    text = emit_text(golden.scheme)
    block = text.split("\n\n")[0].splitlines()
    assert block == [
        "STUDENTS",
        "  x <-> NAT(5), total",
        "  SSN <-> [1000101000000, 8991231999999], total",
        "  Name -> ASCII(255), total",
    ]


def test_schedules_block_has_keys_and_tuple_but_not_generated_key(golden):
    text = emit_text(golden.scheme)
    assert "R33: Room . Weekday . StartH key" in text
    assert "R34: Room . Weekday . EndH key" in text
    assert "R37: (forall x in SCHEDULES)(StartH(x) < EndH(x))" in text
    assert "R42" not in text
    assert "R35" not in text  # implicit keys stay out of the text form
    assert "R36" not in text


def test_empty_scheme_renders_empty():
    assert emit_text(EMDMScheme()) == ""


def test_unicode_rendering(golden):
    text = emit_text(golden.scheme, unicode=True)
    assert "x ↔ NAT(5), total" in text
    assert "Room → ROOMS" in text
    assert "R33: Room • Weekday • StartH key" in text
    assert "∀" in text and "≠" in text


def test_emit_refuses_unsound_scheme(golden):
    import copy

    broken = copy.deepcopy(golden.scheme)
    broken.set("SCHEDULES").mapping("Room").codomain = "ROOMZ"
    with pytest.raises(EmitError):
        emit_text(broken)


def test_inclusion_renders_under_header():
    from erdmc.parser import parse_model

    source = (
        "diagram D {\n"
        "  entity EMPLOYEES card 10^4 { attr Name }\n"
        "  entity TEACHERS subset_of EMPLOYEES card 10^3 { attr Name }\n"
        "}\n"
        "restriction R01 on EMPLOYEES compulsory Name\n"
        "restriction R02 on EMPLOYEES unique Name\n"
        "restriction R03 on TEACHERS compulsory Name\n"
        "restriction R04 on TEACHERS unique Name\n"
    )
    result = translate(parse_model(source))
    text = emit_text(result.scheme)
    lines = text.splitlines()
    header = lines.index("TEACHERS")
    assert lines[header + 1] == "  TEACHERS subset_of EMPLOYEES"


# --- structured round-trip ---


def test_structured_round_trip_golden(golden):
    loaded = load_structured(emit_structured(golden.scheme))
    assert loaded == golden.scheme


def test_structured_round_trip_empty():
    assert load_structured(emit_structured(EMDMScheme())) == EMDMScheme()


def test_structured_keeps_generated_key(golden):
    doc = json.loads(emit_structured(golden.scheme))
    schedules = next(s for s in doc["sets"] if s["name"] == "SCHEDULES")
    r42 = next(k for k in schedules["keys"] if k["label"] == "R42")
    assert r42["implicit"] is True
    assert r42["mappings"] == ["Room", "Competence"]
    assert doc["provenance"]["key:SCHEDULES.R42"] == "enrichment:vii"


def test_structured_includes_report_when_given(golden):
    doc = json.loads(emit_structured(golden.scheme, golden.report))
    assert doc["report"]["tallies"]["total"] == 57
    inventory = {e["label"]: e["origin"] for e in doc["report"]["implicit_keys"]}
    assert inventory["R42"] == "generated"
    assert inventory["R35"] == "declared-absorbed"


def test_unknown_version_is_rejected_naming_the_field(golden):
    doc = json.loads(emit_structured(golden.scheme))
    doc["version"] = 99
    with pytest.raises(StructuredFormatError) as info:
        load_structured(json.dumps(doc))
    assert "version" in str(info.value)


def test_unknown_top_level_field_warns(golden):
    doc = json.loads(emit_structured(golden.scheme))
    doc["extras"] = {"note": "future"}
    scheme, warnings = load_structured_with_warnings(json.dumps(doc))
    assert scheme == golden.scheme
    assert any("extras" in w for w in warnings)


def test_malformed_json_reports_position():
    with pytest.raises(StructuredFormatError) as info:
        load_structured("{ not json")
    assert "line" in str(info.value)


def test_structured_round_trip_fuzzed_schemes():
    for seed in range(30):
        result = translate(random_model(seed))
        assert result.scheme is not None, seed
        assert load_structured(emit_structured(result.scheme)) == result.scheme
