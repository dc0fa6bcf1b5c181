"""Deterministic enrichment rules applied around the core translation.

Rules (i)-(iv) repair the input model before translation: missing
cardinalities, oversized cardinalities, missing attribute ranges, and
computed elements without definitions. Rules (v)-(ix) complete the
translated scheme: role/identifier totality, binary-relationship collapse,
structural keys, a fallback compulsory mapping, and a fallback uniqueness
mapping. Every firing is recorded as a replayable action plus at least one
diagnostic.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping as MappingType

from .diagnostics import INFO, WARNING, Diagnostic
from .formula import quantifier_domains
from .model import (
    COMPUTED,
    AsciiRange,
    Attribute,
    CardinalityBody,
    Diagram,
    ERModel,
    ObjectSet,
    Restriction,
    effective_cardinality,
    effective_range,
    src_attribute,
    src_function,
    src_set,
)
from . import scheme as sch
from .scheme import (
    EMDMScheme,
    EMDMSet,
    ENRICHMENT_PREFIX,
    GENERATED,
    Key,
    Mapping,
    RELATIONSHIP_DERIVED,
    STRUCTURAL_FUNCTION,
    ref_key,
    ref_mapping,
    ref_set,
)

RULE_MISSING_CARDINALITY = "i"
RULE_CARDINALITY_CLAMP = "ii"
RULE_DEFAULT_RANGE = "iii"
RULE_MISSING_DEFINITION = "iv"
RULE_TOTALITY = "v"
RULE_COMPULSORY = "vi"
RULE_STRUCTURAL_KEY = "vii"
RULE_COLLAPSE = "viii"
RULE_UNIQUENESS = "ix"

FALLBACK_COMPULSORY = "Compulsory"
FALLBACK_UNIQUE = "UniqueMapping"


@dataclass(frozen=True)
class Question:
    """An interactive prompt issued while translating or enriching."""

    subject: str  # set name, mapping path, or restriction label
    kind: str  # "computed-definition" | "bijection-direction" | "formalization"
    prompt: str


@dataclass(frozen=True)
class PendingQuestion:
    question: Question
    answer: str | None
    origin: str  # "answers" | "prompt" | "default" | "unanswered"


@dataclass(frozen=True)
class EnrichmentAction:
    """One rule firing; replayable through :func:`apply_actions`."""

    rule: str
    target: str
    description: str
    resulting_labels: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)


Prompter = Callable[[Question], "str | None"]


def resolve_answer(
    subject: str,
    kind: str,
    prompt_text: str,
    answers: MappingType | None,
    prompter: Prompter | None,
    pending: list[PendingQuestion],
) -> str | None:
    """Look up a scripted answer, fall back to an interactive prompt.

    Either way the exchange is mirrored into *pending* so a session can be
    replayed from its report.
    """
    question = Question(subject, kind, prompt_text)
    scripted = None
    if answers:
        scripted = answers.get(subject, {}).get(kind)
    if scripted is not None:
        pending.append(PendingQuestion(question, str(scripted), "answers"))
        return str(scripted)
    if prompter is not None:
        answer = prompter(question)
        if answer:
            pending.append(PendingQuestion(question, answer, "prompt"))
            return answer
    pending.append(PendingQuestion(question, None, "unanswered"))
    return None


@dataclass
class InputDefaultsResult:
    model: ERModel
    diagnostics: list[Diagnostic]
    actions: list[EnrichmentAction]
    pending: list[PendingQuestion]


def apply_input_defaults(
    model: ERModel,
    dbms_max_cardinality: int,
    answers: MappingType | None = None,
    prompter: Prompter | None = None,
) -> InputDefaultsResult:
    """Rules (i)-(iv): repair the model before translation."""
    diagnostics: list[Diagnostic] = []
    actions: list[EnrichmentAction] = []
    pending: list[PendingQuestion] = []

    new_diagrams: list[Diagram] = []
    for d in model.diagrams:
        new_sets: list[ObjectSet] = []
        for s in d.sets:
            s2 = _default_one_set(
                s, model, dbms_max_cardinality, answers, prompter,
                diagnostics, actions, pending,
            )
            if s2 is not None:
                new_sets.append(s2)
        new_diagrams.append(replace(d, sets=tuple(new_sets)))

    new_restrictions: list[Restriction] = []
    for r in model.restrictions:
        if isinstance(r.body, CardinalityBody) and r.body.maximum > dbms_max_cardinality:
            diagnostics.append(Diagnostic(
                WARNING, "cardinality-clamped",
                f"{r.label} exceeds the DBMS maximum {dbms_max_cardinality}; clamped",
                r.label,
            ))
            actions.append(EnrichmentAction(
                RULE_CARDINALITY_CLAMP, r.label,
                f"clamped {r.label} to {dbms_max_cardinality}",
                details={"label": r.label, "maximum": dbms_max_cardinality},
            ))
            new_restrictions.append(replace(
                r, body=CardinalityBody(dbms_max_cardinality, None)
            ))
        else:
            new_restrictions.append(r)

    return InputDefaultsResult(
        replace(model, diagrams=tuple(new_diagrams), restrictions=tuple(new_restrictions)),
        diagnostics, actions, pending,
    )


def _default_one_set(
    s: ObjectSet,
    model: ERModel,
    dbms_max: int,
    answers,
    prompter,
    diagnostics: list[Diagnostic],
    actions: list[EnrichmentAction],
    pending: list[PendingQuestion],
) -> ObjectSet | None:
    if s.kind == COMPUTED:
        definition = s.computed_definition
        if not definition:
            definition = resolve_answer(
                s.name, "computed-definition",
                f"computed set {s.name} has no definition; provide one",
                answers, prompter, pending,
            )
            if not definition:
                diagnostics.append(Diagnostic(
                    WARNING, "computed-dropped",
                    f"computed set {s.name} has no definition and was ignored", s.name,
                ))
                actions.append(EnrichmentAction(
                    RULE_MISSING_DEFINITION, src_set(s.name),
                    f"dropped computed set {s.name}",
                ))
                return None
            diagnostics.append(Diagnostic(
                INFO, "computed-definition-supplied",
                f"definition for computed set {s.name} supplied interactively", s.name,
            ))
            actions.append(EnrichmentAction(
                RULE_MISSING_DEFINITION, src_set(s.name),
                f"filled definition of computed set {s.name}",
                details={"definition": definition},
            ))
            return replace(s, computed_definition=definition)
        return s

    changed = s
    card, _ = effective_cardinality(model, s)
    if card is None:
        diagnostics.append(Diagnostic(
            INFO, "cardinality-defaulted",
            f"{s.name} has no maximum cardinality; using the DBMS maximum {dbms_max}",
            s.name,
        ))
        actions.append(EnrichmentAction(
            RULE_MISSING_CARDINALITY, src_set(s.name),
            f"defaulted cardinality of {s.name} to {dbms_max}",
            details={"maximum": dbms_max},
        ))
        changed = replace(changed, max_cardinality=dbms_max, cardinality_pow10=None)
    elif card > dbms_max and s.max_cardinality is not None and s.max_cardinality > dbms_max:
        diagnostics.append(Diagnostic(
            WARNING, "cardinality-clamped",
            f"{s.name} cardinality exceeds the DBMS maximum {dbms_max}; clamped", s.name,
        ))
        actions.append(EnrichmentAction(
            RULE_CARDINALITY_CLAMP, src_set(s.name),
            f"clamped cardinality of {s.name} to {dbms_max}",
            details={"maximum": dbms_max},
        ))
        changed = replace(changed, max_cardinality=dbms_max, cardinality_pow10=None)

    new_attributes: list[Attribute] = []
    attrs_changed = False
    for a in changed.attributes:
        if a.is_computed and not a.computed_definition.strip():
            definition = resolve_answer(
                f"{s.name}.{a.name}", "computed-definition",
                f"computed attribute {s.name}.{a.name} has no definition; provide one",
                answers, prompter, pending,
            )
            if not definition:
                diagnostics.append(Diagnostic(
                    WARNING, "computed-dropped",
                    f"computed attribute {s.name}.{a.name} has no definition and was ignored",
                    f"{s.name}.{a.name}",
                ))
                actions.append(EnrichmentAction(
                    RULE_MISSING_DEFINITION, src_attribute(s.name, a.name),
                    f"dropped computed attribute {s.name}.{a.name}",
                ))
                attrs_changed = True
                continue
            diagnostics.append(Diagnostic(
                INFO, "computed-definition-supplied",
                f"definition for {s.name}.{a.name} supplied interactively",
                f"{s.name}.{a.name}",
            ))
            actions.append(EnrichmentAction(
                RULE_MISSING_DEFINITION, src_attribute(s.name, a.name),
                f"filled definition of computed attribute {s.name}.{a.name}",
                details={"definition": definition},
            ))
            new_attributes.append(replace(a, computed_definition=definition))
            attrs_changed = True
            continue
        if not a.is_computed:
            rng, _ = effective_range(model, s, a)
            if rng is None:
                diagnostics.append(Diagnostic(
                    INFO, "range-defaulted",
                    f"{s.name}.{a.name} has no range; assuming ASCII(255)",
                    f"{s.name}.{a.name}",
                ))
                actions.append(EnrichmentAction(
                    RULE_DEFAULT_RANGE, src_attribute(s.name, a.name),
                    f"defaulted range of {s.name}.{a.name} to ASCII(255)",
                    details={"length": 255},
                ))
                new_attributes.append(replace(a, range=AsciiRange(255)))
                attrs_changed = True
                continue
        new_attributes.append(a)
    if attrs_changed:
        changed = replace(changed, attributes=tuple(new_attributes))

    new_functions = []
    fns_changed = False
    for f in changed.structural_functions:
        if f.is_computed and not f.computed_definition.strip():
            definition = resolve_answer(
                f"{s.name}.{f.name}", "computed-definition",
                f"computed function {s.name}.{f.name} has no definition; provide one",
                answers, prompter, pending,
            )
            if not definition:
                diagnostics.append(Diagnostic(
                    WARNING, "computed-dropped",
                    f"computed function {s.name}.{f.name} has no definition and was ignored",
                    f"{s.name}.{f.name}",
                ))
                actions.append(EnrichmentAction(
                    RULE_MISSING_DEFINITION, src_function(s.name, f.name),
                    f"dropped computed function {s.name}.{f.name}",
                ))
                fns_changed = True
                continue
            diagnostics.append(Diagnostic(
                INFO, "computed-definition-supplied",
                f"definition for {s.name}.{f.name} supplied interactively",
                f"{s.name}.{f.name}",
            ))
            actions.append(EnrichmentAction(
                RULE_MISSING_DEFINITION, src_function(s.name, f.name),
                f"filled definition of computed function {s.name}.{f.name}",
                details={"definition": definition},
            ))
            new_functions.append(replace(f, computed_definition=definition))
            fns_changed = True
            continue
        new_functions.append(f)
    if fns_changed:
        changed = replace(changed, structural_functions=tuple(new_functions))
    return changed


# --- scheme-side rules (v)-(ix) ---


def ensure_totality(scheme: EMDMScheme) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic]]:
    """Rule (v): every role and object identifier is total."""
    out = copy.deepcopy(scheme)
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    for s in out.sets:
        candidates = list(s.mappings)
        if s.object_identifier is not None:
            candidates.append(s.object_identifier)
        for m in candidates:
            if m.flavor in (sch.ROLE, sch.OBJECT_IDENTIFIER) and not m.total:
                m.total = True
                element = f"{s.name}.{m.name}"
                actions.append(EnrichmentAction(
                    RULE_TOTALITY, ref_mapping(s.name, m.name),
                    f"made {element} total",
                    details={"set": s.name, "mapping": m.name},
                ))
                diagnostics.append(Diagnostic(
                    INFO, "totality-added", f"added totality to {element}", element,
                ))
                out.provenance[ref_mapping(s.name, m.name, "total")] = (
                    ENRICHMENT_PREFIX + RULE_TOTALITY
                )
    return out, actions, diagnostics


def _labels_in_use(scheme: EMDMScheme) -> set[int]:
    """Numeric values of every Rnn label visible anywhere in the scheme."""
    values: set[int] = set()

    def note(label: str | None) -> None:
        if not label:
            return
        m = re.fullmatch(r"R0*(\d+)", label)
        if m:
            values.add(int(m.group(1)))

    for s in scheme.sets:
        for k in s.keys:
            note(k.label)
        for m in s.mappings:
            for lbl in m.source_labels.values():
                note(lbl)
    for c in scheme.constraints:
        note(getattr(c, "label", None))
    for source in scheme.provenance.values():
        m = re.match(r"restriction:(R0*\d+)", source)
        if m:
            note(m.group(1))
    return values


def next_label(scheme: EMDMScheme) -> str:
    """Continue numbering from the largest Rnn label in use."""
    used = _labels_in_use(scheme)
    return f"R{(max(used) + 1 if used else 1):02d}"


def ensure_structural_key(
    scheme: EMDMScheme,
) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic]]:
    """Rule (vii): every relationship-derived set gets a roles-only key.

    A set already holding a roles-only key or a one-to-one role is left
    alone. Single-role sets receive the degenerate form: a uniqueness flag
    on their only role.
    """
    out = copy.deepcopy(scheme)
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    for s in out.sets:
        if s.kind != RELATIONSHIP_DERIVED:
            continue
        roles = s.role_mappings()
        if not roles:
            continue
        role_names = {m.name for m in roles}
        has_structural = any(set(k.mappings) <= role_names for k in s.keys) or any(
            m.one_to_one for m in roles
        )
        if has_structural:
            continue
        if len(roles) == 1:
            roles[0].one_to_one = True
            element = f"{s.name}.{roles[0].name}"
            actions.append(EnrichmentAction(
                RULE_STRUCTURAL_KEY, ref_mapping(s.name, roles[0].name),
                f"made single role {element} one-to-one (degenerate structural key)",
                details={"set": s.name, "mapping": roles[0].name},
            ))
            diagnostics.append(Diagnostic(
                INFO, "structural-key-added",
                f"single role {element} made one-to-one in place of a structural key; "
                "review against the business rules",
                element,
            ))
            out.provenance[ref_mapping(s.name, roles[0].name, "unique")] = (
                ENRICHMENT_PREFIX + RULE_STRUCTURAL_KEY
            )
            continue
        label = next_label(out)
        key = Key(label=label, mappings=tuple(m.name for m in roles), implicit=True)
        s.keys.append(key)
        bullet = " • ".join(key.mappings)
        actions.append(EnrichmentAction(
            RULE_STRUCTURAL_KEY, ref_set(s.name),
            f"{label}: {bullet}",
            resulting_labels=(label,),
            details={"set": s.name, "label": label, "mappings": list(key.mappings)},
        ))
        diagnostics.append(Diagnostic(
            INFO, "structural-key-added",
            f"added structural key {label} ({bullet}) to {s.name}; "
            "review whether it matches a real business rule",
            s.name,
        ))
        out.provenance[ref_key(s.name, label)] = ENRICHMENT_PREFIX + RULE_STRUCTURAL_KEY
    return out, actions, diagnostics


def ensure_compulsory(
    scheme: EMDMScheme,
) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic]]:
    """Rule (vi): fundamental sets without a total mapping gain one."""
    out = copy.deepcopy(scheme)
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    for s in out.sets:
        if s.kind == sch.COMPUTED:
            continue
        if any(m.total for m in s.mappings):
            continue
        name, clash = _free_name(s, FALLBACK_COMPULSORY)
        element = f"{s.name}.{name}"
        if clash:
            diagnostics.append(Diagnostic(
                WARNING, "name-clash",
                f"{s.name} already has a mapping named {FALLBACK_COMPULSORY}; using {name}",
                element,
            ))
        s.mappings.append(Mapping(
            name=name, source=s.name, codomain=AsciiRange(255),
            flavor=GENERATED, total=True,
        ))
        actions.append(EnrichmentAction(
            RULE_COMPULSORY, ref_set(s.name),
            f"added total mapping {element} into ASCII(255)",
            details={"set": s.name, "mapping": name},
        ))
        diagnostics.append(Diagnostic(
            INFO, "compulsory-added",
            f"{s.name} has no compulsory mapping; added {name}", element,
        ))
        out.provenance[ref_mapping(s.name, name)] = ENRICHMENT_PREFIX + RULE_COMPULSORY
    return out, actions, diagnostics


def ensure_uniqueness(
    scheme: EMDMScheme,
) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic]]:
    """Rule (ix): fundamental sets without any uniqueness gain a unique mapping."""
    out = copy.deepcopy(scheme)
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    for s in out.sets:
        if s.kind == sch.COMPUTED:
            continue
        if any(m.one_to_one for m in s.mappings) or s.keys:
            continue
        name, clash = _free_name(s, FALLBACK_UNIQUE)
        element = f"{s.name}.{name}"
        if clash:
            diagnostics.append(Diagnostic(
                WARNING, "name-clash",
                f"{s.name} already has a mapping named {FALLBACK_UNIQUE}; using {name}",
                element,
            ))
        s.mappings.append(Mapping(
            name=name, source=s.name, codomain=AsciiRange(255),
            flavor=GENERATED, total=True, one_to_one=True,
        ))
        actions.append(EnrichmentAction(
            RULE_UNIQUENESS, ref_set(s.name),
            f"added one-to-one total mapping {element} into ASCII(255)",
            details={"set": s.name, "mapping": name},
        ))
        diagnostics.append(Diagnostic(
            INFO, "uniqueness-added",
            f"{s.name} has no uniqueness; added {name}", element,
        ))
        out.provenance[ref_mapping(s.name, name)] = ENRICHMENT_PREFIX + RULE_UNIQUENESS
    return out, actions, diagnostics


def _free_name(s: EMDMSet, wanted: str) -> tuple[str, bool]:
    if s.mapping(wanted) is None:
        return wanted, False
    n = 1
    while s.mapping(f"{wanted}{n}") is not None:
        n += 1
    return f"{wanted}{n}", True


def collapse_binary_relationships(
    scheme: EMDMScheme,
    answers: MappingType | None = None,
    prompter: Prompter | None = None,
) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic], list[PendingQuestion]]:
    """Rule (viii): a binary relationship with a unique role becomes a function.

    ``R = (f -> S, g -> T)`` with ``f`` unique collapses into the mapping
    ``R : S -> T`` placed on ``S``; both roles unique yields a one-to-one
    mapping in the user-chosen direction. Relationships carrying attributes,
    or referenced by other mappings or constraints, are skipped with a
    warning because the replacement text covers only roles.
    """
    out = copy.deepcopy(scheme)
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    pending: list[PendingQuestion] = []

    for s in list(out.sets):
        if s.kind != RELATIONSHIP_DERIVED:
            continue
        roles = s.role_mappings()
        if len(roles) != 2:
            continue
        first, second = roles
        if not (first.one_to_one or second.one_to_one):
            continue
        if len(s.mappings) != 2:  # anything beyond the two roles blocks the collapse
            diagnostics.append(Diagnostic(
                WARNING, "collapse-skipped",
                f"{s.name} has a unique role but carries attributes; left as a relationship",
                s.name,
            ))
            continue
        if _is_referenced(out, s.name):
            diagnostics.append(Diagnostic(
                WARNING, "collapse-skipped",
                f"{s.name} has a unique role but is referenced elsewhere; left as a relationship",
                s.name,
            ))
            continue

        if first.one_to_one and second.one_to_one:
            default = f"{first.codomain}->{second.codomain}"
            reverse = f"{second.codomain}->{first.codomain}"
            answer = resolve_answer(
                s.name, "bijection-direction",
                f"{s.name} is one-to-one both ways; choose {default} or {reverse}",
                answers, prompter, pending,
            )
            if answer == reverse and default != reverse:
                source_role, target_role = second, first
            else:
                if answer not in (default, reverse) or answer is None:
                    diagnostics.append(Diagnostic(
                        WARNING, "collapse-default-direction",
                        f"no usable direction for {s.name}; defaulting to {default}", s.name,
                    ))
                source_role, target_role = first, second
            one_to_one = True
        elif first.one_to_one:
            source_role, target_role = first, second
            one_to_one = False
        else:
            source_role, target_role = second, first
            one_to_one = False

        home = out.set(source_role.codomain)
        if home is None or home.kind == sch.COMPUTED:
            diagnostics.append(Diagnostic(
                WARNING, "collapse-skipped",
                f"{s.name} cannot collapse onto {source_role.codomain}", s.name,
            ))
            continue
        name, clash = _free_name(home, s.name)
        if clash:
            diagnostics.append(Diagnostic(
                WARNING, "name-clash",
                f"{home.name} already has a mapping named {s.name}; using {name}",
                f"{home.name}.{name}",
            ))
        _do_collapse(out, s, home, name, source_role, target_role, one_to_one)
        actions.append(EnrichmentAction(
            RULE_COLLAPSE, ref_set(s.name),
            f"replaced {s.name} by the structural function "
            f"{name} : {home.name} {'<->' if one_to_one else '->'} {target_role.codomain}",
            details={
                "relationship": s.name,
                "home": home.name,
                "mapping": name,
                "target": str(target_role.codomain),
                "source_role": source_role.name,
                "one_to_one": one_to_one,
            },
        ))
        diagnostics.append(Diagnostic(
            INFO, "relationship-collapsed",
            f"binary relationship {s.name} replaced by a structural function on {home.name}",
            s.name,
        ))
    return out, actions, diagnostics, pending


def _is_referenced(scheme: EMDMScheme, name: str) -> bool:
    for s in scheme.sets:
        if s.name == name:
            continue
        for m in s.mappings:
            if m.codomain == name:
                return True
    for c in scheme.constraints:
        if isinstance(c, sch.InclusionConstraint) and name in (c.subset, c.superset):
            return True
        if isinstance(c, sch.TupleConstraint):
            if c.set_name == name or name in quantifier_domains(c.formula):
                return True
        if isinstance(c, sch.NonrelationalConstraint) and c.formula is not None:
            if name in quantifier_domains(c.formula):
                return True
    return False


def _do_collapse(
    out: EMDMScheme,
    rel: EMDMSet,
    home: EMDMSet,
    name: str,
    source_role: Mapping,
    target_role: Mapping,
    one_to_one: bool,
) -> None:
    mapping = Mapping(
        name=name,
        source=home.name,
        codomain=target_role.codomain,
        flavor=STRUCTURAL_FUNCTION,
        total=source_role.total,
        one_to_one=one_to_one,
    )
    home.mappings.append(mapping)
    out.sets.remove(rel)

    # Every displaced provenance entry survives under the new mapping so
    # completeness over the input elements still holds.
    new_base = ref_mapping(home.name, name)
    displaced_prefixes = (
        ref_set(rel.name),
        f"mapping:{rel.name}.",
        f"key:{rel.name}.",
    )
    moved: dict[str, str] = {}
    for ref, source in list(out.provenance.items()):
        if ref == displaced_prefixes[0] or ref.startswith(displaced_prefixes[1:]):
            moved[ref] = source
            del out.provenance[ref]
    set_source = moved.pop(ref_set(rel.name), f"set:{rel.name}")
    out.provenance[new_base] = set_source
    for old_ref, source in moved.items():
        out.provenance[f"{new_base}#absorbed:{old_ref}"] = source


def enrich_scheme(
    scheme: EMDMScheme,
    answers: MappingType | None = None,
    prompter: Prompter | None = None,
) -> tuple[EMDMScheme, list[EnrichmentAction], list[Diagnostic], list[PendingQuestion]]:
    """Run rules (v), (viii), (vii), (vi), (ix) in that order.

    Collapse runs before structural keys so vanishing relationships never
    receive one; the fallback compulsory and uniqueness rules run last so
    collapse products count toward their conditions.
    """
    actions: list[EnrichmentAction] = []
    diagnostics: list[Diagnostic] = []
    pending: list[PendingQuestion] = []

    out, a, d = ensure_totality(scheme)
    actions += a
    diagnostics += d
    out, a, d, p = collapse_binary_relationships(out, answers, prompter)
    actions += a
    diagnostics += d
    pending += p
    out, a, d = ensure_structural_key(out)
    actions += a
    diagnostics += d
    out, a, d = ensure_compulsory(out)
    actions += a
    diagnostics += d
    out, a, d = ensure_uniqueness(out)
    actions += a
    diagnostics += d
    return out, actions, diagnostics, pending


def apply_actions(scheme: EMDMScheme, actions: list[EnrichmentAction]) -> EMDMScheme:
    """Replay recorded scheme-side actions onto a pre-enrichment scheme."""
    out = copy.deepcopy(scheme)
    for action in actions:
        d = action.details
        if action.rule == RULE_TOTALITY:
            target = out.set(d["set"])
            mapping = target.mapping(d["mapping"]) if target else None
            if mapping is not None:
                mapping.total = True
                out.provenance[ref_mapping(d["set"], d["mapping"], "total")] = (
                    ENRICHMENT_PREFIX + RULE_TOTALITY
                )
        elif action.rule == RULE_STRUCTURAL_KEY:
            if "label" in d:
                target = out.set(d["set"])
                if target is not None:
                    target.keys.append(Key(d["label"], tuple(d["mappings"]), implicit=True))
                    out.provenance[ref_key(d["set"], d["label"])] = (
                        ENRICHMENT_PREFIX + RULE_STRUCTURAL_KEY
                    )
            else:
                target = out.set(d["set"])
                mapping = target.mapping(d["mapping"]) if target else None
                if mapping is not None:
                    mapping.one_to_one = True
                    out.provenance[ref_mapping(d["set"], d["mapping"], "unique")] = (
                        ENRICHMENT_PREFIX + RULE_STRUCTURAL_KEY
                    )
        elif action.rule == RULE_COMPULSORY:
            target = out.set(d["set"])
            if target is not None:
                target.mappings.append(Mapping(
                    name=d["mapping"], source=d["set"], codomain=AsciiRange(255),
                    flavor=GENERATED, total=True,
                ))
                out.provenance[ref_mapping(d["set"], d["mapping"])] = (
                    ENRICHMENT_PREFIX + RULE_COMPULSORY
                )
        elif action.rule == RULE_UNIQUENESS:
            target = out.set(d["set"])
            if target is not None:
                target.mappings.append(Mapping(
                    name=d["mapping"], source=d["set"], codomain=AsciiRange(255),
                    flavor=GENERATED, total=True, one_to_one=True,
                ))
                out.provenance[ref_mapping(d["set"], d["mapping"])] = (
                    ENRICHMENT_PREFIX + RULE_UNIQUENESS
                )
        elif action.rule == RULE_COLLAPSE:
            rel = out.set(d["relationship"])
            home = out.set(d["home"])
            if rel is None or home is None:
                continue
            source_role = rel.mapping(d["source_role"])
            target_role = next(
                m for m in rel.role_mappings() if m.name != d["source_role"]
            )
            _do_collapse(out, rel, home, d["mapping"], source_role, target_role, d["one_to_one"])
    return out
