"""(Elementary) Mathematical Data Model scheme types and their soundness check.

A scheme is an ordered list of sets carrying mappings, keys, and
constraints, plus a provenance map tying every scheme element back to the
model element it came from (or to the enrichment rule that generated it).

Construction is single-writer (the translator); after translation a scheme
is treated as immutable and is safe to share read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import ERROR, Diagnostic
from .formula import (
    And,
    Apply,
    Compare,
    Forall,
    Formula,
    Implies,
    IntLit,
    Not,
    Or,
    Term,
    TextLit,
    Var,
    quantifier_count,
)
from .model import NatRange, Range

ENTITY_DERIVED = "entity-derived"
RELATIONSHIP_DERIVED = "relationship-derived"
COMPUTED = "computed"

ATTRIBUTE = "attribute"
ROLE = "role"
STRUCTURAL_FUNCTION = "structural-function"
OBJECT_IDENTIFIER = "object-identifier"
GENERATED = "enrichment-generated"

# Provenance values carrying this prefix mark elements added by an
# enrichment rule rather than translated from a model element.
ENRICHMENT_PREFIX = "enrichment:"


@dataclass
class Mapping:
    """A function from a scheme set into a value range or another set."""

    name: str
    source: str
    codomain: Range | str | None
    flavor: str
    total: bool = False
    one_to_one: bool = False
    computed_definition: str | None = None
    # Labels of the restrictions that induced a flag or codomain, keyed by
    # facet name ("total", "unique", "codomain").
    source_labels: dict[str, str] = field(default_factory=dict)


@dataclass
class Key:
    """A minimal-uniqueness constraint over two or more mappings."""

    label: str
    mappings: tuple[str, ...]
    implicit: bool = False


@dataclass
class EMDMSet:
    name: str
    kind: str
    object_identifier: Mapping | None = None
    mappings: list[Mapping] = field(default_factory=list)
    keys: list[Key] = field(default_factory=list)
    role_signature: tuple[tuple[str, str], ...] = ()
    computed_definition: str | None = None

    def mapping(self, name: str) -> Mapping | None:
        if self.object_identifier is not None and self.object_identifier.name == name:
            return self.object_identifier
        for m in self.mappings:
            if m.name == name:
                return m
        return None

    def role_mappings(self) -> list[Mapping]:
        return [m for m in self.mappings if m.flavor == ROLE]

    def attribute_mappings(self) -> list[Mapping]:
        return [m for m in self.mappings if m.flavor == ATTRIBUTE]


@dataclass
class InclusionConstraint:
    subset: str
    superset: str
    label: str | None = None


@dataclass
class TupleConstraint:
    """A single-variable check constraint living inside its set's block."""

    label: str
    set_name: str
    formula: Formula


@dataclass
class NonrelationalConstraint:
    """A multi-variable business rule, possibly not yet formalized."""

    label: str
    formula: Formula | None = None
    informal: str | None = None


Constraint = InclusionConstraint | TupleConstraint | NonrelationalConstraint


@dataclass
class EMDMScheme:
    sets: list[EMDMSet] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    provenance: dict[str, str] = field(default_factory=dict)

    def set(self, name: str) -> EMDMSet | None:
        for s in self.sets:
            if s.name == name:
                return s
        return None


# --- scheme element references ---


def ref_set(name: str) -> str:
    return f"set:{name}"


def ref_mapping(set_name: str, mapping: str, facet: str | None = None) -> str:
    base = f"mapping:{set_name}.{mapping}"
    return f"{base}#{facet}" if facet else base


def ref_key(set_name: str, label: str) -> str:
    return f"key:{set_name}.{label}"


def ref_constraint(c: Constraint) -> str:
    if isinstance(c, InclusionConstraint):
        if c.label:
            return f"constraint:{c.label}"
        return f"constraint:inclusion:{c.subset}<={c.superset}"
    return f"constraint:{c.label}"


def base_refs(scheme: EMDMScheme) -> list[str]:
    """References of every scheme element that needs a provenance entry."""
    refs: list[str] = []
    for s in scheme.sets:
        refs.append(ref_set(s.name))
        if s.object_identifier is not None:
            refs.append(ref_mapping(s.name, s.object_identifier.name))
        refs.extend(ref_mapping(s.name, m.name) for m in s.mappings)
        refs.extend(ref_key(s.name, k.label) for k in s.keys)
    refs.extend(ref_constraint(c) for c in scheme.constraints)
    return refs


# --- structural keys ---


def structural_key(s: EMDMSet) -> Key:
    """The key made of all of a relationship-derived set's roles.

    Raises ValueError when the set has no roles; a single-role set yields a
    degenerate one-mapping key that callers carry as a uniqueness flag
    instead of a key.
    """
    roles = s.role_mappings()
    if not roles:
        raise ValueError(f"{s.name} has no roles to build a structural key from")
    return Key(label="", mappings=tuple(m.name for m in roles), implicit=True)


def is_implicit_key(k: Key, s: EMDMSet) -> bool:
    """True iff *k* spans exactly the full role set of a relationship-derived set.

    Such keys are implied by the relationship's header notation and are not
    rendered in the text output.
    """
    if s.kind != RELATIONSHIP_DERIVED:
        return False
    role_names = {m.name for m in s.role_mappings()}
    return bool(role_names) and set(k.mappings) == role_names


# --- formula resolution against a scheme ---

_VALUE = "(value)"


def resolve_formula(scheme: EMDMScheme, f: Formula) -> list[str]:
    """Problems found while resolving a formula's mappings against *scheme*.

    Every applied name must be a mapping on the set its argument ranges
    over; comparisons must not mix two different object sets or a set with
    a plain value.
    """
    problems: list[str] = []
    _resolve_node(scheme, f, {}, problems)
    return problems


def _resolve_node(scheme: EMDMScheme, node: Formula, env: dict[str, str], problems: list[str]) -> None:
    if isinstance(node, Forall):
        if scheme.set(node.domain) is None:
            problems.append(f"quantifier domain {node.domain!r} is not a scheme set")
            return
        _resolve_node(scheme, node.body, {**env, node.variable: node.domain}, problems)
    elif isinstance(node, (And, Or, Implies)):
        _resolve_node(scheme, node.left, env, problems)
        _resolve_node(scheme, node.right, env, problems)
    elif isinstance(node, Not):
        _resolve_node(scheme, node.body, env, problems)
    elif isinstance(node, Compare):
        lhs = _term_type(scheme, node.lhs, env, problems)
        rhs = _term_type(scheme, node.rhs, env, problems)
        if lhs is None or rhs is None:
            return
        if lhs != rhs and _VALUE not in (lhs, rhs):
            problems.append(f"comparison mixes {lhs} with {rhs}")
        elif _VALUE in (lhs, rhs) and lhs != rhs:
            problems.append("comparison mixes an object set with a plain value")


def _term_type(
    scheme: EMDMScheme, term: Term, env: dict[str, str], problems: list[str]
) -> str | None:
    if isinstance(term, (IntLit, TextLit)):
        return _VALUE
    if isinstance(term, Var):
        set_name = env.get(term.name)
        if set_name is None:
            problems.append(f"variable {term.name!r} is not quantified")
        return set_name
    if isinstance(term, Apply):
        arg_type = _term_type(scheme, term.argument, env, problems)
        if arg_type is None:
            return None
        if arg_type == _VALUE:
            problems.append(f"{term.mapping!r} applied to a plain value")
            return None
        owner = scheme.set(arg_type)
        mapping = owner.mapping(term.mapping) if owner else None
        if mapping is None:
            problems.append(f"{term.mapping!r} is not a mapping on {arg_type}")
            return None
        if isinstance(mapping.codomain, str):
            return mapping.codomain
        return _VALUE
    raise TypeError(f"not a term: {term!r}")


# --- the soundness gate ---


def check_scheme(scheme: EMDMScheme) -> list[Diagnostic]:
    """Verify every scheme invariant; an empty result certifies soundness."""
    diagnostics: list[Diagnostic] = []

    def bad(code: str, element: str, message: str) -> None:
        diagnostics.append(Diagnostic(ERROR, code, message, element))

    seen_sets: set[str] = set()
    seen_labels: set[str] = set()
    for s in scheme.sets:
        if s.name in seen_sets:
            bad("duplicate-set", s.name, f"scheme set {s.name} appears twice")
        seen_sets.add(s.name)

    for s in scheme.sets:
        if s.kind == COMPUTED:
            if not s.computed_definition:
                bad("missing-definition", s.name, f"computed set {s.name} has no definition")
            if s.object_identifier is not None or s.mappings or s.keys:
                bad("computed-set-structure", s.name,
                    f"computed set {s.name} must carry only its definition")
            continue
        ident = s.object_identifier
        if ident is None:
            bad("missing-identifier", s.name, f"{s.name} has no object identifier")
        else:
            if not (ident.one_to_one and ident.total):
                bad("identifier-flags", s.name,
                    f"object identifier of {s.name} must be one-to-one and total")
            if not isinstance(ident.codomain, NatRange) or ident.codomain.digits < 1:
                bad("identifier-codomain", s.name,
                    f"object identifier of {s.name} must map onto NAT(n), n >= 1")
        seen_mappings: set[str] = set()
        names = [ident.name] if ident else []
        names += [m.name for m in s.mappings]
        for name in names:
            if name in seen_mappings:
                bad("duplicate-mapping", f"{s.name}.{name}",
                    f"mapping {name} appears twice on {s.name}")
            seen_mappings.add(name)
        for m in s.mappings:
            element = f"{s.name}.{m.name}"
            if m.flavor == ROLE:
                if not isinstance(m.codomain, str):
                    bad("role-codomain", element, "roles must map into an object set")
                if not m.total:
                    bad("role-totality", element, f"role {m.name} is not total")
            if m.flavor == OBJECT_IDENTIFIER:
                bad("stray-identifier", element,
                    "object identifiers live outside the mapping list")
            if isinstance(m.codomain, str) and scheme.set(m.codomain) is None:
                bad("unresolved-codomain", element,
                    f"mapping {m.name} targets unknown set {m.codomain!r}")
            if m.codomain is None and m.computed_definition is None:
                bad("missing-codomain", element,
                    f"mapping {m.name} has neither a codomain nor a definition")
        role_sig = tuple((m.name, m.codomain) for m in s.role_mappings())
        if s.kind == RELATIONSHIP_DERIVED:
            if s.role_signature != role_sig:
                bad("role-signature", s.name,
                    f"role signature of {s.name} does not match its role mappings")
        elif s.role_mappings():
            bad("roles-on-entity", s.name, f"{s.kind} set {s.name} carries role mappings")

        seen_key_sets: set[frozenset[str]] = set()
        for k in s.keys:
            element = f"{s.name}.{k.label}"
            if len(k.mappings) < 2:
                bad("singleton-key", element,
                    "single-mapping uniqueness is a mapping flag, not a key")
            for name in k.mappings:
                if s.mapping(name) is None:
                    bad("unresolved-key-mapping", element,
                        f"key {k.label} names unknown mapping {name!r}")
            mapping_set = frozenset(k.mappings)
            if mapping_set in seen_key_sets:
                bad("duplicate-key", element, f"two keys of {s.name} span the same mappings")
            seen_key_sets.add(mapping_set)
            if k.implicit != is_implicit_key(k, s):
                bad("implicit-flag", element,
                    f"key {k.label} implicit flag disagrees with the full-role-set rule")
            if not k.label:
                bad("unlabeled-key", element, "keys must carry a label")
            elif k.label in seen_labels:
                bad("duplicate-label", element, f"label {k.label} reused")
            seen_labels.add(k.label)

    for c in scheme.constraints:
        element = ref_constraint(c)
        if isinstance(c, InclusionConstraint):
            for endpoint in (c.subset, c.superset):
                if scheme.set(endpoint) is None:
                    bad("unresolved-inclusion", element,
                        f"inclusion endpoint {endpoint!r} is not a scheme set")
        elif isinstance(c, TupleConstraint):
            if scheme.set(c.set_name) is None:
                bad("unresolved-set", element, f"tuple constraint set {c.set_name!r} missing")
            if quantifier_count(c.formula) != 1:
                bad("tuple-arity", element,
                    f"tuple constraint {c.label} must quantify exactly one variable")
            for problem in resolve_formula(scheme, c.formula):
                bad("formula-resolution", element, problem)
        elif isinstance(c, NonrelationalConstraint):
            if c.formula is None:
                if not c.informal:
                    bad("empty-constraint", element,
                        f"constraint {c.label} has neither formula nor informal text")
            else:
                if quantifier_count(c.formula) < 2:
                    bad("nonrelational-arity", element,
                        f"nonrelational constraint {c.label} must quantify at least two variables")
                for problem in resolve_formula(scheme, c.formula):
                    bad("formula-resolution", element, problem)
        label = getattr(c, "label", None)
        if label:
            if label in seen_labels:
                bad("duplicate-label", element, f"label {label} reused")
            seen_labels.add(label)

    for ref in base_refs(scheme):
        if ref not in scheme.provenance:
            bad("missing-provenance", ref, f"{ref} has no provenance entry")
    return diagnostics
