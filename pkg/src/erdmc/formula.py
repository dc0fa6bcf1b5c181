"""Universally quantified comparison formulas used to formalize business rules.

Surface syntax (ASCII, glyph synonyms accepted)::

    (forall x, y in SCHEDULES)(Weekday(x) = Weekday(y) => StartH(x) <> StartH(y))

Multi-variable quantifier sugar desugars into nested single-variable
quantifiers over the same domain. Comparisons bind tightest, then ``!``,
``&``, ``|``, and right-associative ``=>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .diagnostics import ParseError, ParseFailure
from .lexer import EOF, INT, NAME, OP, STRING, TokenStream, tokenize

# --- terms ---


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Apply:
    mapping: str
    argument: "Term"


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class TextLit:
    value: str


Term = Union[Var, Apply, IntLit, TextLit]

# --- formulas ---


@dataclass(frozen=True)
class Compare:
    op: str  # one of = <> < <= > >=
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    variable: str
    domain: str
    body: "Formula"


Formula = Union[Compare, Not, And, Or, Implies, Forall]

COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")


def parse_formula(source: str) -> Formula:
    """Parse *source* into a Formula AST.

    Raises ParseFailure for syntax errors, unbound variables, and
    duplicate quantified variable names.
    """
    stream = TokenStream(tokenize(source))
    node = parse_formula_tokens(stream, bound=frozenset())
    if not stream.at(EOF):
        raise stream.error(f"trailing input after formula: {stream.peek().value!r}")
    return node


def parse_formula_tokens(stream: TokenStream, bound: frozenset[str]) -> Formula:
    """Parse one formula from *stream*; used standalone and by the DSL parser."""
    if stream.at(OP, "(") and stream.peek(1).kind == NAME and stream.peek(1).value == "forall":
        return _parse_quantified(stream, bound)
    return _parse_implies(stream, bound)


def _parse_quantified(stream: TokenStream, bound: frozenset[str]) -> Formula:
    stream.expect(OP, "(")
    stream.expect(NAME, "forall")
    variables = [stream.expect(NAME, label="variable name").value]
    while stream.at(OP, ","):
        stream.advance()
        variables.append(stream.expect(NAME, label="variable name").value)
    stream.expect(NAME, "in", label="'in'")
    domain = stream.expect(NAME, label="set name").value
    stream.expect(OP, ")")
    for v in variables:
        if v in bound:
            raise stream.error(f"variable {v!r} is already quantified")
    if len(set(variables)) != len(variables):
        raise stream.error("duplicate variable in quantifier")
    inner_bound = bound.union(variables)
    if stream.at(OP, "(") and stream.peek(1).kind == NAME and stream.peek(1).value == "forall":
        body: Formula = _parse_quantified(stream, inner_bound)
    else:
        stream.expect(OP, "(")
        body = _parse_implies(stream, inner_bound)
        stream.expect(OP, ")")
    for v in reversed(variables):
        body = Forall(v, domain, body)
    return body


def _parse_implies(stream: TokenStream, bound: frozenset[str]) -> Formula:
    left = _parse_or(stream, bound)
    if stream.at(OP, "=>"):
        stream.advance()
        return Implies(left, _parse_implies(stream, bound))
    return left


def _parse_or(stream: TokenStream, bound: frozenset[str]) -> Formula:
    node = _parse_and(stream, bound)
    while stream.at(OP, "|"):
        stream.advance()
        node = Or(node, _parse_and(stream, bound))
    return node


def _parse_and(stream: TokenStream, bound: frozenset[str]) -> Formula:
    node = _parse_unary(stream, bound)
    while stream.at(OP, "&"):
        stream.advance()
        node = And(node, _parse_unary(stream, bound))
    return node


def _parse_unary(stream: TokenStream, bound: frozenset[str]) -> Formula:
    if stream.at(OP, "!"):
        stream.advance()
        return Not(_parse_unary(stream, bound))
    if stream.at(OP, "("):
        if stream.peek(1).kind == NAME and stream.peek(1).value == "forall":
            return _parse_quantified(stream, bound)
        stream.advance()
        node = _parse_implies(stream, bound)
        stream.expect(OP, ")")
        return node
    return _parse_comparison(stream, bound)


def _parse_comparison(stream: TokenStream, bound: frozenset[str]) -> Formula:
    lhs = _parse_term(stream, bound)
    tok = stream.peek()
    if tok.kind != OP or tok.value not in COMPARE_OPS:
        raise stream.error(f"found {tok.value!r}", expected="comparison operator")
    stream.advance()
    rhs = _parse_term(stream, bound)
    return Compare(tok.value, lhs, rhs)


def _parse_term(stream: TokenStream, bound: frozenset[str]) -> Term:
    tok = stream.peek()
    if tok.kind == INT:
        stream.advance()
        return IntLit(int(tok.value))
    if tok.kind == OP and tok.value == "-":
        stream.advance()
        value = stream.expect(INT, label="integer")
        return IntLit(-int(value.value))
    if tok.kind == STRING:
        stream.advance()
        return TextLit(tok.value)
    if tok.kind == NAME:
        stream.advance()
        if stream.at(OP, "("):
            stream.advance()
            arg = _parse_term(stream, bound)
            stream.expect(OP, ")")
            return Apply(tok.value, arg)
        if tok.value not in bound:
            raise ParseFailure(
                [ParseError(tok.line, tok.column, f"unbound variable {tok.value!r}")]
            )
        return Var(tok.value)
    raise stream.error(f"found {tok.value!r}", expected="term")


# --- queries ---


def free_variables(node: Formula | Term) -> frozenset[str]:
    """Variables not bound by an enclosing quantifier; empty on accepted formulas."""
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Apply):
        return free_variables(node.argument)
    if isinstance(node, (IntLit, TextLit)):
        return frozenset()
    if isinstance(node, Compare):
        return free_variables(node.lhs) | free_variables(node.rhs)
    if isinstance(node, Not):
        return free_variables(node.body)
    if isinstance(node, (And, Or, Implies)):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Forall):
        return free_variables(node.body) - {node.variable}
    raise TypeError(f"not a formula node: {node!r}")


def quantifier_count(node: Formula) -> int:
    """Number of quantified variables; drives tuple vs nonrelational routing."""
    if isinstance(node, Forall):
        return 1 + quantifier_count(node.body)
    if isinstance(node, (And, Or, Implies)):
        return quantifier_count(node.left) + quantifier_count(node.right)
    if isinstance(node, Not):
        return quantifier_count(node.body)
    return 0


def quantifier_domains(node: Formula) -> list[str]:
    """Domains of all quantifiers, outermost first."""
    if isinstance(node, Forall):
        return [node.domain] + quantifier_domains(node.body)
    if isinstance(node, (And, Or, Implies)):
        return quantifier_domains(node.left) + quantifier_domains(node.right)
    if isinstance(node, Not):
        return quantifier_domains(node.body)
    return []


# --- printing ---

_ASCII_OPS = {"=>": "=>", "&": "&", "|": "|", "!": "!", "forall": "forall", "in": "in"}
_UNICODE_OPS = {
    "=>": "⇒", "&": "∧", "|": "∨", "!": "¬",
    "forall": "∀", "in": "∈",
}
_UNICODE_CMP = {"<>": "≠", "<=": "≤", ">=": "≥"}

_LEVEL_IMPLIES = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_UNARY = 4
_LEVEL_ATOM = 5


def format_formula(node: Formula, unicode: bool = False) -> str:
    """Render *node* so that re-parsing yields a structurally identical AST.

    Runs of directly nested quantifiers over the same domain are re-sugared
    into the multi-variable form, e.g. ``(forall x, y in SCHEDULES)``.
    """
    return _fmt(node, 0, _UNICODE_OPS if unicode else _ASCII_OPS, unicode)


def _fmt(node: Formula, level: int, ops: dict[str, str], unicode: bool) -> str:
    if isinstance(node, Forall):
        groups = []
        current_vars = [node.variable]
        current_domain = node.domain
        body = node.body
        while isinstance(body, Forall):
            if body.domain == current_domain:
                current_vars.append(body.variable)
            else:
                groups.append((current_vars, current_domain))
                current_vars = [body.variable]
                current_domain = body.domain
            body = body.body
        groups.append((current_vars, current_domain))
        binder = ops["forall"] if unicode else ops["forall"] + " "
        prefix = "".join(
            f"({binder}{', '.join(vs)} {ops['in']} {dom})" for vs, dom in groups
        )
        return f"{prefix}({_fmt(body, 0, ops, unicode)})"
    if isinstance(node, Implies):
        text = (
            f"{_fmt(node.left, _LEVEL_OR, ops, unicode)} {ops['=>']} "
            f"{_fmt(node.right, _LEVEL_IMPLIES, ops, unicode)}"
        )
        return f"({text})" if level > _LEVEL_IMPLIES else text
    if isinstance(node, Or):
        text = (
            f"{_fmt(node.left, _LEVEL_OR, ops, unicode)} {ops['|']} "
            f"{_fmt(node.right, _LEVEL_AND, ops, unicode)}"
        )
        return f"({text})" if level > _LEVEL_OR else text
    if isinstance(node, And):
        text = (
            f"{_fmt(node.left, _LEVEL_AND, ops, unicode)} {ops['&']} "
            f"{_fmt(node.right, _LEVEL_UNARY, ops, unicode)}"
        )
        return f"({text})" if level > _LEVEL_AND else text
    if isinstance(node, Not):
        return f"{ops['!']}{_fmt(node.body, _LEVEL_ATOM, ops, unicode)}"
    if isinstance(node, Compare):
        op = _UNICODE_CMP.get(node.op, node.op) if unicode else node.op
        return f"{format_term(node.lhs)} {op} {format_term(node.rhs)}"
    raise TypeError(f"not a formula node: {node!r}")


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Apply):
        return f"{term.mapping}({format_term(term.argument)})"
    if isinstance(term, IntLit):
        return str(term.value)
    if isinstance(term, TextLit):
        escaped = term.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"not a term: {term!r}")
