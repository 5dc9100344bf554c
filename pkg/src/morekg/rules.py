"""Forward-chaining materialization of triple-pattern rules.

Rules are Horn-style: a conjunctive body of triple patterns and a head
of patterns over body variables only.  ``materialize`` computes the
least fixpoint with semi-naive iteration (each round only re-joins
against the previous round's delta).  Heads never invent terms, so the
fixpoint always terminates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import vocab
from .rdf import Graph, IRI, Literal, PrefixMap, RdfError, Term, Triple


class RuleError(Exception):
    pass


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "?%s" % self.name


Pattern = tuple  # (Term | Var, Term | Var, Term | Var)


def pattern_vars(p: Pattern) -> set[str]:
    return {t.name for t in p if isinstance(t, Var)}


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[Pattern, ...]
    head: tuple[Pattern, ...]

    def validate(self) -> None:
        if not self.body:
            raise RuleError("rule %s: empty body" % self.name)
        bound = set()
        for p in self.body:
            bound |= pattern_vars(p)
        for p in self.head:
            unbound = pattern_vars(p) - bound
            if unbound:
                raise RuleError(
                    "rule %s: head variable(s) not bound in body: %s"
                    % (self.name, ", ".join(sorted(unbound)))
                )


@dataclass
class RuleSet:
    rules: list[Rule]

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise RuleError("duplicate rule names")
        for r in self.rules:
            r.validate()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def builtin_shortcut_rule() -> Rule:
    """Item measures the disposition reached via its executed processes."""
    proc, item, datum, vs, disp = (Var(n) for n in ("proc", "item", "datum", "vs", "disp"))
    return Rule(
        name="measures-disposition",
        body=(
            (proc, vocab.PATO_EXECUTES, item),
            (proc, vocab.OBI_HAS_SPECIFIED_OUTPUT, datum),
            (datum, vocab.OBI_HAS_VALUE_SPECIFICATION, vs),
            (vs, vocab.OBI_SPECIFIES_VALUE_OF, disp),
        ),
        head=((item, vocab.MORE_MEASURES_DISPOSITION, disp),),
    )


def builtin_shortcut_rule_via_plan() -> Rule:
    """Same head derived over the plan-mediated chain."""
    plan, proc, item, datum, vs, disp = (
        Var(n) for n in ("plan", "proc", "item", "datum", "vs", "disp")
    )
    return Rule(
        name="measures-disposition-via-plan",
        body=(
            (plan, vocab.BFO_CONCRETIZES, item),
            (proc, vocab.OBI_REALIZES, plan),
            (proc, vocab.OBI_HAS_SPECIFIED_OUTPUT, datum),
            (datum, vocab.OBI_HAS_VALUE_SPECIFICATION, vs),
            (vs, vocab.OBI_SPECIFIES_VALUE_OF, disp),
        ),
        head=((item, vocab.MORE_MEASURES_DISPOSITION, disp),),
    )


def builtin_rules() -> list[Rule]:
    c, d, e, x = Var("c"), Var("d"), Var("e"), Var("x")
    return [
        Rule(
            name="subclass-transitivity",
            body=((c, vocab.RDFS_SUBCLASSOF, d), (d, vocab.RDFS_SUBCLASSOF, e)),
            head=((c, vocab.RDFS_SUBCLASSOF, e),),
        ),
        Rule(
            name="type-propagation",
            body=((x, vocab.RDF_TYPE, c), (c, vocab.RDFS_SUBCLASSOF, d)),
            head=((x, vocab.RDF_TYPE, d),),
        ),
        builtin_shortcut_rule(),
        builtin_shortcut_rule_via_plan(),
    ]


def builtin_ruleset() -> RuleSet:
    return RuleSet(builtin_rules())


# ---------------------------------------------------------------------------
# Evaluation

def _subst(p: Pattern, binding: dict) -> tuple:
    return tuple(binding.get(t.name, None) if isinstance(t, Var) else t for t in p)


def match_pattern(g: Graph, p: Pattern, binding: dict) -> Iterator[dict]:
    """Extend ``binding`` over every triple matching pattern ``p``."""
    s, pr, o = _subst(p, binding)
    for t in g.match(s, pr, o):
        new = binding
        ok = True
        extended = False
        for term, bound in zip(p, t):
            if isinstance(term, Var) and term.name not in new:
                if not extended:
                    new = dict(new)
                    extended = True
                new[term.name] = bound
            elif isinstance(term, Var) and new[term.name] != bound:
                ok = False
                break
        if ok:
            yield new


def _order_body(body: Sequence[Pattern], first: int) -> list[Pattern]:
    """Delta atom first, then greedily the most-bound remaining atom."""
    ordered = [body[first]]
    bound = pattern_vars(body[first])
    remaining = [p for i, p in enumerate(body) if i != first]
    while remaining:
        def unbound_count(p):
            return len(pattern_vars(p) - bound)
        best = min(remaining, key=unbound_count)
        remaining.remove(best)
        ordered.append(best)
        bound |= pattern_vars(best)
    return ordered


def _join(full: Graph, delta: Graph, body: list[Pattern]) -> Iterator[dict]:
    """Join body atoms; atom 0 against the delta, the rest against the
    full graph."""
    def step(i: int, binding: dict) -> Iterator[dict]:
        if i == len(body):
            yield binding
            return
        g = delta if i == 0 else full
        for nb in match_pattern(g, body[i], binding):
            yield from step(i + 1, nb)

    yield from step(0, {})


def _fire(full: Graph, delta: Graph, rule: Rule, out: set[Triple]) -> None:
    for i in range(len(rule.body)):
        body = _order_body(rule.body, i)
        for binding in _join(full, delta, body):
            for hp in rule.head:
                s, p, o = _subst(hp, binding)
                if isinstance(s, Literal) or not isinstance(p, IRI):
                    continue  # unrepresentable instantiation
                t = Triple(s, p, o)
                if t not in full:
                    out.add(t)


def materialize(g: Graph, rs: RuleSet) -> Graph:
    """Least fixpoint of ``g`` under ``rs``; returns a new graph."""
    for r in rs:
        r.validate()
    full = g.copy()
    delta = full  # first round joins against everything
    while len(delta):
        new: set[Triple] = set()
        for rule in rs:
            _fire(full, delta, rule, new)
        delta = Graph()
        for t in new:
            if full.insert(t):
                delta.insert(t)
    return full


def materialize_naive(g: Graph, rs: RuleSet) -> Graph:
    """Repeat-all-rules-until-no-change reference evaluator."""
    full = g.copy()
    changed = True
    while changed:
        changed = False
        for rule in rs:
            additions: set[Triple] = set()
            for binding in _join(full, full, list(rule.body)):
                for hp in rule.head:
                    s, p, o = _subst(hp, binding)
                    if isinstance(s, Literal) or not isinstance(p, IRI):
                        continue
                    additions.add(Triple(s, p, o))
            for t in additions:
                if full.insert(t):
                    changed = True
    return full


# ---------------------------------------------------------------------------
# Rule file syntax:  name: s p o & s p o ... => s p o [& s p o ...] .

_RULE_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+|\#[^\n]*)
    | (?P<arrow>=>)
    | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
    | (?P<iriref><[^<>"\s]*>)
    | (?P<string>"(?:[^"\\]|\\.)*")(?:\^\^(?P<dtiri><[^<>"\s]*>|[A-Za-z][A-Za-z0-9_-]*:[A-Za-z0-9_][A-Za-z0-9_-]*))?
    | (?P<decimal>[+-]?[0-9]+\.[0-9]+)
    | (?P<integer>[+-]?[0-9]+)
    | (?P<pname>[A-Za-z][A-Za-z0-9_-]*:[A-Za-z0-9_][A-Za-z0-9_-]*)
    | (?P<label>[A-Za-z][A-Za-z0-9_-]*)
    | (?P<punct>[:&.])
    """,
    re.X,
)


def _rule_term(kind: str, value: str, dt: Optional[str], pm: PrefixMap):
    from .serdes import unescape_string
    if kind == "var":
        return Var(value[1:])
    if kind == "iriref":
        return IRI(value[1:-1])
    if kind == "pname":
        return pm.expand(value)
    if kind == "label":
        if value == "a":
            return vocab.RDF_TYPE
        raise RuleError("bare word %r is not a term (use a CURIE or <IRI>)" % value)
    if kind == "integer":
        return Literal(value, vocab.XSD_INTEGER.value)
    if kind == "decimal":
        return Literal(value, vocab.XSD_DECIMAL.value)
    if kind == "string":
        lex = unescape_string(value[1:-1])
        if dt:
            dtiri = IRI(dt[1:-1]) if dt.startswith("<") else pm.expand(dt)
            return Literal(lex, dtiri.value)
        return Literal(lex)
    raise RuleError("unexpected token %r" % value)


def parse_rules(text: str, prefixes: Optional[PrefixMap] = None,
                include_builtins: bool = True) -> RuleSet:
    pm = prefixes or PrefixMap.default()
    tokens: list[tuple[str, str, Optional[str], int]] = []
    prev_end = 0
    for m in _RULE_TOKEN_RE.finditer(text):
        if m.start() != prev_end:
            line = text.count("\n", 0, prev_end) + 1
            raise RuleError("line %d: unexpected character %r" % (line, text[prev_end]))
        prev_end = m.end()
        kind = m.lastgroup
        if kind == "dtiri":
            kind = "string"
        if kind != "ws":
            if kind == "string":
                tokens.append((kind, m.group("string"), m.group("dtiri"), m.start()))
            else:
                tokens.append((kind, m.group(0), None, m.start()))
    if prev_end != len(text):
        line = text.count("\n", 0, prev_end) + 1
        raise RuleError("line %d: unexpected character %r" % (line, text[prev_end]))

    rules: list[Rule] = []
    pos = 0

    def lineno(offset):
        return text.count("\n", 0, offset) + 1

    while pos < len(tokens):
        kind, value, _, offset = tokens[pos]
        if kind not in ("label", "pname"):
            raise RuleError("line %d: expected rule name, got %r" % (lineno(offset), value))
        name = value
        pos += 1
        if pos >= len(tokens) or tokens[pos][:2] != ("punct", ":"):
            raise RuleError("line %d: expected ':' after rule name %r" % (lineno(offset), name))
        pos += 1

        def read_patterns(stop_kinds):
            nonlocal pos
            patterns = []
            current: list = []
            while pos < len(tokens):
                k, v, dt, off = tokens[pos]
                if (k, v) in stop_kinds:
                    break
                try:
                    current.append(_rule_term(k, v, dt, pm))
                except RdfError as e:
                    raise RuleError("line %d: %s" % (lineno(off), e)) from None
                pos += 1
                if len(current) == 3:
                    patterns.append(tuple(current))
                    current = []
                    if pos < len(tokens) and tokens[pos][:2] == ("punct", "&"):
                        pos += 1
            if current:
                raise RuleError("line %d: incomplete triple pattern in rule %r"
                                % (lineno(offset), name))
            return tuple(patterns)

        body = read_patterns({("arrow", "=>"), ("punct", ".")})
        if pos >= len(tokens) or tokens[pos][0] != "arrow":
            raise RuleError("line %d: expected '=>' in rule %r" % (lineno(offset), name))
        pos += 1
        head = read_patterns({("punct", ".")})
        if pos >= len(tokens) or tokens[pos][:2] != ("punct", "."):
            raise RuleError("line %d: expected '.' ending rule %r" % (lineno(offset), name))
        pos += 1
        rules.append(Rule(name=name, body=body, head=head))

    if include_builtins:
        have = {r.name for r in rules}
        rules = [r for r in builtin_rules() if r.name not in have] + rules
    return RuleSet(rules)


def export_rules(rs: RuleSet, prefixes: Optional[PrefixMap] = None) -> str:
    """Serialize a rule set back to the line-oriented syntax."""
    pm = prefixes or PrefixMap.default()

    def term(t):
        if isinstance(t, Var):
            return "?%s" % t.name
        if isinstance(t, IRI):
            c = pm.compact(t)
            return c
        if isinstance(t, Literal):
            from .serdes import term_to_nt
            return term_to_nt(t)
        return "_:%s" % t.label

    def patterns(ps):
        return " & ".join(" ".join(term(t) for t in p) for p in ps)

    return "".join(
        "%s: %s => %s .\n" % (r.name, patterns(r.body), patterns(r.head))
        for r in rs
    )
