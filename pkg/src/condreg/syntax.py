"""Domain, problem and plan text formats.

Domain and problem files are s-expressions; ``;`` starts a line comment::

    (domain <name>
      (fluents <tok>+)
      (action <tok> :pre (<lit>*) :add (<tok>*) :del (<tok>*))*
      (sense  <tok> :pre (<lit>*) :sense (<tok>+))* )
    (problem <name> :domain <name> :init (<lit>*) :goal (<lit>+))

where ``<lit>`` is ``<tok>`` or ``(not <tok>)``. Plans use::

    plan  := "[]" | step (";" step)*
    step  := <non-sensing action> | <sensing action> ";" "case" "{" (guard "->" plan)+ "}"
    guard := lit ("&" lit)*

In plan text ``;`` is the sequencing operator, so plan files have no comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .model import (
    EMPTY,
    Act,
    Case,
    Domain,
    Literals,
    NonSensing,
    Plan,
    Problem,
    Sensing,
    Seq,
    Vocabulary,
    bits,
    seq,
    steps,
)

RESERVED = {"not", "case", "domain", "problem", "fluents", "action", "sense"}


class ParseError(ValueError):
    """Malformed text, with a 1-based source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class DomainError(ValueError):
    """Well-formed text that violates a model invariant."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+|\n)
  | (?P<punct>->|\[\]|[(){}&;])
  | (?P<keyword>:[A-Za-z]+)
  | (?P<tok>[A-Za-z0-9_](?:[A-Za-z0-9_.'+]|-(?!>))*)
    """,
    re.VERBOSE,
)


def tokenize(text: str, comments: bool = True) -> List[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        col = pos - line_start + 1
        if comments and ch == ";":
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        if kind == "ws":
            if m.group() == "\n":
                line += 1
                line_start = m.end()
        else:
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, tokens: List[Token], text: str):
        self.tokens = tokens
        self.i = 0
        lines = text.split("\n")
        self.end_line = len(lines)
        self.end_col = len(lines[-1]) + 1

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok if tok is not None else self.peek()
        if tok is None:
            return ParseError(message + " (at end of input)", self.end_line, self.end_col)
        return ParseError(f"{message}, got {tok.text!r}", tok.line, tok.col)

    def next(self, text: Optional[str] = None, kind: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            raise self.error(f"expected {want}")
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def done(self) -> bool:
        return self.i >= len(self.tokens)


# --- s-expression forms ------------------------------------------------------


def _name(cur: _Cursor) -> Token:
    return cur.next(kind="tok")


def _token_list(cur: _Cursor) -> List[Token]:
    cur.next("(")
    out = []
    while not cur.at(")"):
        out.append(_name(cur))
    cur.next(")")
    return out


def _literal_list(cur: _Cursor) -> List[tuple]:
    """``(<lit>*)`` as ``(token, positive)`` pairs."""
    cur.next("(")
    out = []
    while not cur.at(")"):
        if cur.at("("):
            cur.next("(")
            cur.next("not")
            out.append((_name(cur), False))
            cur.next(")")
        else:
            out.append((_name(cur), True))
    cur.next(")")
    return out


def _resolve(vocab: Vocabulary, tok: Token, where: str) -> int:
    if tok.text not in vocab:
        raise DomainError(f"{where}: undeclared fluent {tok.text!r} (line {tok.line})")
    return 1 << vocab.index(tok.text)


def _literals(vocab: Vocabulary, lits, where: str) -> Literals:
    pos = neg = 0
    for tok, positive in lits:
        bit = _resolve(vocab, tok, where)
        if positive:
            pos |= bit
        else:
            neg |= bit
    if pos & neg:
        clash = ", ".join(vocab.names_of(pos & neg))
        raise DomainError(f"{where}: fluent asserted both true and false: {clash}")
    return Literals(pos, neg)


def _fluents(vocab: Vocabulary, toks, where: str) -> int:
    m = 0
    for tok in toks:
        m |= _resolve(vocab, tok, where)
    return m


def parse_domain(text: str) -> Domain:
    cur = _Cursor(tokenize(text), text)
    cur.next("(")
    cur.next("domain")
    name = _name(cur).text
    cur.next("(")
    cur.next("fluents")
    fluent_toks = []
    while not cur.at(")"):
        fluent_toks.append(_name(cur))
    cur.next(")")
    if not fluent_toks:
        raise DomainError(f"domain {name}: empty fluent list")
    seen = set()
    for tok in fluent_toks:
        if tok.text in RESERVED:
            raise DomainError(f"domain {name}: reserved word {tok.text!r} used as a fluent")
        if tok.text in seen:
            raise DomainError(f"domain {name}: duplicate fluent {tok.text!r}")
        seen.add(tok.text)
    vocab = Vocabulary(t.text for t in fluent_toks)

    actions = []
    names = set()
    while not cur.at(")"):
        cur.next("(")
        head = cur.peek()
        if head is None or head.text not in ("action", "sense"):
            raise cur.error("expected 'action' or 'sense'")
        cur.next()
        atok = _name(cur)
        aname = atok.text
        if aname in RESERVED:
            raise DomainError(f"reserved word {aname!r} used as an action name")
        if aname in names or aname in vocab:
            raise DomainError(f"action {aname!r}: name already declared")
        names.add(aname)
        where = f"action {aname}"
        cur.next(":pre")
        pre = _literals(vocab, _literal_list(cur), where)
        if head.text == "action":
            cur.next(":add")
            add = _fluents(vocab, _token_list(cur), where)
            cur.next(":del")
            dele = _fluents(vocab, _token_list(cur), where)
            if add & dele:
                clash = ", ".join(vocab.names_of(add & dele))
                raise DomainError(f"{where}: fluents both added and deleted: {clash}")
            actions.append(NonSensing(aname, pre, add, dele))
        else:
            cur.next(":sense")
            sense_toks = _token_list(cur)
            if not sense_toks:
                raise DomainError(f"{where}: empty sense list")
            sense = _fluents(vocab, sense_toks, where)
            if sense & pre.fluents:
                clash = ", ".join(vocab.names_of(sense & pre.fluents))
                raise DomainError(f"{where}: sensed fluents appear in the precondition: {clash}")
            actions.append(Sensing(aname, pre, sense))
        cur.next(")")
    cur.next(")")
    if not cur.done():
        raise cur.error("trailing input after domain")
    return Domain(name, vocab, actions)


def parse_problem(text: str, domain: Domain) -> Problem:
    cur = _Cursor(tokenize(text), text)
    cur.next("(")
    cur.next("problem")
    name = _name(cur).text
    cur.next(":domain")
    dtok = _name(cur)
    if dtok.text != domain.name:
        raise DomainError(f"problem {name}: written for domain {dtok.text!r}, not {domain.name!r}")
    cur.next(":init")
    init = _literals(domain.vocab, _literal_list(cur), f"problem {name} init")
    cur.next(":goal")
    goal_lits = _literal_list(cur)
    if not goal_lits:
        raise DomainError(f"problem {name}: empty goal")
    goal = _literals(domain.vocab, goal_lits, f"problem {name} goal")
    cur.next(")")
    if not cur.done():
        raise cur.error("trailing input after problem")
    return Problem(name, domain, init, goal)


# --- plans -------------------------------------------------------------------


def parse_plan(text: str, domain: Domain) -> Plan:
    cur = _Cursor(tokenize(text, comments=False), text)
    plan = _plan(cur, domain)
    if not cur.done():
        raise cur.error("trailing input after plan")
    return plan


def _plan(cur: _Cursor, domain: Domain) -> Plan:
    if cur.at("[]"):
        cur.next()
        return EMPTY
    items = [_step(cur, domain)]
    while cur.at(";"):
        cur.next()
        items.append(_step(cur, domain))
    out = items[-1]
    for node in reversed(items[:-1]):
        out = Seq(node, out)
    return out


def _step(cur: _Cursor, domain: Domain) -> Plan:
    tok = cur.next(kind="tok")
    try:
        action = domain.action(tok.text)
    except KeyError:
        raise ParseError(f"unknown action {tok.text!r}", tok.line, tok.col) from None
    if not action.is_sensing:
        return Act(action)
    cur.next(";")
    cur.next("case")
    cur.next("{")
    branches = []
    while not cur.at("}"):
        gtok = cur.peek()
        guard = _guard(cur, domain)
        for other, _ in branches:
            if not guard.excludes(other):
                raise ParseError("case guards are not mutually exclusive", gtok.line, gtok.col)
        cur.next("->")
        branches.append((guard, _plan(cur, domain)))
    if not branches:
        raise cur.error("case needs at least one branch")
    cur.next("}")
    return Case(action, branches)


def _guard(cur: _Cursor, domain: Domain) -> Literals:
    vocab = domain.vocab
    pos = neg = 0
    first = cur.peek()
    while True:
        if cur.at("("):
            cur.next("(")
            cur.next("not")
            tok = cur.next(kind="tok")
            positive = False
            cur.next(")")
        else:
            tok = cur.next(kind="tok")
            positive = True
        if tok.text not in vocab:
            raise ParseError(f"undeclared fluent {tok.text!r} in guard", tok.line, tok.col)
        bit = 1 << vocab.index(tok.text)
        if positive:
            pos |= bit
        else:
            neg |= bit
        if not cur.at("&"):
            break
        cur.next("&")
    if pos & neg:
        raise ParseError("inconsistent guard", first.line, first.col)
    return Literals(pos, neg)


def render_guard(guard: Literals, vocab: Vocabulary) -> str:
    return vocab.format_literals(guard, " & ")


def render_plan(plan: Plan, vocab: Vocabulary, indent: str = "  ", _depth: int = 0) -> str:
    """Text form of ``plan``; nested sequences are flattened."""
    items = steps(plan)
    if not items:
        return "[]"
    parts = []
    pad = indent * (_depth + 1)
    for node in items:
        if isinstance(node, Act):
            parts.append(node.action.name)
            continue
        lines = [f"{node.sensor.name}; case {{"]
        for guard, branch in node.branches:
            body = render_plan(branch, vocab, indent, _depth + 1)
            lines.append(f"{pad}{render_guard(guard, vocab)} -> {body}")
        lines.append(indent * _depth + "}")
        parts.append("\n".join(lines))
    return "; ".join(parts)


def render_domain(domain: Domain) -> str:
    vocab = domain.vocab

    def lits(l: Literals) -> str:
        return "(" + vocab.format_literals(l, " ") + ")"

    def toks(mask: int) -> str:
        return "(" + " ".join(vocab.names_of(mask)) + ")"

    lines = [f"(domain {domain.name}", f"  (fluents {' '.join(vocab.names)})"]
    for a in domain.actions:
        if a.is_sensing:
            lines.append(f"  (sense {a.name} :pre {lits(a.pre)} :sense {toks(a.sense)})")
        else:
            lines.append(f"  (action {a.name} :pre {lits(a.pre)} :add {toks(a.add)} :del {toks(a.delete)})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def render_problem(problem: Problem) -> str:
    vocab = problem.vocab

    def lits(l: Literals) -> str:
        return "(" + vocab.format_literals(l, " ") + ")"

    return (f"(problem {problem.name} :domain {problem.domain.name}\n"
            f"  :init {lits(problem.init)}\n  :goal {lits(problem.goal)})\n")


# --- JSON --------------------------------------------------------------------


def _guard_json(guard: Literals, vocab: Vocabulary) -> list:
    return [{"fluent": vocab.names[i], "value": bool(guard.pos >> i & 1)}
            for i in bits(guard.fluents)]


def plan_to_json(plan: Plan, vocab: Vocabulary) -> dict:
    items = steps(plan)
    if not items:
        return {"type": "empty"}
    nodes = []
    for node in items:
        if isinstance(node, Act):
            nodes.append({"type": "action", "name": node.action.name})
        else:
            nodes.append({
                "type": "case",
                "sensor": node.sensor.name,
                "branches": [{"guard": _guard_json(g, vocab), "plan": plan_to_json(p, vocab)}
                             for g, p in node.branches],
            })
    return nodes[0] if len(nodes) == 1 else {"type": "seq", "steps": nodes}


def plan_from_json(data: dict, domain: Domain) -> Plan:
    kind = data.get("type")
    if kind == "empty":
        return EMPTY
    if kind == "action":
        return Act(domain.action(data["name"]))
    if kind == "seq":
        return seq(*(plan_from_json(d, domain) for d in data["steps"]))
    if kind == "case":
        vocab = domain.vocab
        branches = []
        for br in data["branches"]:
            pos = neg = 0
            for lit in br["guard"]:
                bit = 1 << vocab.index(lit["fluent"])
                if lit["value"]:
                    pos |= bit
                else:
                    neg |= bit
            branches.append((Literals(pos, neg), plan_from_json(br["plan"], domain)))
        return Case(domain.action(data["sensor"]), branches)
    raise ValueError(f"unknown plan node type {kind!r}")
