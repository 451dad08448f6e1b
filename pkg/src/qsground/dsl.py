"""Parser, validator and pretty-printer for ``.qsr`` rule files.

A rule file is a list of ``fluent`` and ``interaction`` declarations::

    % a person reaches for an object
    interaction reach_for(P, O) during D :-
        person(P),
        approaching(body_part(hand, P), O) holds-in I1,
        touches(body_part(hand, P), O) holds-in I2,
        meets(I1, I2), starts(I1, D), ends(I2, D).

Parsing never raises: problems come back as :class:`Diagnostic` records.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Union

from .vocabulary import ALLEN_OPS, BUILTIN_ARITY


# --- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BodyPartTerm:
    part: str
    person: Union[Var, Const]

    def __str__(self) -> str:
        return f"body_part({self.part}, {self.person})"


Term = Union[Var, Const, BodyPartTerm]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.pred}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Guard:
    cls: str
    term: Term

    def __str__(self) -> str:
        return f"{self.cls}({self.term})"


@dataclass(frozen=True)
class HoldsIn:
    atom: Atom
    ivar: str

    def __str__(self) -> str:
        return f"{self.atom} holds-in {self.ivar}"


@dataclass(frozen=True)
class AllenLit:
    op: str
    a: str
    b: str

    def __str__(self) -> str:
        return f"{self.op}({self.a}, {self.b})"


Literal = Union[Guard, HoldsIn, AllenLit]


@dataclass(frozen=True)
class Decl:
    kind: str  # "interaction" or "fluent"
    name: str
    params: tuple
    ivar: str | None
    body: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def arity(self) -> int:
        return len(self.params)

    def holds_literals(self):
        return [(k, lit) for k, lit in enumerate(self.body) if isinstance(lit, HoldsIn)]

    def __str__(self) -> str:
        head = f"{self.kind} {self.name}({', '.join(self.params)})"
        if self.kind == "interaction":
            head += f" during {self.ivar}"
        body = ",\n".join("    " + str(lit) for lit in self.body)
        return f"{head} :-\n{body}."


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: int
    message: str
    snippet: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}\n    {self.snippet}"


@dataclass
class ParseResult:
    declarations: list
    diagnostics: list

    @property
    def ok(self) -> bool:
        return not self.diagnostics


@dataclass
class RuleSource:
    path: str | None
    text: str
    declarations: list
    diagnostics: list


# --- lexer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<kw>holds-in\b|holds-at\b|occurs-in\b|occurs-at\b)
  | (?P<imp>:-)
  | (?P<num>-?\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # var, name, kw, imp, num, punct, eof
    text: str
    pos: int


class DslError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(message)
        self.message = message
        self.pos = pos


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


def _locate(text: str, pos: int) -> tuple[int, int, str]:
    """1-based (line, column, line text) of a character; clamps to the input."""
    if not text:
        return 1, 1, ""
    pos = min(max(pos, 0), len(text) - 1)
    line = text.count("\n", 0, pos) + 1
    start = text.rfind("\n", 0, pos) + 1
    end = text.find("\n", pos)
    snippet = text[start:] if end < 0 else text[start:end]
    return line, pos - start + 1, snippet


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.k + n, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        self.k = min(self.k + 1, len(self.toks) - 1)
        return t

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = what or repr(text) if text else what or kind
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise DslError(f"expected {want}, found {got}", t.pos)
        return self.advance()

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    # grammar

    def file(self) -> list[Decl]:
        decls = []
        while not self.at("eof"):
            decls.append(self.decl())
        return decls

    def decl(self) -> Decl:
        t = self.tok
        if not (t.kind == "name" and t.text in ("interaction", "fluent")):
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise DslError(f"expected 'interaction' or 'fluent', found {got}", t.pos)
        self.advance()
        name = self.expect("name", what="a rule name").text
        self.expect("punct", "(")
        params = [self.expect("var", what="a parameter variable").text]
        while self.at("punct", ","):
            self.advance()
            params.append(self.expect("var", what="a parameter variable").text)
        self.expect("punct", ")")
        ivar = None
        if t.text == "interaction":
            self.expect("name", "during")
            ivar = self.expect("var", what="an interval variable").text
        self.expect("imp", what="':-'")
        body = [self.literal()]
        while self.at("punct", ","):
            self.advance()
            body.append(self.literal())
        self.expect("punct", ".")
        line, col, _ = _locate(self.text, t.pos)
        return Decl(t.text, name, tuple(params), ivar, tuple(body), line, col)

    def literal(self) -> Literal:
        start = self.tok
        name = self.expect("name", what="a literal").text
        self.expect("punct", "(")
        args = [self.term()]
        while self.at("punct", ","):
            self.advance()
            args.append(self.term())
        self.expect("punct", ")")
        if self.at("kw", "holds-in"):
            self.advance()
            ivar = self.expect("var", what="an interval variable").text
            return HoldsIn(Atom(name, tuple(args)), ivar)
        if name in ALLEN_OPS and len(args) == 2 and all(isinstance(a, Var) for a in args):
            return AllenLit(name, args[0].name, args[1].name)
        if len(args) == 1 and not isinstance(args[0], BodyPartTerm):
            return Guard(name, args[0])
        raise DslError(f"literal {name}/{len(args)} needs 'holds-in' and an interval variable", start.pos)

    def term(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.advance()
            return Var(t.text)
        if t.kind == "name" and t.text == "body_part" and self.peek().text == "(":
            self.advance()
            self.advance()
            part = self.expect("name", what="a body-part name").text
            self.expect("punct", ",")
            p = self.tok
            if p.kind == "var":
                person = Var(self.advance().text)
            else:
                person = Const(self.expect("name", what="a person").text)
            self.expect("punct", ")")
            return BodyPartTerm(part, person)
        if t.kind == "name":
            self.advance()
            return Const(t.text)
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise DslError(f"expected a term, found {got}", t.pos)


# --- validation --------------------------------------------------------------


def _term_vars(term) -> list[str]:
    if isinstance(term, Var):
        return [term.name]
    if isinstance(term, BodyPartTerm) and isinstance(term.person, Var):
        return [term.person.name]
    return []


def _validate(decls: list[Decl], known: dict[str, tuple[str, int]], text: str) -> list[Diagnostic]:
    from .body import BODY_PARTS, SIDED_PARTS

    diags = []

    def diag(pos_decl: Decl, needle: str, message: str):
        pos = _find(text, pos_decl, needle)
        line, col, snippet = _locate(text, pos)
        diags.append(Diagnostic("error", line, col, message, snippet))

    table = dict(known)
    for d in decls:
        if d.name in BUILTIN_ARITY:
            diag(d, d.name, f"{d.name} is a built-in predicate and cannot be redefined")
        elif d.name in table and table[d.name][0] == "local":
            diag(d, d.name, f"duplicate definition of {d.name}")
        table[d.name] = ("local", d.arity)
    arities = {k: v[1] for k, v in table.items()}

    for d in decls:
        if len(set(d.params)) != len(d.params):
            diag(d, d.name, f"repeated parameter in {d.name}")
        bound_ivars = {lit.ivar for lit in d.body if isinstance(lit, HoldsIn)}
        if d.ivar:
            bound_ivars.add(d.ivar)
        used_vars = set()
        for lit in d.body:
            if isinstance(lit, Guard):
                used_vars.update(_term_vars(lit.term))
            elif isinstance(lit, HoldsIn):
                a = lit.atom
                for term in a.args:
                    used_vars.update(_term_vars(term))
                    if isinstance(term, BodyPartTerm) and term.part not in BODY_PARTS and term.part not in SIDED_PARTS:
                        diag(d, f"body_part({term.part}", f"unknown body part {term.part}")
                if a.pred in BUILTIN_ARITY:
                    want = BUILTIN_ARITY[a.pred]
                elif a.pred in arities:
                    want = arities[a.pred]
                else:
                    diag(d, a.pred + "(", f"unknown predicate {a.pred}/{len(a.args)}")
                    continue
                if want != len(a.args):
                    diag(d, a.pred + "(", f"arity mismatch: {a.pred} takes {want} argument(s), got {len(a.args)}")
            elif isinstance(lit, AllenLit):
                for v in (lit.a, lit.b):
                    if v not in bound_ivars:
                        diag(d, f"{lit.op}(", f"unbound interval variable {v} in {lit.op}")
        for p in d.params:
            if p not in used_vars:
                diag(d, d.name, f"parameter {p} of {d.name} does not occur in the body")
        if not any(isinstance(lit, HoldsIn) for lit in d.body):
            diag(d, d.name, f"{d.name} has no holds-in literal")
    diags.extend(_cycles(decls, text))
    return diags


def _cycles(decls: list[Decl], text: str) -> list[Diagnostic]:
    local = {d.name: d for d in decls}
    deps = {d.name: {lit.atom.pred for lit in d.body if isinstance(lit, HoldsIn)} & set(local) for d in decls}
    state: dict[str, int] = {}
    out = []

    def visit(n, stack):
        state[n] = 1
        for m in sorted(deps[n]):
            if state.get(m) == 1:
                d = local[n]
                line, col, snippet = _locate(text, _find(text, d, d.name))
                cycle = " -> ".join(stack[stack.index(m):] + [m])
                out.append(Diagnostic("error", line, col, f"recursive definition {cycle}", snippet))
            elif m not in state:
                visit(m, stack + [m])
        state[n] = 2

    for n in sorted(deps):
        if n not in state:
            visit(n, [n])
    return out


def _find(text: str, d: Decl, needle: str) -> int:
    """Offset of ``needle`` inside the declaration's source, else its start."""
    if not text:
        return 0
    lines = text.split("\n")
    start = sum(len(x) + 1 for x in lines[:max(d.line - 1, 0)]) + max(d.column - 1, 0)
    end = text.find(":-", start)
    end = text.find(".", end if end >= 0 else start)
    hit = text.find(needle, start, len(text) if end < 0 else end + 1)
    return hit if hit >= 0 else start


# --- public API --------------------------------------------------------------


def parse(text: str, known: dict | None = None) -> ParseResult:
    """Parse and validate rule text.

    ``known`` maps names of already-available declarations (for example the
    standard library) to ``(origin, arity)`` so rule files can build on them.
    """
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        decls = _Parser(text).file()
    except DslError as e:
        line, col, snippet = _locate(text, e.pos)
        return ParseResult([], [Diagnostic("error", line, col, e.message, snippet)])
    except UnicodeDecodeError as e:
        return ParseResult([], [Diagnostic("error", 1, 1, f"input is not UTF-8: {e.reason}", "")])
    except Exception as e:  # parse must stay total
        line, col, snippet = _locate(text if isinstance(text, str) else "", 0)
        return ParseResult([], [Diagnostic("error", line, col, f"internal parser error: {e}", snippet)])
    diags = _validate(decls, known or {}, text)
    if diags:
        return ParseResult([], diags)
    return ParseResult(decls, [])


def parse_file(path, known: dict | None = None) -> RuleSource:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        return RuleSource(str(path), "", [], [Diagnostic("error", 1, 1, f"input is not UTF-8: {e.reason}", "")])
    res = parse(text, known)
    return RuleSource(str(path), text, res.declarations, res.diagnostics)


def pretty(decls) -> str:
    return "\n\n".join(str(d) for d in decls) + ("\n" if decls else "")


def known_names(decls) -> dict:
    return {d.name: ("library", d.arity) for d in decls}


_STDLIB_CACHE: list | None = None


def standard_library_text() -> str:
    return resources.files("qsground").joinpath("stdlib.qsr").read_text(encoding="utf-8")


def load_standard_library() -> list[Decl]:
    global _STDLIB_CACHE
    if _STDLIB_CACHE is None:
        res = parse(standard_library_text())
        if res.diagnostics:
            raise RuntimeError("standard library failed to parse: " + "; ".join(map(str, res.diagnostics)))
        _STDLIB_CACHE = res.declarations
    return list(_STDLIB_CACHE)


# --- goals (used by the query command) ---------------------------------------


@dataclass(frozen=True)
class Goal:
    mode: str  # "holds-in", "occurs-in", "holds-at", "occurs-at"
    atom: Atom
    ivar: str | None = None
    time: float | None = None


def parse_goal(text: str) -> tuple[Goal | None, list[Diagnostic]]:
    try:
        p = _Parser(text)
        if p.at("kw"):
            mode = p.advance().text
            p.expect("punct", "(")
            atom = _goal_atom(p)
            p.expect("punct", ",")
            if mode.endswith("-in"):
                ivar, time = p.expect("var", what="an interval variable").text, None
            else:
                tok = p.tok
                if tok.kind != "num":
                    raise DslError("expected a time", tok.pos)
                p.advance()
                ivar, time = None, float(tok.text)
            p.expect("punct", ")")
        else:
            mode, atom, ivar, time = "holds-in", _goal_atom(p), None, None
        if p.at("punct", "."):
            p.advance()
        if not p.at("eof"):
            raise DslError(f"unexpected {p.tok.text!r} after goal", p.tok.pos)
        return Goal(mode, atom, ivar, time), []
    except DslError as e:
        line, col, snippet = _locate(text, e.pos)
        return None, [Diagnostic("error", line, col, e.message, snippet)]
    except Exception as e:
        return None, [Diagnostic("error", 1, 1, f"internal parser error: {e}", text.split("\n")[0] if text else "")]


def _goal_atom(p: _Parser) -> Atom:
    name = p.expect("name", what="a predicate").text
    p.expect("punct", "(")
    args = [p.term()]
    while p.at("punct", ","):
        p.advance()
        args.append(p.term())
    p.expect("punct", ")")
    return Atom(name, tuple(args))
