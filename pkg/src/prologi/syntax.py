"""Concrete syntax: programs, goals, and terms.

Program text is a sequence of clauses terminated by `.`, with `%` line
comments.  A clause is a fact `p(a,b).` or a rule `head :- body.`.  Goal
syntax:

    goal      ::= unit | unit ',' goal                  (conjunction)
    unit      ::= '(' goal ')'
                | 'read' '(' VAR ',' goal ')'           (ask the user for a term)
                | 'exists' '(' VAR ',' goal ')'         (explicit existential)
                | 'uchoose' '(' unit ',' unit {',' unit} ')'   (user picks one)
                | atom-or-flex goal
    atom-or-flex ::= ATOM ['(' term {',' term} ')']
                   | VAR  ['(' term {',' term} ')']     (flex: predicate is a variable)

Inside `uchoose(...)` the comma separates alternatives, so an alternative
that is itself a conjunction must be parenthesized.  The body of `read`/
`exists` is a full goal, so `read(X, a, b)` means `read(X, (a, b))`.

Terms are atoms (lowercase-initial), variables (uppercase or `_` initial),
integers, and compounds.  `:` is a right-associative infix functor between
integers so clock times like `9:00` and `10:50` are ordinary terms; a
leading zero as in `09:35` is kept as a display width and survives
rendering.  `_` alone is an anonymous variable, fresh at each occurrence.

`read`, `exists`, and `uchoose` are goal keywords only when applied to
arguments in goal position; they are ordinary symbols inside terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

from .terms import (
    Atom,
    Compound,
    GLOBAL_SOURCE,
    IntConst,
    PrologiError,
    Substitution,
    Term,
    Var,
    VarSource,
    fresh_rename,
    term_vars,
)


class ParseError(PrologiError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        return f"line {self.line}, column {self.col}: {self.message}"


class UnusedBinderWarning(UserWarning):
    """A read/exists binder variable that never occurs in its body."""


# ---------------------------------------------------------------------------
# Goal and clause AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomGoal:
    """An atomic goal.  `pred` is an Atom, or a Var for flex goals like
    X(paris,nice,Dt,At) whose predicate is supplied later by the user."""
    pred: Term
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Conj:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Goal"


@dataclass(frozen=True)
class Read:
    var: Var
    body: "Goal"


@dataclass(frozen=True)
class Uchoose:
    alternatives: tuple["Goal", ...]

    def __post_init__(self) -> None:
        if len(self.alternatives) < 2:
            raise ValueError("uchoose needs at least two alternatives")


Goal = Union[AtomGoal, Conj, Exists, Read, Uchoose]


@dataclass(frozen=True)
class Clause:
    """head holds for a fact; `head :- body` proves head from body."""
    head: Term
    body: Optional[Goal] = None


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...]

    def __len__(self) -> int:
        return len(self.clauses)


EMPTY_PROGRAM = Program(())


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {"(", ")", ",", ".", ":"}


@dataclass(frozen=True)
class _Token:
    kind: str          # "atom", "var", "int", "(", ")", ",", ".", ":", ":-", "eof"
    text: str
    line: int
    col: int
    value: int = 0     # int tokens
    width: Optional[int] = None


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "atom" if c.islower() else "var"
            tokens.append(_Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            digits = text[i:j]
            width = len(digits) if digits[0] == "0" and len(digits) > 1 else None
            tokens.append(_Token("int", digits, line, start_col, value=int(digits), width=width))
            col += j - i
            i = j
            continue
        if c == ":" and i + 1 < n and text[i + 1] == "-":
            tokens.append(_Token(":-", ":-", line, start_col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            tokens.append(_Token(c, c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


def _describe(tok: _Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.text)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_GOAL_KEYWORDS = ("read", "exists", "uchoose")


class _Parser:
    def __init__(self, tokens: list[_Token], source: VarSource) -> None:
        self.tokens = tokens
        self.pos = 0
        self.source = source
        # Innermost scope last; scope 0 collects the parse unit's free variables.
        self.scopes: list[dict[str, Var]] = [{}]

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(f"expected {expected}, found {_describe(tok)}", tok.line, tok.col)

    def expect(self, kind: str, expected: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.fail(expected)
        return self.advance()

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"trailing input: {_describe(tok)}", tok.line, tok.col)

    # -- variables ---------------------------------------------------------

    def lookup_var(self, name: str) -> Var:
        if name == "_":
            return self.source.fresh("_")
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        var = self.source.fresh(name)
        self.scopes[0][name] = var
        return var

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        t = self.primary()
        if self.peek().kind == ":":
            if not isinstance(t, IntConst):
                tok = self.peek()
                raise ParseError("':' joins integers into a time literal", tok.line, tok.col)
            self.advance()
            return self.time_tail(t)
        return t

    def time_tail(self, left: IntConst) -> Compound:
        # The ':' before this call is already consumed; right-associative.
        tok = self.peek()
        if tok.kind != "int":
            raise self.fail("an integer after ':'")
        mid = self.primary()
        if self.peek().kind == ":":
            self.advance()
            right: Term = self.time_tail(mid)  # type: ignore[arg-type]
        else:
            right = mid
        return Compound(":", (left, right))

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntConst(tok.value, tok.width)
        if tok.kind == "var":
            self.advance()
            return self.lookup_var(tok.text)
        if tok.kind == "atom":
            self.advance()
            if self.peek().kind == "(":
                args = self.term_args()
                return Compound(tok.text, args)
            return Atom(tok.text)
        raise self.fail("a term")

    def term_args(self) -> tuple[Term, ...]:
        self.expect("(", "'('")
        args = [self.term()]
        while self.peek().kind == ",":
            self.advance()
            args.append(self.term())
        self.expect(")", "')' or ','")
        return tuple(args)

    # -- goals -------------------------------------------------------------

    def goal_expr(self) -> Goal:
        g = self.goal_unit()
        if self.peek().kind == ",":
            self.advance()
            return Conj(g, self.goal_expr())
        return g

    def goal_unit(self) -> Goal:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            g = self.goal_expr()
            self.expect(")", "')'")
            return g
        if tok.kind == "atom":
            if tok.text in _GOAL_KEYWORDS and self.peek(1).kind == "(":
                return self.special_goal(tok.text)
            self.advance()
            args: tuple[Term, ...] = ()
            if self.peek().kind == "(":
                args = self.term_args()
            return AtomGoal(Atom(tok.text), args)
        if tok.kind == "var":
            self.advance()
            pred = self.lookup_var(tok.text)
            args = ()
            if self.peek().kind == "(":
                args = self.term_args()
            return AtomGoal(pred, args)
        raise self.fail("a goal")

    def special_goal(self, keyword: str) -> Goal:
        kw_tok = self.advance()
        self.expect("(", "'('")
        if keyword == "uchoose":
            alts = [self.goal_unit()]
            while self.peek().kind == ",":
                self.advance()
                alts.append(self.goal_unit())
            self.expect(")", "')' or ','")
            if len(alts) < 2:
                raise ParseError("uchoose needs at least two alternatives",
                                 kw_tok.line, kw_tok.col)
            return Uchoose(tuple(alts))
        var_tok = self.expect("var", f"a variable after {keyword}(")
        binder = self.source.fresh(var_tok.text)
        self.expect(",", "','")
        scope = {} if var_tok.text == "_" else {var_tok.text: binder}
        self.scopes.append(scope)
        try:
            body = self.goal_expr()
        finally:
            self.scopes.pop()
        self.expect(")", "')'")
        if binder not in goal_free_vars(body):
            warnings.warn(
                f"{keyword} binds {var_tok.text} but it never occurs in the body",
                UnusedBinderWarning,
                stacklevel=3,
            )
        return Read(binder, body) if keyword == "read" else Exists(binder, body)

    # -- clauses -----------------------------------------------------------

    def clause(self) -> Clause:
        self.scopes = [{}]
        tok = self.peek()
        if tok.kind == "var":
            raise ParseError("clause head cannot be a variable", tok.line, tok.col)
        if tok.kind == "int":
            raise ParseError("clause head cannot be an integer", tok.line, tok.col)
        head_tok = self.expect("atom", "a clause head")
        head: Term = Atom(head_tok.text)
        if self.peek().kind == "(":
            head = Compound(head_tok.text, self.term_args())
        body: Optional[Goal] = None
        if self.peek().kind == ":-":
            self.advance()
            body = self.goal_expr()
        self.expect(".", "'.' at end of clause")
        return Clause(head, body)


def parse_program(text: str, source: VarSource = GLOBAL_SOURCE) -> Program:
    """Parse program text into clauses, preserving textual order."""
    p = _Parser(_lex(text), source)
    clauses = []
    while p.peek().kind != "eof":
        clauses.append(p.clause())
    return Program(tuple(clauses))


def parse_goal(text: str, source: VarSource = GLOBAL_SOURCE) -> Goal:
    p = _Parser(_lex(text), source)
    goal = p.goal_expr()
    p.expect_eof()
    return goal


def parse_term(text: str, source: VarSource = GLOBAL_SOURCE) -> Term:
    p = _Parser(_lex(text), source)
    term = p.term()
    p.expect_eof()
    return term


# ---------------------------------------------------------------------------
# Structural utilities
# ---------------------------------------------------------------------------

def goal_free_vars(goal: Goal) -> list[Var]:
    """Free variables of a goal in first-occurrence order (binders excluded)."""
    out: list[Var] = []
    seen: set[Var] = set()
    bound: set[Var] = set()

    def take(term: Term) -> None:
        for v in term_vars(term):
            if v not in bound and v not in seen:
                seen.add(v)
                out.append(v)

    def walk(g: Goal) -> None:
        if isinstance(g, AtomGoal):
            take(g.pred)
            for a in g.args:
                take(a)
        elif isinstance(g, Conj):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, Read)):
            bound.add(g.var)
            walk(g.body)
        else:
            for alt in g.alternatives:
                walk(alt)

    walk(goal)
    return out


def apply_to_goal(subst: Substitution, goal: Goal) -> Goal:
    """Apply a substitution through a goal, rebuilding every node.

    A flex predicate that resolves to an atom turns the goal rigid.  Binder
    variables are left alone; they are unique objects and never appear in a
    substitution's domain before their node runs.
    """
    if isinstance(goal, AtomGoal):
        return AtomGoal(subst.apply(goal.pred), tuple(subst.apply(a) for a in goal.args))
    if isinstance(goal, Conj):
        return Conj(apply_to_goal(subst, goal.left), apply_to_goal(subst, goal.right))
    if isinstance(goal, Exists):
        return Exists(goal.var, apply_to_goal(subst, goal.body))
    if isinstance(goal, Read):
        return Read(goal.var, apply_to_goal(subst, goal.body))
    return Uchoose(tuple(apply_to_goal(subst, alt) for alt in goal.alternatives))


def rename_goal(goal: Goal, source: VarSource = GLOBAL_SOURCE,
                mapping: Optional[dict[Var, Var]] = None) -> Goal:
    """Fresh-variable copy of a goal.  Every node is rebuilt, so the copy is
    a distinct dynamic occurrence (the engine tracks interaction nodes by
    object identity)."""
    if mapping is None:
        mapping = {}

    def walk_term(t: Term) -> Term:
        if isinstance(t, Var):
            found = mapping.get(t)
            if found is None:
                found = source.fresh(t.name)
                mapping[t] = found
            return found
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(walk_term(a) for a in t.args))
        return t

    def walk(g: Goal) -> Goal:
        if isinstance(g, AtomGoal):
            return AtomGoal(walk_term(g.pred), tuple(walk_term(a) for a in g.args))
        if isinstance(g, Conj):
            return Conj(walk(g.left), walk(g.right))
        if isinstance(g, Exists):
            return Exists(walk_term(g.var), walk(g.body))  # type: ignore[arg-type]
        if isinstance(g, Read):
            return Read(walk_term(g.var), walk(g.body))  # type: ignore[arg-type]
        return Uchoose(tuple(walk(alt) for alt in g.alternatives))

    return walk(goal)


def rename_clause(clause: Clause, source: VarSource = GLOBAL_SOURCE) -> Clause:
    """Rename a clause apart before matching it against a goal atom."""
    mapping: dict[Var, Var] = {}
    head = fresh_rename(clause.head, source, mapping)
    body = rename_goal(clause.body, source, mapping) if clause.body is not None else None
    return Clause(head, body)


def rename_apart(value, source: VarSource = GLOBAL_SOURCE):
    """fresh_rename for any syntactic kind: Term, Goal, Clause, or Program."""
    if isinstance(value, Clause):
        return rename_clause(value, source)
    if isinstance(value, Program):
        return Program(tuple(rename_clause(c, source) for c in value.clauses))
    if isinstance(value, (AtomGoal, Conj, Exists, Read, Uchoose)):
        return rename_goal(value, source)
    return fresh_rename(value, source)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

class _Namer:
    """Chooses display names for variables.

    Parser-produced values render back to the exact text that produced them:
    binder scoping is replayed, so shadowed names stay plain.  Distinct free
    variables that share a name (only possible in hand-built values) get a
    serial suffix to stay distinguishable.
    """

    def __init__(self) -> None:
        self.scopes: list[dict[str, Var]] = []
        self.free: dict[str, Var] = {}

    def push(self, var: Var) -> None:
        self.scopes.append({var.name: var})

    def pop(self) -> None:
        self.scopes.pop()

    def name_for(self, var: Var) -> str:
        if var.name == "_":
            return "_"
        for scope in reversed(self.scopes):
            if var.name in scope:
                return var.name if scope[var.name] == var else f"{var.name}_{var.serial}"
        canonical = self.free.setdefault(var.name, var)
        return var.name if canonical == var else f"{var.name}_{var.serial}"


def _render_term(term: Term, namer: _Namer, colon_right: bool = False) -> str:
    if isinstance(term, Var):
        return namer.name_for(term)
    if isinstance(term, IntConst):
        width = term.width or 0
        if colon_right:
            width = max(width, 2)
        return f"{term.value:0{width}d}" if width else str(term.value)
    if isinstance(term, Atom):
        return term.name
    if term.functor == ":" and len(term.args) == 2:
        left = _render_term(term.args[0], namer)
        right = _render_term(term.args[1], namer, colon_right=True)
        return f"{left}:{right}"
    args = ",".join(_render_term(a, namer) for a in term.args)
    return f"{term.functor}({args})"


def _render_goal(goal: Goal, namer: _Namer) -> str:
    if isinstance(goal, AtomGoal):
        pred = _render_term(goal.pred, namer)
        if not goal.args:
            return pred
        return f"{pred}({','.join(_render_term(a, namer) for a in goal.args)})"
    if isinstance(goal, Conj):
        left = _render_goal(goal.left, namer)
        if isinstance(goal.left, Conj):
            left = f"({left})"
        return f"{left}, {_render_goal(goal.right, namer)}"
    if isinstance(goal, (Exists, Read)):
        keyword = "read" if isinstance(goal, Read) else "exists"
        namer.push(goal.var)
        try:
            body = _render_goal(goal.body, namer)
        finally:
            namer.pop()
        return f"{keyword}({goal.var.name}, {body})"
    parts = []
    for alt in goal.alternatives:
        text = _render_goal(alt, namer)
        parts.append(f"({text})" if isinstance(alt, Conj) else text)
    return f"uchoose({', '.join(parts)})"


def render(value) -> str:
    """Render a Term, Goal, Clause, Program, or Substitution back to text.

    Round-trips with the matching parser for everything a parser can
    produce; an empty substitution renders as "true"."""
    namer = _Namer()
    if isinstance(value, (Var, IntConst, Atom, Compound)):
        return _render_term(value, namer)
    if isinstance(value, (AtomGoal, Conj, Exists, Read, Uchoose)):
        return _render_goal(value, namer)
    if isinstance(value, Clause):
        return _render_clause(value, namer)
    if isinstance(value, Program):
        return "\n".join(_render_clause(c, _Namer()) for c in value.clauses)
    if isinstance(value, Substitution):
        if not value:
            return "true"
        return ", ".join(
            f"{namer.name_for(v)} = {_render_term(t, namer)}" for v, t in value.items()
        )
    raise TypeError(f"cannot render {type(value).__name__}")


def _render_clause(clause: Clause, namer: _Namer) -> str:
    head = _render_term(clause.head, namer)
    if clause.body is None:
        return f"{head}."
    return f"{head} :- {_render_goal(clause.body, namer)}."
