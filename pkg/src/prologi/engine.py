"""Depth-first backtracking solver with interactive goals.

Proof search alternates between two phases.  Goal reduction decomposes the
query by its top connective: a conjunction proves both sides left to right,
an existential introduces a fresh variable, `read` binds its variable to a
term supplied by the user, and `uchoose` asks the user to pick exactly one
alternative to prove.  Backchaining fires at atomic goals: clauses are tried
in textual order, each renamed apart and unified with the goal atom, and a
rule clause's body becomes a new proof obligation.

Interactions are side effects and are irrevocable.  A `read` or `uchoose`
node prompts once when the search first reaches it; backtracking can still
enumerate further solutions inside the chosen branch, but a fresh entry into
an already-consumed node (via backtracking around it) fails that branch
instead of prompting again.  With choice_policy "retry", a pick whose branch
produces no solution re-prompts with the remaining alternatives; the default
"fail" policy fails the whole uchoose.

All user input arrives through an InteractionHandler, so the same engine
drives scripted replays, a console session, or a wire protocol.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence, Union

from .terms import (
    Atom,
    Compound,
    CyclicTermError,
    EMPTY_SUBST,
    GLOBAL_SOURCE,
    IntConst,
    PrologiError,
    Substitution,
    Term,
    Var,
    VarSource,
    is_ground,
    unify,
)
from .syntax import (
    AtomGoal,
    Conj,
    Exists,
    Goal,
    Program,
    Read,
    Uchoose,
    apply_to_goal,
    goal_free_vars,
    parse_term,
    rename_clause,
    render,
)


class EngineError(PrologiError):
    pass


class InstantiationError(EngineError):
    """A flex goal's predicate was not resolved to an atom by call time."""


class HandlerAbort(EngineError):
    """The interaction handler ended the session (EOF, disconnect, ...)."""


class UserInputError(EngineError):
    """The user's interactive input stayed invalid; the branch is abandoned."""


class ScriptError(EngineError):
    pass


class ScriptExhausted(ScriptError):
    """The engine asked for more interactions than the script provides."""


class ScriptMismatch(ScriptError):
    """A scripted choose answered a read request, or vice versa."""


class ChoiceOutOfRange(ScriptError):
    """A choice index outside 1..n."""


# ---------------------------------------------------------------------------
# Options, handlers, answers
# ---------------------------------------------------------------------------

_POLICIES = ("fail", "retry")


@dataclass(frozen=True)
class SolveOptions:
    occurs_check: bool = False
    depth_limit: Optional[int] = None
    max_solutions: Optional[int] = None
    choice_policy: str = "fail"

    def __post_init__(self) -> None:
        if self.depth_limit is not None and self.depth_limit < 1:
            raise ValueError("depth_limit must be >= 1")
        if self.max_solutions is not None and self.max_solutions < 1:
            raise ValueError("max_solutions must be >= 1")
        if self.choice_policy not in _POLICIES:
            raise ValueError(f"choice_policy must be one of {_POLICIES}")


class InteractionHandler:
    """How the engine consults the user.

    choose() receives the rendered alternatives (current bindings already
    applied) and returns a 1-based index into that list.  read_term()
    returns a fully parsed term for the named variable.
    """

    def choose(self, alternatives: Sequence[str]) -> int:
        raise NotImplementedError

    def read_term(self, variable_name: str) -> Term:
        raise NotImplementedError


class _RefusingHandler(InteractionHandler):
    def choose(self, alternatives: Sequence[str]) -> int:
        raise HandlerAbort("goal requires user interaction but no handler is attached")

    def read_term(self, variable_name: str) -> Term:
        raise HandlerAbort("goal requires user interaction but no handler is attached")


@dataclass(frozen=True)
class ChoiceEvent:
    """One uchoose prompt: the menu as shown and the 1-based pick."""
    alternatives: tuple[str, ...]
    index: int


@dataclass(frozen=True)
class ReadEvent:
    """One read prompt: the variable asked for and the reply, rendered."""
    variable: str
    text: str


InteractionEvent = Union[ChoiceEvent, ReadEvent]


@dataclass(frozen=True)
class Answer:
    """One solution: bindings restricted to the query's free variables, the
    interaction transcript up to the moment the answer was produced, and the
    query variables in first-occurrence order (for stable printing)."""
    bindings: Substitution
    transcript: tuple[InteractionEvent, ...]
    variables: tuple[Var, ...]


def bindings_in_order(answer: Answer) -> list[tuple[str, str]]:
    """(name, rendered term) pairs for an answer's bound query variables,
    in the query's first-occurrence order."""
    return [
        (v.name, render(answer.bindings.apply(v)))
        for v in answer.variables
        if v in answer.bindings
    ]


# ---------------------------------------------------------------------------
# Scripted interactions
# ---------------------------------------------------------------------------

def parse_script(text: str) -> list[tuple[str, str]]:
    """Parse script text: one `choose <k>` or `read <term>` per line, `#`
    comments and blank lines skipped."""
    directives: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("choose "):
            arg = line[len("choose "):]
            if not arg.isdigit():
                raise ScriptError(f"script line {lineno}: choose needs a decimal index")
            directives.append(("choose", arg))
        elif line.startswith("read "):
            directives.append(("read", line[len("read "):]))
        else:
            raise ScriptError(f"script line {lineno}: expected 'choose <k>' or 'read <term>'")
    return directives


class ScriptedHandler(InteractionHandler):
    """Replays a fixed list of responses; any deviation is an error."""

    def __init__(self, script: Sequence[Union[str, tuple[str, str]]],
                 source: VarSource = GLOBAL_SOURCE) -> None:
        self.entries: list[tuple[str, str]] = []
        for entry in script:
            if isinstance(entry, str):
                parsed = parse_script(entry)
                self.entries.extend(parsed)
            else:
                self.entries.append(entry)
        self.pos = 0
        self.source = source

    def _next(self, kind: str) -> str:
        if self.pos >= len(self.entries):
            raise ScriptExhausted(f"script exhausted: engine asked for {kind}")
        got, payload = self.entries[self.pos]
        if got != kind:
            raise ScriptMismatch(f"script has {got!r} but engine asked for {kind!r}")
        self.pos += 1
        return payload

    def choose(self, alternatives: Sequence[str]) -> int:
        index = int(self._next("choose"))
        if not 1 <= index <= len(alternatives):
            raise ChoiceOutOfRange(
                f"choice {index} out of range 1..{len(alternatives)}")
        return index

    def read_term(self, variable_name: str) -> Term:
        return parse_term(self._next("read"), self.source)


def make_scripted_handler(script, source: VarSource = GLOBAL_SOURCE) -> ScriptedHandler:
    """Handler from script lines (strings) or (kind, payload) pairs."""
    return ScriptedHandler(script, source)


def handler_from_transcript(events: Sequence[InteractionEvent],
                            source: VarSource = GLOBAL_SOURCE) -> ScriptedHandler:
    """Replay an Answer's transcript as a script."""
    entries = []
    for ev in events:
        if isinstance(ev, ChoiceEvent):
            entries.append(("choose", str(ev.index)))
        else:
            entries.append(("read", ev.text))
    return ScriptedHandler(entries, source)


# ---------------------------------------------------------------------------
# The solver
# ---------------------------------------------------------------------------

class SolveRun:
    """Lazy answer sequence for one query.  Iterate it once; `truncated`
    reports whether any branch was cut off by the depth limit."""

    def __init__(self, program: Program, goal: Goal,
                 handler: Optional[InteractionHandler],
                 options: Optional[SolveOptions],
                 source: VarSource) -> None:
        self.program = program
        self.goal = goal
        self.handler = handler if handler is not None else _RefusingHandler()
        self.options = options if options is not None else SolveOptions()
        self.source = source
        self.truncated = False
        self.transcript: list[InteractionEvent] = []
        # Interaction nodes that already prompted, keyed by dynamic identity.
        # Values keep the nodes alive so ids are never recycled mid-run.
        self._consumed: dict[int, Goal] = {}
        self._answers = self._iterate()

    def __iter__(self) -> Iterator[Answer]:
        return self._answers

    def __next__(self) -> Answer:
        return next(self._answers)

    # -- top level ----------------------------------------------------------

    def _iterate(self) -> Iterator[Answer]:
        free = tuple(goal_free_vars(self.goal))
        count = 0
        for subst in self._reduce_goal(self.goal, EMPTY_SUBST, 0):
            try:
                bindings = subst.restrict(free)
            except CyclicTermError:
                continue
            yield Answer(bindings, tuple(self.transcript), free)
            count += 1
            if self.options.max_solutions is not None and count >= self.options.max_solutions:
                return

    # -- goal reduction -----------------------------------------------------

    def _reduce_goal(self, goal: Goal, subst: Substitution, depth: int) -> Iterator[Substitution]:
        limit = self.options.depth_limit
        if limit is not None and depth > limit:
            self.truncated = True
            return
        if isinstance(goal, AtomGoal):
            yield from self._atom(goal, subst, depth)
        elif isinstance(goal, Conj):
            for left in self._reduce_goal(goal.left, subst, depth + 1):
                yield from self._reduce_goal(goal.right, left, depth + 1)
        elif isinstance(goal, Exists):
            witness = self.source.fresh(goal.var.name)
            yield from self._reduce_goal(goal.body, subst.bind(goal.var, witness), depth + 1)
        elif isinstance(goal, Read):
            yield from self._read(goal, subst, depth)
        else:
            yield from self._uchoose(goal, subst, depth)

    def _atom(self, goal: AtomGoal, subst: Substitution, depth: int) -> Iterator[Substitution]:
        try:
            pred = subst.apply(goal.pred)
            args = tuple(subst.apply(a) for a in goal.args)
        except CyclicTermError:
            return
        if isinstance(pred, Var):
            raise InstantiationError(
                f"flex goal head {pred.name} is unbound at call time")
        if not isinstance(pred, Atom):
            raise InstantiationError(
                f"flex goal head resolved to {render(pred)}, which is not an atom")
        atom: Term = Compound(pred.name, args) if args else pred
        yield from self._backchain(atom, subst, depth)

    # -- backchaining -------------------------------------------------------

    def _backchain(self, atom: Term, subst: Substitution, depth: int) -> Iterator[Substitution]:
        for clause in self.program.clauses:
            renamed = rename_clause(clause, self.source)
            mgu = unify(atom, renamed.head, self.options.occurs_check)
            if mgu is None:
                continue
            try:
                extended = subst.compose(mgu)
            except CyclicTermError:
                continue
            if renamed.body is None:
                yield extended
            else:
                yield from self._reduce_goal(renamed.body, extended, depth + 1)

    # -- interactive goals --------------------------------------------------

    def _consume(self, goal: Goal) -> bool:
        """True if this dynamic node already prompted; otherwise mark it."""
        key = id(goal)
        if key in self._consumed:
            return True
        self._consumed[key] = goal
        return False

    def _read(self, goal: Read, subst: Substitution, depth: int) -> Iterator[Substitution]:
        if self._consume(goal):
            return
        try:
            reply = self.handler.read_term(goal.var.name)
        except UserInputError:
            return
        self.transcript.append(ReadEvent(goal.var.name, render(reply)))
        yield from self._reduce_goal(goal.body, subst.bind(goal.var, reply), depth + 1)

    def _uchoose(self, goal: Uchoose, subst: Substitution, depth: int) -> Iterator[Substitution]:
        if self._consume(goal):
            return
        remaining = list(goal.alternatives)
        while remaining:
            try:
                menu = [render(apply_to_goal(subst, alt)) for alt in remaining]
            except CyclicTermError:
                return
            try:
                index = self.handler.choose(menu)
            except UserInputError:
                return
            if not 1 <= index <= len(menu):
                raise ChoiceOutOfRange(f"choice {index} out of range 1..{len(menu)}")
            self.transcript.append(ChoiceEvent(tuple(menu), index))
            chosen = remaining[index - 1]
            produced = False
            for result in self._reduce_goal(chosen, subst, depth + 1):
                produced = True
                yield result
            if produced or self.options.choice_policy == "fail":
                return
            remaining.pop(index - 1)


def solve(program: Program, goal: Goal,
          handler: Optional[InteractionHandler] = None,
          options: Optional[SolveOptions] = None,
          source: VarSource = GLOBAL_SOURCE) -> SolveRun:
    """Enumerate answers for `goal` against `program`, depth-first, clauses
    in textual order.  Returns a one-shot lazy SolveRun."""
    return SolveRun(program, goal, handler, options, source)


# ---------------------------------------------------------------------------
# Bottom-up oracle
# ---------------------------------------------------------------------------

class OracleScopeError(EngineError):
    """The program is outside the oracle's function-free fragment."""


def _oracle_constant(term: Term) -> bool:
    if isinstance(term, (Atom, IntConst)):
        return True
    if isinstance(term, Compound) and term.functor == ":":
        return all(_oracle_constant(a) and not isinstance(a, Var) for a in term.args) \
            and is_ground(term)
    return False


def _check_oracle_atom(goal: AtomGoal) -> None:
    if not isinstance(goal.pred, Atom):
        raise OracleScopeError("oracle cannot evaluate flex goals")
    for arg in goal.args:
        if isinstance(arg, Var):
            continue
        if not _oracle_constant(arg):
            raise OracleScopeError(
                f"oracle needs constant arguments, got {render(arg)}")


def _flatten_body(goal: Goal) -> list[AtomGoal]:
    if isinstance(goal, AtomGoal):
        return [goal]
    if isinstance(goal, Conj):
        return _flatten_body(goal.left) + _flatten_body(goal.right)
    if isinstance(goal, Exists):
        # The binder just becomes another clause variable bottom-up.
        return _flatten_body(goal.body)
    raise OracleScopeError("oracle cannot evaluate interactive goals")


def _head_atom(head: Term) -> AtomGoal:
    if isinstance(head, Atom):
        return AtomGoal(head)
    if isinstance(head, Compound):
        return AtomGoal(Atom(head.functor), head.args)
    raise OracleScopeError("clause head is not an atom")


def fixpoint_oracle(program: Program) -> frozenset[Term]:
    """Least model of a function-free program by naive bottom-up iteration.

    Ground `:` literals count as constants.  Used as an independent check
    against the solver on interaction-free programs; it shares no code with
    the proof search."""
    clauses: list[tuple[AtomGoal, list[AtomGoal]]] = []
    constants: list[Term] = []
    seen_consts: set[Term] = set()

    def note_constants(args: Sequence[Term]) -> None:
        for a in args:
            if not isinstance(a, Var) and a not in seen_consts:
                seen_consts.add(a)
                constants.append(a)

    for clause in program.clauses:
        head = _head_atom(clause.head)
        _check_oracle_atom(head)
        body = _flatten_body(clause.body) if clause.body is not None else []
        for atom in body:
            _check_oracle_atom(atom)
        note_constants(head.args)
        for atom in body:
            note_constants(atom.args)
        clauses.append((head, body))

    def ground(args: tuple[Term, ...], env: dict[Var, Term]) -> tuple[Term, ...]:
        return tuple(env.get(a, a) if isinstance(a, Var) else a for a in args)

    def as_term(name: str, args: tuple[Term, ...]) -> Term:
        return Compound(name, args) if args else Atom(name)

    model: set[Term] = set()
    changed = True
    while changed:
        changed = False
        for head, body in clauses:
            variables: list[Var] = []
            vseen: set[Var] = set()
            for atom in [head] + body:
                for arg in atom.args:
                    if isinstance(arg, Var) and arg not in vseen:
                        vseen.add(arg)
                        variables.append(arg)
            assignments = product(constants, repeat=len(variables)) if variables else [()]
            for combo in assignments:
                env = dict(zip(variables, combo))
                if all(as_term(a.pred.name, ground(a.args, env)) in model  # type: ignore[union-attr]
                       for a in body):
                    fact = as_term(head.pred.name, ground(head.args, env))  # type: ignore[union-attr]
                    if fact not in model:
                        model.add(fact)
                        changed = True
    return frozenset(model)
