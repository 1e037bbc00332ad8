"""Shared test utilities: alpha-equality and seeded random generators."""

from __future__ import annotations

import random

from prologi import (
    Atom,
    AtomGoal,
    Clause,
    Compound,
    Conj,
    Exists,
    IntConst,
    Program,
    Read,
    Uchoose,
    Var,
    VarSource,
    goal_free_vars,
)


# ---------------------------------------------------------------------------
# Alpha-equality: structural equality up to a bijective variable renaming.
# Variable names must agree; serials may differ.
# ---------------------------------------------------------------------------

def alpha_equal(a, b, ignore_names: bool = False) -> bool:
    """Structural equality under a variable bijection.  By default names
    must agree (parser round-trips preserve them); with ignore_names=True
    any bijective renaming is accepted (mgu uniqueness)."""
    return _alpha(a, b, {}, {}, ignore_names)


def _alpha_var(a: Var, b: Var, fwd: dict, bwd: dict, ignore_names: bool) -> bool:
    if not ignore_names and a.name != b.name:
        return False
    if a in fwd:
        return fwd[a] == b
    if b in bwd:
        return False
    fwd[a] = b
    bwd[b] = a
    return True


def _alpha(a, b, fwd, bwd, ign=False) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return _alpha_var(a, b, fwd, bwd, ign)
    if isinstance(a, IntConst):
        return a.value == b.value
    if isinstance(a, Atom):
        return a.name == b.name
    if isinstance(a, Compound):
        return (a.functor == b.functor and len(a.args) == len(b.args)
                and all(_alpha(x, y, fwd, bwd, ign) for x, y in zip(a.args, b.args)))
    if isinstance(a, AtomGoal):
        return (_alpha(a.pred, b.pred, fwd, bwd, ign) and len(a.args) == len(b.args)
                and all(_alpha(x, y, fwd, bwd, ign) for x, y in zip(a.args, b.args)))
    if isinstance(a, Conj):
        return _alpha(a.left, b.left, fwd, bwd, ign) and _alpha(a.right, b.right, fwd, bwd, ign)
    if isinstance(a, (Exists, Read)):
        return _alpha_var(a.var, b.var, fwd, bwd, ign) and _alpha(a.body, b.body, fwd, bwd, ign)
    if isinstance(a, Uchoose):
        return (len(a.alternatives) == len(b.alternatives)
                and all(_alpha(x, y, fwd, bwd, ign) for x, y in zip(a.alternatives, b.alternatives)))
    if isinstance(a, Clause):
        if not _alpha(a.head, b.head, fwd, bwd, ign):
            return False
        if (a.body is None) != (b.body is None):
            return False
        return a.body is None or _alpha(a.body, b.body, fwd, bwd, ign)
    if isinstance(a, Program):
        return (len(a.clauses) == len(b.clauses)
                and all(_alpha(x, y, {}, {}, ign) for x, y in zip(a.clauses, b.clauses)))
    raise TypeError(f"alpha_equal cannot compare {type(a).__name__}")


# ---------------------------------------------------------------------------
# Random syntax generators.  Every variable in one generated value gets a
# unique name, so rendering never needs disambiguation suffixes and
# round-trips are exact.
# ---------------------------------------------------------------------------

ATOM_POOL = ["a", "b", "c", "h", "f", "o", "nice", "paris", "panam"]
FUNCTOR_POOL = ["p", "q", "r", "f", "g", "price", "flight"]


class SyntaxGen:
    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.source = VarSource(start=1000)
        self.vars: list[Var] = []
        self._counter = 0

    def fresh_var(self, prefix: str = "V") -> Var:
        self._counter += 1
        return self.source.fresh(f"{prefix}{self._counter}")

    def var(self) -> Var:
        if self.vars and self.rng.random() < 0.6:
            return self.rng.choice(self.vars)
        v = self.fresh_var()
        self.vars.append(v)
        return v

    def term(self, depth: int = 2):
        roll = self.rng.random()
        if depth <= 0 or roll < 0.35:
            kind = self.rng.randrange(3)
            if kind == 0:
                return Atom(self.rng.choice(ATOM_POOL))
            if kind == 1:
                return IntConst(self.rng.randrange(0, 60))
            return self.var()
        if roll < 0.45:
            # time literal: hour, minutes with a two-digit width
            return Compound(":", (IntConst(self.rng.randrange(0, 24)),
                                  IntConst(self.rng.randrange(0, 60), width=2)))
        arity = self.rng.randrange(1, 4)
        return Compound(self.rng.choice(FUNCTOR_POOL),
                        tuple(self.term(depth - 1) for _ in range(arity)))

    def atom_goal(self, depth: int = 1) -> AtomGoal:
        arity = self.rng.randrange(0, 4)
        return AtomGoal(Atom(self.rng.choice(FUNCTOR_POOL)),
                        tuple(self.term(depth) for _ in range(arity)))

    def goal(self, depth: int = 3, interactive: bool = True):
        if depth <= 0:
            return self.atom_goal()
        roll = self.rng.random()
        if roll < 0.40:
            return self.atom_goal(depth - 1)
        if roll < 0.62:
            return Conj(self.goal(depth - 1, interactive), self.goal(depth - 1, interactive))
        if roll < 0.76 or not interactive:
            return self._binder(Exists, depth)
        if roll < 0.88:
            return self._binder(Read, depth)
        n = self.rng.randrange(2, 5)
        return Uchoose(tuple(self.goal(depth - 1, interactive) for _ in range(n)))

    def _binder(self, ctor, depth: int):
        binder = self.fresh_var("B")
        self.vars.append(binder)
        body = self.goal(depth - 1)
        self.vars.remove(binder)
        if binder not in goal_free_vars(body):
            body = Conj(AtomGoal(Atom("q"), (binder,)), body)
        return ctor(binder, body)

    def clause(self) -> Clause:
        head_arity = self.rng.randrange(0, 3)
        head = (Compound(self.rng.choice(FUNCTOR_POOL),
                         tuple(self.term(1) for _ in range(head_arity)))
                if head_arity else Atom(self.rng.choice(FUNCTOR_POOL)))
        body = self.goal(2) if self.rng.random() < 0.5 else None
        return Clause(head, body)

    def program(self) -> Program:
        self.vars = []
        clauses = []
        for _ in range(self.rng.randrange(0, 6)):
            self.vars = []  # clause scopes are independent
            clauses.append(self.clause())
        return Program(tuple(clauses))


# ---------------------------------------------------------------------------
# Random solvable programs: function-free, interaction-free, and recursion-
# free (each predicate's body only calls strictly lower-numbered predicates),
# so depth-first search always terminates and the bottom-up oracle applies.
# ---------------------------------------------------------------------------

class SolvableGen:
    def __init__(self, rng: random.Random, n_consts: int = 6, n_preds: int = 4,
                 max_clauses: int = 10) -> None:
        self.rng = rng
        self.consts = [Atom(name) for name in "abcdefgh"[:n_consts]]
        self.arities = [rng.randrange(0, 3) for _ in range(n_preds)]
        self.max_clauses = max_clauses
        self.source = VarSource(start=5000)

    def pred_name(self, i: int) -> str:
        return f"p{i}"

    def _args(self, arity: int, variables: list[Var]) -> tuple:
        out = []
        for _ in range(arity):
            if variables and self.rng.random() < 0.55:
                out.append(self.rng.choice(variables))
            else:
                out.append(self.rng.choice(self.consts))
        return tuple(out)

    def _head(self, i: int, variables: list[Var]):
        arity = self.arities[i]
        if arity == 0:
            return Atom(self.pred_name(i))
        return Compound(self.pred_name(i), self._args(arity, variables))

    def program(self) -> Program:
        clauses = []
        n_clauses = self.rng.randrange(1, self.max_clauses + 1)
        for _ in range(n_clauses):
            i = self.rng.randrange(len(self.arities))
            variables = [self.source.fresh(f"X{k}") for k in range(self.rng.randrange(0, 3))]
            head = self._head(i, variables)
            body = None
            if i > 0 and self.rng.random() < 0.6:
                n_atoms = self.rng.randrange(1, 3)
                atoms = []
                for _ in range(n_atoms):
                    j = self.rng.randrange(0, i)
                    arity = self.arities[j]
                    pred = Atom(self.pred_name(j))
                    atoms.append(AtomGoal(pred, self._args(arity, variables)))
                body = atoms[0]
                for extra in atoms[1:]:
                    body = Conj(body, extra)
            clauses.append(Clause(head, body))
        return Program(tuple(clauses))

    def query(self, i: int) -> AtomGoal:
        """Most general query for predicate i (all distinct variables)."""
        arity = self.arities[i]
        args = tuple(self.source.fresh(f"Q{k}") for k in range(arity))
        return AtomGoal(Atom(self.pred_name(i)), args)

    def partial_query(self, i: int, constants=None) -> AtomGoal:
        """Query with a random mix of constants and variables.

        Constants must come from the program's own universe, else a
        non-range-restricted clause lets the solver prove instances the
        least Herbrand model cannot mention."""
        pool = list(constants) if constants else self.consts
        arity = self.arities[i]
        args = []
        for k in range(arity):
            if self.rng.random() < 0.5:
                args.append(self.rng.choice(pool))
            else:
                args.append(self.source.fresh(f"Q{k}"))
        return AtomGoal(Atom(self.pred_name(i)), tuple(args))
