"""First-order terms, substitutions, and unification.

The term universe is small: variables, integer constants, atoms, and compound
terms with at least one argument (zero-arity symbols are atoms).  Variables
carry a (name, serial) identity so that renaming a clause apart never captures
query variables; serials come from a monotone VarSource.

Substitutions are finite maps from variables to terms.  Bindings are stored
in triangular form (a binding's term may mention other bound variables) and
`apply` resolves them all the way down, so applying a substitution is always
idempotent.  With the occurs check disabled, unification may produce a cyclic
binding like X -> f(X); such a substitution is still a value, but `apply`
raises CyclicTermError the moment materializing it would not terminate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union


class PrologiError(Exception):
    """Base class for all errors raised by this package."""


class CyclicTermError(PrologiError):
    """Applying a substitution would materialize an infinite term."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """A logic variable. Identity is (name, serial); the name is for display."""
    name: str
    serial: int


@dataclass(frozen=True)
class IntConst:
    """An integer constant.

    `width` remembers a leading-zero source spelling (e.g. `09` has width 2)
    so times like 09:35 render back byte-exactly.  It is a display hint only
    and takes no part in equality, hashing, or unification.
    """
    value: int
    width: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("compound terms need at least one argument; use Atom")


Term = Union[Var, IntConst, Atom, Compound]


def term_vars(term: Term) -> Iterator[Var]:
    """Yield the variables of `term` in left-to-right occurrence order."""
    if isinstance(term, Var):
        yield term
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_vars(arg)


def is_ground(term: Term) -> bool:
    return next(term_vars(term), None) is None


# ---------------------------------------------------------------------------
# Fresh variables
# ---------------------------------------------------------------------------

class VarSource:
    """Monotone source of fresh variable serials.

    One engine run must draw all its fresh variables from a single source so
    serials never collide.  The module-level GLOBAL_SOURCE is shared by the
    parser, the engine, and interaction handlers by default; sessions that
    want full isolation can pass their own instance everywhere.
    """

    def __init__(self, start: int = 1) -> None:
        self._counter = itertools.count(start)

    def fresh(self, name: str = "_G") -> Var:
        return Var(name, next(self._counter))


GLOBAL_SOURCE = VarSource()


def fresh_rename(term: Term, source: VarSource = GLOBAL_SOURCE,
                 mapping: Optional[dict[Var, Var]] = None) -> Term:
    """Replace every variable with a fresh-serial one, consistently.

    Sharing is preserved: two occurrences of the same variable map to the
    same fresh variable.  Ground terms come back unchanged (same object).
    An explicit `mapping` lets callers rename several terms consistently.
    """
    if mapping is None:
        mapping = {}

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            found = mapping.get(t)
            if found is None:
                found = source.fresh(t.name)
                mapping[t] = found
            return found
        if isinstance(t, Compound):
            args = tuple(walk(a) for a in t.args)
            if all(a is b for a, b in zip(args, t.args)):
                return t
            return Compound(t.functor, args)
        return t

    return walk(term)


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------

class Substitution:
    """A finite map Var -> Term.  Immutable; extending returns a new one."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Mapping[Var, Term]] = None) -> None:
        if bindings:
            self._bindings = {v: t for v, t in bindings.items() if t != v}
        else:
            self._bindings = {}

    def __bool__(self) -> bool:
        return bool(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __contains__(self, var: Var) -> bool:
        return var in self._bindings

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self._bindings == other._bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name}_{v.serial}->{t!r}" for v, t in self._bindings.items())
        return f"Substitution({{{inner}}})"

    def get(self, var: Var) -> Optional[Term]:
        return self._bindings.get(var)

    def items(self):
        return self._bindings.items()

    def bind(self, var: Var, term: Term) -> "Substitution":
        """Extend with one binding (raw; no resolution of existing ranges)."""
        if isinstance(term, Var) and term == var:
            return self
        new = dict(self._bindings)
        new[var] = term
        out = Substitution.__new__(Substitution)
        out._bindings = new
        return out

    def apply(self, term: Term) -> Term:
        """Replace every bound variable, resolving chains all the way down.

        Raises CyclicTermError if a binding cycle would materialize an
        infinite term (possible only when unification ran without the
        occurs check).
        """
        if not self._bindings:
            return term
        return self._resolve(term, set())

    def _resolve(self, term: Term, inflight: set[Var]) -> Term:
        if isinstance(term, Var):
            bound = self._bindings.get(term)
            if bound is None:
                return term
            if term in inflight:
                raise CyclicTermError(f"cyclic binding through {term.name}")
            inflight.add(term)
            try:
                return self._resolve(bound, inflight)
            finally:
                inflight.discard(term)
        if isinstance(term, Compound):
            args = tuple(self._resolve(a, inflight) for a in term.args)
            if all(a is b for a, b in zip(args, term.args)):
                return term
            return Compound(term.functor, args)
        return term

    def compose(self, other: "Substitution") -> "Substitution":
        """Sequencing: apply(self.compose(other), t) == other.apply(self.apply(t))."""
        if not other:
            return self
        if not self:
            return other
        new: dict[Var, Term] = {}
        for v, t in self._bindings.items():
            u = other.apply(t)
            if not (isinstance(u, Var) and u == v):
                new[v] = u
        for v, t in other._bindings.items():
            if v not in self._bindings:
                new[v] = t
        return Substitution(new)

    def restrict(self, variables) -> "Substitution":
        """Fully applied bindings for just `variables`; unbound ones drop out."""
        new: dict[Var, Term] = {}
        for v in variables:
            if v in self._bindings:
                t = self.apply(v)
                if not (isinstance(t, Var) and t == v):
                    new[v] = t
        return Substitution(new)


EMPTY_SUBST = Substitution()


# ---------------------------------------------------------------------------
# Unification
# ---------------------------------------------------------------------------

def _walk(term: Term, bindings: dict[Var, Term]) -> Term:
    # Shallow resolution: follow variable links, never descend into compounds.
    while isinstance(term, Var):
        bound = bindings.get(term)
        if bound is None:
            return term
        term = bound
    return term


def _occurs(var: Var, term: Term, bindings: dict[Var, Term]) -> bool:
    term = _walk(term, bindings)
    if isinstance(term, Var):
        return term == var
    if isinstance(term, Compound):
        return any(_occurs(var, a, bindings) for a in term.args)
    return False


def unify(t1: Term, t2: Term, occurs_check: bool = False) -> Optional[Substitution]:
    """Most general unifier of t1 and t2, or None if they do not unify.

    With occurs_check=False (the default, as in most Prologs) a variable may
    be bound to a term containing it; unification still terminates, and the
    cycle surfaces later as CyclicTermError if the binding is ever applied.
    """
    bindings: dict[Var, Term] = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, bindings)
        b = _walk(b, bindings)
        if a is b:
            continue
        if isinstance(a, Var):
            if isinstance(b, Var) and a == b:
                continue
            if occurs_check and _occurs(a, b, bindings):
                return None
            bindings[a] = b
        elif isinstance(b, Var):
            if occurs_check and _occurs(b, a, bindings):
                return None
            bindings[b] = a
        elif isinstance(a, Atom) and isinstance(b, Atom):
            if a.name != b.name:
                return None
        elif isinstance(a, IntConst) and isinstance(b, IntConst):
            if a.value != b.value:
                return None
        elif isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
        else:
            return None
    out = Substitution.__new__(Substitution)
    out._bindings = bindings
    return out
