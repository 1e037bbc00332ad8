"""prologi: a Horn-clause interpreter whose goals can consult the user.

Beyond facts, rules, conjunction, and existentials, two goal forms interact
with a human: `read(X, G)` binds X to a term the user types in, and
`uchoose(G1, ..., Gn)` has the user pick exactly one alternative to prove.
Interaction is pluggable (scripted, console, or line-protocol clients), so
the same derivations replay deterministically in tests.
"""

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
    fresh_rename,
    unify,
)
from .syntax import (
    AtomGoal,
    Clause,
    Conj,
    Exists,
    Goal,
    ParseError,
    Program,
    Read,
    Uchoose,
    apply_to_goal,
    goal_free_vars,
    parse_goal,
    parse_program,
    parse_term,
    rename_apart,
    render,
)
from .engine import (
    Answer,
    ChoiceEvent,
    InteractionHandler,
    ReadEvent,
    ScriptedHandler,
    SolveOptions,
    SolveRun,
    bindings_in_order,
    fixpoint_oracle,
    handler_from_transcript,
    make_scripted_handler,
    parse_script,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Answer", "Atom", "AtomGoal", "ChoiceEvent", "Clause", "Compound", "Conj",
    "CyclicTermError", "EMPTY_SUBST", "Exists", "GLOBAL_SOURCE", "Goal",
    "IntConst", "InteractionHandler", "ParseError", "Program", "PrologiError",
    "Read", "ReadEvent", "ScriptedHandler", "SolveOptions", "SolveRun",
    "Substitution", "Term", "Uchoose", "Var", "VarSource", "apply_to_goal",
    "bindings_in_order", "fixpoint_oracle", "fresh_rename", "goal_free_vars",
    "handler_from_transcript", "make_scripted_handler", "parse_goal",
    "parse_program", "parse_script", "parse_term", "rename_apart", "render",
    "solve", "unify",
]
