"""Solver tests: goal reduction, backchaining, interactions, commitment."""

import pytest

from prologi import (
    Atom,
    ScriptedHandler,
    SolveOptions,
    Substitution,
    apply_to_goal,
    bindings_in_order,
    handler_from_transcript,
    make_scripted_handler,
    parse_goal,
    parse_program,
    parse_script,
    solve,
)
from prologi.engine import (
    ChoiceEvent,
    ChoiceOutOfRange,
    HandlerAbort,
    InstantiationError,
    ReadEvent,
    ScriptError,
    ScriptExhausted,
    ScriptMismatch,
)
from prologi import corpus

MENU = parse_program(corpus.RESTAURANT.read_text())
FLIGHTS = parse_program(corpus.FLIGHTS.read_text())


def answers(program, goal_text, script=None, **opts):
    """Rendered (name, value) binding lists for every answer."""
    goal = parse_goal(goal_text)
    handler = ScriptedHandler(script) if script is not None else None
    options = SolveOptions(**opts) if opts else None
    return [bindings_in_order(a) for a in solve(program, goal, handler, options)]


class TestBackchain:
    def test_fact_gives_binding(self):
        assert answers(MENU, "price(h,W)") == [[("W", "3")]]

    def test_ground_identity(self):
        # the degenerate clause-matches-atom-exactly case
        prog = parse_program("p(a).")
        assert answers(prog, "p(a)") == [[]]

    def test_no_head_unifies(self):
        assert answers(MENU, "price(x,W)") == []

    def test_rule_body_obligation(self):
        prog = parse_program("p :- q. q.")
        assert answers(prog, "p") == [[]]

    def test_textual_order(self):
        assert answers(MENU, "price(K,W)") == [
            [("K", "h"), ("W", "3")],
            [("K", "f"), ("W", "4")],
            [("K", "o"), ("W", "1")],
            [("K", "c"), ("W", "2")],
        ]

    def test_renaming_avoids_capture(self):
        prog = parse_program("eq(X,X). both(Y) :- eq(Y,a), eq(Y,Y).")
        assert answers(prog, "both(V)") == [[("V", "a")]]

    def test_shared_head_variables(self):
        prog = parse_program("pair(X,X).")
        [only] = answers(prog, "pair(a,B)")
        assert only == [("B", "a")]


class TestGoalReduction:
    def test_conjunction_threads_bindings(self):
        assert answers(MENU, "price(h,W), price(o,Z)") == [[("W", "3"), ("Z", "1")]]

    def test_conjunction_backtracks_left(self):
        prog = parse_program("p(a). p(b). q(b).")
        assert answers(prog, "p(X), q(X)") == [[("X", "b")]]

    def test_exists_enumerates_in_fact_order(self):
        # exists hides X; W runs over the fact prices in textual order
        assert answers(MENU, "exists(X, price(X,W))") == [
            [("W", "3")], [("W", "4")], [("W", "1")], [("W", "2")],
        ]

    def test_exists_binder_not_reported(self):
        goal = parse_goal("exists(X, price(X,W))")
        run = solve(MENU, goal)
        first = next(iter(run))
        assert [v.name for v in first.variables] == ["W"]


class TestReadGoal:
    def test_scripted_menu_reads(self):
        # read f then read c: price(f,W), price(c,Z) gives 4 and 2
        assert answers(MENU, corpus.RESTAURANT_READ_GOAL,
                       ["read f", "read c"]) == [[("W", "4"), ("Z", "2")]]

    def test_flex_second_order_read(self):
        assert answers(FLIGHTS, corpus.FLIGHTS_READ_GOAL, ["read panam"]) == [
            [("Dt", "9:00"), ("At", "10:50")],
        ]

    def test_read_equivalent_to_substitution(self):
        goal = parse_goal("read(X, price(X,W))")
        scripted = [bindings_in_order(a)
                    for a in solve(MENU, goal, ScriptedHandler(["read h"]))]
        substituted = apply_to_goal(Substitution({goal.var: Atom("h")}), goal.body)
        direct = [bindings_in_order(a) for a in solve(MENU, substituted)]
        assert scripted == direct == [[("W", "3")]]

    def test_read_equivalence_randomized(self):
        # scripted read of a ground term behaves exactly like substituting it
        import random
        from prologi import Read
        from helpers import SolvableGen
        rng = random.Random(99)
        for _ in range(300):
            gen = SolvableGen(rng, n_consts=rng.randrange(2, 7),
                              n_preds=rng.randrange(1, 4))
            program = gen.program()
            arities = [i for i, a in enumerate(gen.arities) if a >= 1]
            if not arities:
                continue
            query = gen.query(rng.choice(arities))
            binder = query.args[0]
            reply = rng.choice(gen.consts)
            via_read = [bindings_in_order(a) for a in
                        solve(program, Read(binder, query),
                              ScriptedHandler([f"read {reply.name}"]))]
            substituted = apply_to_goal(Substitution({binder: reply}), query)
            direct = [bindings_in_order(a) for a in solve(program, substituted)]
            assert via_read == direct

    def test_read_reply_with_variable_is_fresh(self):
        # the user may answer with a variable; it unifies like any term
        assert answers(MENU, "read(X, price(X,W))", ["read Anything"]) == [
            [("W", "3")], [("W", "4")], [("W", "1")], [("W", "2")],
        ]

    def test_transcript_records_reads(self):
        goal = parse_goal(corpus.RESTAURANT_READ_GOAL)
        run = solve(MENU, goal, ScriptedHandler(["read h", "read o"]))
        answer = next(iter(run))
        assert answer.transcript == (ReadEvent("X", "h"), ReadEvent("Y", "o"))


class TestUchoose:
    def test_choice_1(self):
        assert answers(MENU, corpus.RESTAURANT_UCHOOSE_GOAL, ["choose 1"]) == [
            [("W", "3"), ("Z", "1")],
        ]

    def test_choice_3(self):
        # alternative 3 is price(h,W), price(c,Z): 3 and 2
        assert answers(MENU, corpus.RESTAURANT_UCHOOSE_GOAL, ["choose 3"]) == [
            [("W", "3"), ("Z", "2")],
        ]

    def test_flights_choice_2(self):
        assert answers(FLIGHTS, corpus.FLIGHTS_UCHOOSE_GOAL, ["choose 2"]) == [
            [("Dt", "8:40"), ("At", "09:35")],
        ]

    def test_menu_rendering_instantiated(self):
        prog = parse_program("p(a). q(a,1). r(a,2).")
        goal = parse_goal("p(X), uchoose(q(X,N), r(X,N))")
        run = solve(prog, goal, ScriptedHandler(["choose 2"]))
        [answer] = list(run)
        assert answer.transcript[0].alternatives == ("q(a,N)", "r(a,N)")
        assert bindings_in_order(answer) == [("X", "a"), ("N", "2")]

    def test_equivalent_to_chosen_alternative(self):
        for i in (1, 2, 3, 4):
            chosen = answers(MENU, corpus.RESTAURANT_UCHOOSE_GOAL, [f"choose {i}"])
            direct_goal = parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL).alternatives[i - 1]
            direct = [bindings_in_order(a) for a in solve(MENU, direct_goal)]
            assert chosen == direct

    def test_multiple_solutions_inside_chosen_branch(self):
        prog = parse_program("p(a). p(b). q(z).")
        assert answers(prog, "uchoose(p(X), q(X))", ["choose 1"]) == [
            [("X", "a")], [("X", "b")],
        ]

    def test_uchoose_in_clause_body(self):
        prog = parse_program(
            "order(W,Z) :- uchoose((price(h,W), price(o,Z)), (price(f,W), price(c,Z))).\n"
            + corpus.RESTAURANT.read_text())
        assert answers(prog, "order(W,Z)", ["choose 2"]) == [[("W", "4"), ("Z", "2")]]

    def test_nested_read_then_uchoose(self):
        goal = parse_goal("read(K, uchoose(price(K,W), price(c,W)))")
        run = solve(MENU, goal, ScriptedHandler(["read f", "choose 1"]))
        [answer] = list(run)
        assert bindings_in_order(answer) == [("W", "4")]
        assert answer.transcript[0] == ReadEvent("K", "f")
        # the menu was rendered after the read bound K
        assert answer.transcript[1].alternatives == ("price(f,W)", "price(c,W)")
        assert answer.transcript[1].index == 1


class TestCommitment:
    def test_fail_policy_fails_whole_uchoose(self):
        prog = parse_program("p(a).")
        assert answers(prog, "uchoose(p(b), p(a))", ["choose 1"]) == []

    def test_retry_policy_reprompts_remaining(self):
        prog = parse_program("p(a).")
        goal = parse_goal("uchoose(p(b), p(a))")
        run = solve(prog, goal, ScriptedHandler(["choose 1", "choose 1"]),
                    SolveOptions(choice_policy="retry"))
        [answer] = list(run)
        assert bindings_in_order(answer) == []
        assert answer.transcript == (
            ChoiceEvent(("p(b)", "p(a)"), 1),
            ChoiceEvent(("p(a)",), 1),
        )

    def test_retry_policy_exhausts_all(self):
        prog = parse_program("q(z).")
        goal = parse_goal("uchoose(p(a), p(b))")
        run = solve(prog, goal, ScriptedHandler(["choose 2", "choose 1"]),
                    SolveOptions(choice_policy="retry"))
        assert list(run) == []

    def test_backtracking_does_not_reprompt_read(self):
        # two pick alternatives, but the read is consumed under the first;
        # re-entering it after backtracking fails that branch
        prog = parse_program("pick(a). pick(b). ok(a).")
        goal = parse_goal("pick(V), read(T, ok(T))")
        script = ScriptedHandler(["read a"])
        result = [bindings_in_order(a) for a in solve(prog, goal, script)]
        assert result == [[("V", "a")]]
        assert script.pos == 1

    def test_backtracking_does_not_reprompt_uchoose(self):
        prog = parse_program("pick(a). pick(b). ok(a).")
        goal = parse_goal("pick(V), uchoose(ok(V), ok(V))")
        script = ScriptedHandler(["choose 1"])
        result = [bindings_in_order(a) for a in solve(prog, goal, script)]
        assert result == [[("V", "a")]]
        assert script.pos == 1

    def test_clause_invocations_prompt_independently(self):
        # each invocation of ask is a fresh dynamic occurrence of its read
        prog = parse_program("ask :- read(X, ok(X)). ok(a). ok(b).")
        script = ScriptedHandler(["read a", "read b"])
        result = [bindings_in_order(a) for a in solve(prog, parse_goal("ask, ask"), script)]
        assert result == [[]]
        assert script.pos == 2


class TestScriptedHandler:
    def test_parse_script(self):
        text = "# comment\nchoose 3\n\nread panam\n"
        assert parse_script(text) == [("choose", "3"), ("read", "panam")]

    def test_bad_directive(self):
        with pytest.raises(ScriptError):
            parse_script("pick 1")
        with pytest.raises(ScriptError):
            parse_script("choose x")

    def test_out_of_range_choice(self):
        with pytest.raises(ChoiceOutOfRange):
            list(solve(MENU, parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL),
                       ScriptedHandler(["choose 5"])))

    def test_script_exhausted(self):
        with pytest.raises(ScriptExhausted):
            list(solve(MENU, parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL),
                       ScriptedHandler([])))

    def test_script_mismatch(self):
        with pytest.raises(ScriptMismatch):
            list(solve(MENU, parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL),
                       ScriptedHandler(["read h"])))

    def test_make_scripted_handler_accepts_pairs(self):
        handler = make_scripted_handler([("choose", "2")])
        goal = parse_goal(corpus.FLIGHTS_UCHOOSE_GOAL)
        [answer] = list(solve(FLIGHTS, goal, handler))
        assert bindings_in_order(answer) == [("Dt", "8:40"), ("At", "09:35")]


class TestFlexGoals:
    PROG = parse_program("try(P) :- P(a). ok(a). nope(b).")

    def test_flex_head_bound_by_unification(self):
        # the predicate variable arrives through the clause head, not read
        assert answers(self.PROG, "try(ok)") == [[]]

    def test_flex_head_bound_to_wrong_predicate(self):
        assert answers(self.PROG, "try(nope)") == []

    def test_flex_head_left_unbound_by_caller(self):
        with pytest.raises(InstantiationError):
            list(solve(self.PROG, parse_goal("try(Q)")))


class TestErrors:
    def test_unbound_flex_head(self):
        with pytest.raises(InstantiationError):
            list(solve(FLIGHTS, parse_goal("X(paris,nice,Dt,At)")))

    def test_flex_head_bound_to_non_atom(self):
        goal = parse_goal("read(X, X(paris,nice,Dt,At))")
        with pytest.raises(InstantiationError):
            list(solve(FLIGHTS, goal, ScriptedHandler(["read 9"])))

    def test_no_handler_aborts_interaction(self):
        with pytest.raises(HandlerAbort):
            list(solve(MENU, parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL)))

    def test_options_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(depth_limit=0)
        with pytest.raises(ValueError):
            SolveOptions(max_solutions=0)
        with pytest.raises(ValueError):
            SolveOptions(choice_policy="ask-twice")


class TestSearchControl:
    RECURSIVE = parse_program("n(z). n(s(X)) :- n(X).")

    def test_depth_limit_truncates(self):
        run = solve(self.RECURSIVE, parse_goal("n(Y)"),
                    options=SolveOptions(depth_limit=4))
        results = [bindings_in_order(a) for a in run]
        assert run.truncated
        assert results[0] == [("Y", "z")]
        assert 1 <= len(results) < 10

    def test_depth_limit_monotone(self):
        def at_depth(d):
            run = solve(self.RECURSIVE, parse_goal("n(Y)"),
                        options=SolveOptions(depth_limit=d))
            return {repr(bindings_in_order(a)) for a in run}

        shallow, deep = at_depth(3), at_depth(6)
        assert shallow <= deep
        assert len(deep) > len(shallow)

    def test_max_solutions(self):
        run = solve(self.RECURSIVE, parse_goal("n(Y)"),
                    options=SolveOptions(max_solutions=5))
        assert len(list(run)) == 5

    def test_no_depth_limit_flag_untruncated(self):
        run = solve(MENU, parse_goal("price(h,W)"))
        list(run)
        assert not run.truncated

    def test_occurs_check_option(self):
        prog = parse_program("weird :- eq(X, f(X)). eq(Y,Y).")
        assert answers(prog, "weird") == [[]]  # cyclic binding never materialized
        assert answers(prog, "weird", occurs_check=True) == []


class TestDeterminism:
    def test_identical_runs(self):
        def one_run():
            goal = parse_goal(corpus.RESTAURANT_UCHOOSE_GOAL)
            run = solve(MENU, goal, ScriptedHandler(["choose 4"]))
            return [(bindings_in_order(a), a.transcript) for a in run]

        assert one_run() == one_run()

    def test_answer_soundness_via_transcript_replay(self):
        cases = [
            (MENU, corpus.RESTAURANT_UCHOOSE_GOAL, ["choose 2"]),
            (MENU, corpus.RESTAURANT_READ_GOAL, ["read h", "read c"]),
            (FLIGHTS, corpus.FLIGHTS_READ_GOAL, ["read panam"]),
            (FLIGHTS, corpus.FLIGHTS_UCHOOSE_GOAL, ["choose 1"]),
        ]
        for program, goal_text, script in cases:
            goal = parse_goal(goal_text)
            [answer] = list(solve(program, goal, ScriptedHandler(script)))
            instantiated = apply_to_goal(answer.bindings, goal)
            replay = solve(program, instantiated, handler_from_transcript(answer.transcript))
            first = next(iter(replay))
            assert len(first.bindings) == 0
