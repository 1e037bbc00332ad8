"""Command-line entry point.

    prologi run PROGRAM --goal GOAL [--script FILE] [options]
    prologi repl PROGRAM [options]
    prologi serve [PROGRAM] [--protocol stdio|tcp:PORT] [options]

`run` prints each answer as `Var = term` lines (a lone `true` when nothing
was bound), a blank line after each answer, then `yes` or `no`.  Exit code
0 means at least one answer, 1 means none, 2 means any error (bad syntax,
script mismatch, missing file, ...).

The REPL prompts with `?- `; after a solution, `;` asks for the next one
and a bare newline stops.  A uchoose goal shows a numbered menu; a read
goal prompts `X? ` and re-prompts up to three times on unparseable input.

A program path that does not exist on disk is looked up among the bundled
corpus programs, so `prologi run restaurant.plg ...` works from anywhere.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .terms import GLOBAL_SOURCE, PrologiError, Term, VarSource
from .syntax import ParseError, Program, parse_goal, parse_program, parse_term
from .engine import (
    HandlerAbort,
    InteractionHandler,
    ScriptedHandler,
    SolveOptions,
    UserInputError,
    bindings_in_order,
    parse_script,
    solve,
)
from . import corpus
from . import protocol

MAX_INPUT_ATTEMPTS = 3


@dataclass
class CliConfig:
    mode: str                      # "run" | "repl" | "serve"
    program_path: Optional[str]
    goal_text: Optional[str] = None
    script_path: Optional[str] = None
    max_solutions: Optional[int] = None
    depth_limit: Optional[int] = None
    occurs_check: bool = False
    choice_policy: str = "fail"
    protocol: str = "stdio"

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            occurs_check=self.occurs_check,
            depth_limit=self.depth_limit,
            max_solutions=self.max_solutions,
            choice_policy=self.choice_policy,
        )


class ConsoleHandler(InteractionHandler):
    """Prompts on an output stream, reads replies from an input stream."""

    def __init__(self, input_stream: TextIO, output_stream: TextIO,
                 source: VarSource = GLOBAL_SOURCE) -> None:
        self.input = input_stream
        self.output = output_stream
        self.source = source

    def _ask(self, prompt: str) -> str:
        self.output.write(prompt)
        self.output.flush()
        line = self.input.readline()
        if line == "":
            raise HandlerAbort("end of input")
        return line.strip()

    def choose(self, alternatives: Sequence[str]) -> int:
        for i, alt in enumerate(alternatives, start=1):
            self.output.write(f"{i}) {alt}\n")
        for _ in range(MAX_INPUT_ATTEMPTS):
            reply = self._ask(f"Choice 1-{len(alternatives)}? ")
            if reply.isdigit() and 1 <= int(reply) <= len(alternatives):
                return int(reply)
            self.output.write(f"please type a number between 1 and {len(alternatives)}\n")
        raise UserInputError("no valid choice given")

    def read_term(self, variable_name: str) -> Term:
        for _ in range(MAX_INPUT_ATTEMPTS):
            reply = self._ask(f"{variable_name}? ")
            try:
                return parse_term(reply, self.source)
            except ParseError as e:
                self.output.write(f"cannot parse that term ({e}), try again\n")
        raise UserInputError(f"no valid term given for {variable_name}")


# ---------------------------------------------------------------------------
# Modes
# ---------------------------------------------------------------------------

def resolve_program_path(path_text: str) -> Path:
    path = Path(path_text)
    if path.exists():
        return path
    bundled = corpus.path(path.name)
    if bundled.exists() and path_text == path.name:
        return bundled
    raise FileNotFoundError(f"program file not found: {path_text}")


def load_program(path_text: str) -> Program:
    path = resolve_program_path(path_text)
    return parse_program(path.read_text(encoding="utf-8"))


def run_batch(config: CliConfig, out: TextIO) -> int:
    program = load_program(config.program_path or "")
    assert config.goal_text is not None
    goal = parse_goal(config.goal_text)
    script: list = []
    if config.script_path:
        script_text = Path(config.script_path).read_text(encoding="utf-8")
        script = parse_script(script_text)
    handler = ScriptedHandler(script)
    found = False
    for answer in solve(program, goal, handler, config.solve_options()):
        found = True
        pairs = bindings_in_order(answer)
        if pairs:
            for name, rendered in pairs:
                out.write(f"{name} = {rendered}\n")
        else:
            out.write("true\n")
        out.write("\n")
    out.write("yes\n" if found else "no\n")
    return 0 if found else 1


def run_repl(config: CliConfig, input_stream: TextIO, out: TextIO) -> int:
    program = load_program(config.program_path or "")
    handler = ConsoleHandler(input_stream, out)
    options = config.solve_options()
    while True:
        out.write("?- ")
        out.flush()
        line = input_stream.readline()
        if line == "":
            out.write("\n")
            return 0
        text = line.strip()
        if not text:
            continue
        if text in ("halt.", "halt"):
            return 0
        if text.endswith("."):
            text = text[:-1]
        try:
            goal = parse_goal(text)
        except ParseError as e:
            out.write(f"syntax error: {e}\n")
            continue
        try:
            _repl_solve(program, goal, handler, options, input_stream, out)
        except HandlerAbort:
            out.write("\n")
            return 0
        except RecursionError:
            out.write("error: proof search exceeded the recursion limit "
                      "(try --depth-limit)\n")
        except PrologiError as e:
            out.write(f"error: {e}\n")


def _repl_solve(program: Program, goal, handler: ConsoleHandler,
                options: SolveOptions, input_stream: TextIO, out: TextIO) -> None:
    found = False
    for answer in solve(program, goal, handler, options):
        found = True
        pairs = bindings_in_order(answer)
        if pairs:
            for name, rendered in pairs:
                out.write(f"{name} = {rendered}\n")
        else:
            out.write("true\n")
        out.write("; for more? ")
        out.flush()
        reply = input_stream.readline()
        if reply == "":
            raise HandlerAbort("end of input")
        if reply.strip() != ";":
            out.write("yes\n")
            return
    out.write("no\n")


def run_serve(config: CliConfig) -> int:
    program = None
    if config.program_path:
        program = load_program(config.program_path)
    options = config.solve_options()
    endpoint = config.protocol
    if endpoint == "stdio":
        protocol.serve_stdio(program, options)
        return 0
    if endpoint.startswith("tcp:"):
        port_text = endpoint[len("tcp:"):]
        if not port_text.isdigit():
            raise ValueError(f"invalid tcp port: {port_text!r}")
        protocol.serve_tcp(int(port_text), program, options)
        return 0
    raise ValueError(f"invalid --protocol value: {endpoint!r} (use stdio or tcp:PORT)")


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prologi",
        description="Horn-clause interpreter with interactive read/uchoose goals",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-solutions", type=int, metavar="N", default=None)
    common.add_argument("--depth-limit", type=int, metavar="N", default=None)
    common.add_argument("--occurs-check", action="store_true")
    common.add_argument("--choice-policy", choices=["fail", "retry"], default="fail")

    p_run = sub.add_parser("run", parents=[common],
                           help="solve one goal with scripted interactions")
    p_run.add_argument("program", help="program file (or bundled corpus name)")
    p_run.add_argument("--goal", required=True, help="goal text")
    p_run.add_argument("--script", default=None, help="interaction script file")

    p_repl = sub.add_parser("repl", parents=[common], help="interactive session")
    p_repl.add_argument("program", help="program file (or bundled corpus name)")

    p_serve = sub.add_parser("serve", parents=[common],
                             help="speak the line protocol over stdio or TCP")
    p_serve.add_argument("program", nargs="?", default=None,
                         help="program preloaded into each session")
    p_serve.add_argument("--goal", default=None, help=argparse.SUPPRESS)  # ignored
    p_serve.add_argument("--protocol", default="stdio", metavar="stdio|tcp:PORT")

    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        mode=args.mode,
        program_path=getattr(args, "program", None),
        goal_text=getattr(args, "goal", None),
        script_path=getattr(args, "script", None),
        max_solutions=args.max_solutions,
        depth_limit=args.depth_limit,
        occurs_check=args.occurs_check,
        choice_policy=args.choice_policy,
        protocol=getattr(args, "protocol", "stdio"),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    config = config_from_args(args)
    try:
        if config.mode == "run":
            return run_batch(config, sys.stdout)
        if config.mode == "repl":
            return run_repl(config, sys.stdin, sys.stdout)
        return run_serve(config)
    except KeyboardInterrupt:
        return 2
    except RecursionError:
        print("error: proof search or input nesting exceeded the recursion "
              "limit (try --depth-limit)", file=sys.stderr)
        return 2
    except (PrologiError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
