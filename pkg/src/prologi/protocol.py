"""Line-delimited JSON session protocol.

One JSON object per line, UTF-8, newline-terminated, no pretty-printing.
A session serves one query at a time:

    client: {"type":"load","program":"price(h,3).\\n..."}
    client: {"type":"query","goal":"price(h,W)"}
    server: {"type":"solution","bindings":{"W":"3"}}
    server: {"type":"more"}
    client: {"type":"next"}            (or {"type":"stop"})
    server: {"type":"fail"}            (search exhausted)
    server: {"type":"done"}            (query over; session stays open)

While solving, the engine's interactive goals surface as requests that block
the search until the matching reply arrives:

    server: {"type":"choice","id":1,"alternatives":["...","..."]}
    client: {"type":"choose","id":1,"index":2}
    server: {"type":"read","id":2,"variable":"X"}
    client: {"type":"term","id":2,"text":"panam"}

Request ids are monotone within a session and each reply must echo the id of
the one outstanding request.  Protocol violations (malformed line, unknown
type, id mismatch, out-of-range index) produce an error message and abort
the current query; the session itself survives and accepts another query.
EOF tears the session down and cancels any running search.
"""

from __future__ import annotations

import json
import socketserver
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .terms import GLOBAL_SOURCE, PrologiError, Term, VarSource
from .syntax import EMPTY_PROGRAM, ParseError, Program, parse_goal, parse_program, parse_term
from .engine import EngineError, InteractionHandler, SolveOptions, bindings_in_order, solve


class ProtocolError(PrologiError):
    pass


class ProtocolDecodeError(ProtocolError):
    def __init__(self, message: str, offset: int = 0) -> None:
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


MESSAGE_TYPES = frozenset({
    "load", "query", "choice", "choose", "read", "term",
    "solution", "more", "next", "stop", "fail", "error", "done",
})

# type -> required payload fields with their expected shapes
_REQUIRED = {
    "load": ("program",),
    "query": ("goal",),
    "choice": ("id", "alternatives"),
    "choose": ("id", "index"),
    "read": ("id", "variable"),
    "term": ("id", "text"),
    "solution": ("bindings",),
    "error": ("message",),
    "more": (), "next": (), "stop": (), "fail": (), "done": (),
}


@dataclass(frozen=True, eq=True)
class ProtocolMessage:
    type: str
    id: Optional[int] = None
    program: Optional[str] = None
    goal: Optional[str] = None
    alternatives: Optional[tuple[str, ...]] = None
    variable: Optional[str] = None
    text: Optional[str] = None
    index: Optional[int] = None
    bindings: Optional[dict[str, str]] = None
    message: Optional[str] = None


def encode(msg: ProtocolMessage) -> str:
    """One compact JSON line (newline included)."""
    payload: dict = {"type": msg.type}
    if msg.id is not None:
        payload["id"] = msg.id
    if msg.program is not None:
        payload["program"] = msg.program
    if msg.goal is not None:
        payload["goal"] = msg.goal
    if msg.alternatives is not None:
        payload["alternatives"] = list(msg.alternatives)
    if msg.variable is not None:
        payload["variable"] = msg.variable
    if msg.text is not None:
        payload["text"] = msg.text
    if msg.index is not None:
        payload["index"] = msg.index
    if msg.bindings is not None:
        payload["bindings"] = msg.bindings
    if msg.message is not None:
        payload["message"] = msg.message
    return json.dumps(payload, separators=(",", ":")) + "\n"


def decode(line: str) -> ProtocolMessage:
    """Parse one line into a message.  Unknown payload fields are ignored;
    anything structurally wrong raises ProtocolDecodeError."""
    stripped = line.strip("\n").strip("\r")
    if not stripped.strip():
        raise ProtocolDecodeError("empty line", 0)
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError as e:
        raise ProtocolDecodeError(f"bad JSON: {e.msg}", e.pos) from None
    if not isinstance(obj, dict):
        raise ProtocolDecodeError("message must be a JSON object", 0)
    mtype = obj.get("type")
    if not isinstance(mtype, str) or mtype not in MESSAGE_TYPES:
        raise ProtocolDecodeError(f"unknown message type {mtype!r}", 0)

    def want(name, kinds, caster=None):
        value = obj.get(name)
        if not isinstance(value, kinds) or isinstance(value, bool):
            raise ProtocolDecodeError(f"{mtype}: field {name!r} missing or wrong type", 0)
        return caster(value) if caster else value

    fields: dict = {}
    required = _REQUIRED[mtype]
    if "id" in required:
        fields["id"] = want("id", int)
    if "program" in required:
        fields["program"] = want("program", str)
    if "goal" in required:
        fields["goal"] = want("goal", str)
    if "alternatives" in required:
        alts = want("alternatives", list)
        if not all(isinstance(a, str) for a in alts):
            raise ProtocolDecodeError("choice: alternatives must be strings", 0)
        fields["alternatives"] = tuple(alts)
    if "variable" in required:
        fields["variable"] = want("variable", str)
    if "text" in required:
        fields["text"] = want("text", str)
    if "index" in required:
        fields["index"] = want("index", int)
    if "bindings" in required:
        bindings = want("bindings", dict)
        if not all(isinstance(k, str) and isinstance(v, str) for k, v in bindings.items()):
            raise ProtocolDecodeError("solution: bindings must map strings to strings", 0)
        fields["bindings"] = dict(bindings)
    if "message" in required:
        fields["message"] = want("message", str)
    return ProtocolMessage(type=mtype, **fields)


# ---------------------------------------------------------------------------
# Session loop
# ---------------------------------------------------------------------------

class _SessionEof(Exception):
    pass


class _QueryAbort(Exception):
    """Protocol violation mid-query; the error message is already sent."""


class _StopQuery(Exception):
    """Client sent stop while the engine was waiting on an interaction."""


class _WireHandler(InteractionHandler):
    def __init__(self, session: "ProtocolSession") -> None:
        self.session = session

    def choose(self, alternatives: Sequence[str]) -> int:
        ses = self.session
        rid = ses.next_id()
        ses.send(ProtocolMessage("choice", id=rid, alternatives=tuple(alternatives)))
        reply = ses.await_reply("choose", rid)
        assert reply.index is not None
        if not 1 <= reply.index <= len(alternatives):
            raise ses.violation("index out of range")
        return reply.index

    def read_term(self, variable_name: str) -> Term:
        ses = self.session
        rid = ses.next_id()
        ses.send(ProtocolMessage("read", id=rid, variable=variable_name))
        reply = ses.await_reply("term", rid)
        assert reply.text is not None
        try:
            return parse_term(reply.text, ses.source)
        except ParseError as e:
            raise ses.violation(f"unparseable term: {e}")


class ProtocolSession:
    """One client connection: sequential load/query exchanges until EOF."""

    def __init__(self, reader: TextIO, writer: TextIO,
                 program: Optional[Program] = None,
                 options: Optional[SolveOptions] = None,
                 source: VarSource = GLOBAL_SOURCE) -> None:
        self.reader = reader
        self.writer = writer
        self.program = program if program is not None else EMPTY_PROGRAM
        self.options = options
        self.source = source
        self._id = 0

    # -- plumbing ------------------------------------------------------------

    def next_id(self) -> int:
        self._id += 1
        return self._id

    def send(self, msg: ProtocolMessage) -> None:
        self.writer.write(encode(msg))
        self.writer.flush()

    def send_error(self, message: str) -> None:
        self.send(ProtocolMessage("error", message=message))

    def violation(self, message: str) -> _QueryAbort:
        self.send_error(message)
        return _QueryAbort()

    def read_message(self) -> ProtocolMessage:
        line = self.reader.readline()
        if line == "":
            raise _SessionEof()
        return decode(line)

    def await_reply(self, expected_type: str, rid: int) -> ProtocolMessage:
        try:
            msg = self.read_message()
        except ProtocolDecodeError as e:
            raise self.violation(str(e))
        if msg.type == "stop":
            raise _StopQuery()
        if msg.type != expected_type:
            raise self.violation(f"expected {expected_type}, got {msg.type}")
        if msg.id != rid:
            raise self.violation(f"id mismatch: expected {rid}, got {msg.id}")
        return msg

    # -- session loop ----------------------------------------------------------

    def run(self) -> None:
        while True:
            try:
                msg = self.read_message()
            except _SessionEof:
                return
            except ProtocolDecodeError as e:
                self.send_error(str(e))
                continue
            if msg.type == "load":
                assert msg.program is not None
                try:
                    self.program = parse_program(msg.program, self.source)
                except (ParseError, RecursionError) as e:
                    self.send_error(f"program: {e}")
            elif msg.type == "query":
                try:
                    self.run_query(msg.goal or "")
                except _SessionEof:
                    return
            else:
                self.send_error(f"unexpected message {msg.type}")

    def run_query(self, goal_text: str) -> None:
        try:
            goal = parse_goal(goal_text, self.source)
        except (ParseError, RecursionError) as e:
            self.send_error(f"goal: {e}")
            return
        run = solve(self.program, goal, _WireHandler(self), self.options, self.source)
        answers = iter(run)
        try:
            while True:
                try:
                    answer = next(answers)
                except StopIteration:
                    self.send(ProtocolMessage("fail"))
                    break
                bindings = dict(bindings_in_order(answer))
                self.send(ProtocolMessage("solution", bindings=bindings))
                self.send(ProtocolMessage("more"))
                try:
                    reply = self.read_message()
                except ProtocolDecodeError as e:
                    raise self.violation(str(e))
                if reply.type == "stop":
                    break
                if reply.type != "next":
                    raise self.violation(f"expected next or stop, got {reply.type}")
        except (_QueryAbort, _StopQuery):
            pass
        except EngineError as e:
            self.send_error(str(e))
        except RecursionError:
            self.send_error("proof search exceeded the recursion limit")
        finally:
            answers.close()
        self.send(ProtocolMessage("done"))


def serve(reader: TextIO, writer: TextIO, program: Optional[Program] = None,
          options: Optional[SolveOptions] = None,
          source: VarSource = GLOBAL_SOURCE) -> None:
    """Run one session over a pair of line-oriented text streams."""
    ProtocolSession(reader, writer, program, options, source).run()


def serve_stdio(program: Optional[Program] = None,
                options: Optional[SolveOptions] = None) -> None:
    serve(sys.stdin, sys.stdout, program, options)


class _SessionTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, program, options):
        self.session_program = program
        self.session_options = options
        super().__init__(address, _SessionRequestHandler)


class _SessionRequestHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        text_in = _utf8_reader(self.rfile)
        text_out = _utf8_writer(self.wfile)
        server: _SessionTCPServer = self.server  # type: ignore[assignment]
        try:
            serve(text_in, text_out, server.session_program, server.session_options)
        except (BrokenPipeError, ConnectionResetError):
            pass


def _utf8_reader(binary) -> TextIO:
    import io
    return io.TextIOWrapper(binary, encoding="utf-8", newline="\n")


def _utf8_writer(binary) -> TextIO:
    import io
    return io.TextIOWrapper(binary, encoding="utf-8", newline="\n", write_through=True)


def serve_tcp(port: int, program: Optional[Program] = None,
              options: Optional[SolveOptions] = None,
              host: str = "127.0.0.1") -> None:
    """Accept connections forever, one session per connection."""
    with _SessionTCPServer((host, port), program, options) as server:
        server.serve_forever()


def make_tcp_server(port: int, program: Optional[Program] = None,
                    options: Optional[SolveOptions] = None,
                    host: str = "127.0.0.1") -> socketserver.TCPServer:
    """Server object for callers that manage the accept loop themselves
    (tests, embedding); use .serve_forever() / .shutdown()."""
    return _SessionTCPServer((host, port), program, options)
