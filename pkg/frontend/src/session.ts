/**
 * Playground session state machine.
 *
 * Pure protocol client: it never re-implements any solving.  Every
 * displayed alternative and binding is stored verbatim from a received
 * payload, and each reply echoes the id of the one pending request.
 */

import {
  ClientMessage,
  ProtocolDecodeError,
  ServerMessage,
  decodeServer,
  encodeClient,
} from "./protocol.js";
import { LineTransport } from "./transport.js";

export type Status = "idle" | "running" | "awaiting-user" | "done" | "failed" | "error";

export type PendingRequest =
  | { kind: "choice"; id: number; alternatives: string[] }
  | { kind: "read"; id: number; variable: string }
  | null;

export interface LogEntry {
  direction: "sent" | "received";
  line: string; // raw wire line, newline stripped
}

export class PlaygroundSession {
  status: Status = "idle";
  pending: PendingRequest = null;
  /** One entry per solution, binding values byte-equal to the wire. */
  answers: Array<Record<string, string>> = [];
  eventLog: LogEntry[] = [];
  /** True between a `more` and the user's next/stop decision. */
  awaitingMore = false;
  lastError: string | null = null;
  private closed = false;

  constructor(
    private transport: LineTransport,
    private onChange: (session: PlaygroundSession) => void = () => {},
  ) {
    transport.onLine((line) => this.receive(line));
    transport.onClose(() => {
      if (this.closed) {
        return;
      }
      if (this.status !== "done" && this.status !== "failed") {
        this.status = "error";
        this.lastError = "connection lost";
      }
      this.onChange(this);
    });
  }

  /** Send the editors' contents: load the program, then pose the goal. */
  start(programText: string, goalText: string): void {
    this.answers = [];
    this.pending = null;
    this.awaitingMore = false;
    this.lastError = null;
    this.status = "running";
    this.sendMessage({ type: "load", program: programText });
    this.sendMessage({ type: "query", goal: goalText });
    this.onChange(this);
  }

  /** Answer the pending choice with a 1-based index. */
  choose(index: number): void {
    if (this.pending?.kind !== "choice") {
      throw new Error("no pending choice");
    }
    if (index < 1 || index > this.pending.alternatives.length) {
      throw new Error(`index ${index} out of range`);
    }
    const id = this.pending.id;
    this.pending = null;
    this.status = "running";
    this.sendMessage({ type: "choose", id, index });
    this.onChange(this);
  }

  /** Answer the pending read prompt with term text. */
  submitRead(text: string): void {
    if (this.pending?.kind !== "read") {
      throw new Error("no pending read");
    }
    const id = this.pending.id;
    this.pending = null;
    this.status = "running";
    this.sendMessage({ type: "term", id, text });
    this.onChange(this);
  }

  next(): void {
    if (!this.awaitingMore) return;
    this.awaitingMore = false;
    this.status = "running";
    this.sendMessage({ type: "next" });
    this.onChange(this);
  }

  stop(): void {
    if (!this.awaitingMore) return;
    this.awaitingMore = false;
    this.sendMessage({ type: "stop" });
    this.onChange(this);
  }

  /** Stop reacting to the transport and close it; the session goes inert. */
  close(): void {
    this.closed = true;
    this.transport.close();
  }

  private sendMessage(message: ClientMessage): void {
    const line = encodeClient(message);
    this.eventLog.push({ direction: "sent", line: line.trimEnd() });
    this.transport.send(line);
  }

  private receive(line: string): void {
    if (this.closed) {
      return;
    }
    this.eventLog.push({ direction: "received", line });
    let message: ServerMessage;
    try {
      message = decodeServer(line);
    } catch (e) {
      if (e instanceof ProtocolDecodeError) {
        this.status = "error";
        this.lastError = e.message;
        this.onChange(this);
        return;
      }
      throw e;
    }
    this.apply(message);
    this.onChange(this);
  }

  private apply(message: ServerMessage): void {
    switch (message.type) {
      case "choice":
        this.pending = {
          kind: "choice",
          id: message.id,
          alternatives: message.alternatives,
        };
        this.status = "awaiting-user";
        break;
      case "read":
        this.pending = { kind: "read", id: message.id, variable: message.variable };
        this.status = "awaiting-user";
        break;
      case "solution":
        this.answers = [...this.answers, message.bindings];
        break;
      case "more":
        this.awaitingMore = true;
        this.status = "awaiting-user";
        break;
      case "fail":
        this.status = this.answers.length > 0 ? "done" : "failed";
        break;
      case "error":
        this.status = "error";
        this.lastError = message.message;
        break;
      case "done":
        if (this.status !== "error" && this.status !== "failed") {
          this.status = "done";
        }
        this.pending = null;
        this.awaitingMore = false;
        break;
    }
  }
}

/**
 * Rows for one solution's binding table: [variable, rendered term] pairs,
 * values verbatim from the wire; an empty answer is the single row "true".
 */
export function renderAnswerRows(bindings: Record<string, string>): Array<[string, string]> {
  const entries = Object.entries(bindings);
  if (entries.length === 0) {
    return [["true", ""]];
  }
  return entries;
}
