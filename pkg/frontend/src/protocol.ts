/**
 * Wire protocol: one JSON object per newline-terminated line, UTF-8.
 *
 * The engine sends `choice` and `read` requests while solving; the client
 * answers with `choose`/`term` echoing the request id.  Solutions stream
 * back one at a time behind `more`, pulled with `next` and ended with
 * `stop`.  `fail` means no (further) answer, `done` closes the query, and
 * `error` reports a protocol violation that aborted it.
 */

export interface ChoiceRequest {
  type: "choice";
  id: number;
  alternatives: string[];
}

export interface ReadRequest {
  type: "read";
  id: number;
  variable: string;
}

export interface Solution {
  type: "solution";
  bindings: Record<string, string>;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export interface Plain {
  type: "more" | "fail" | "done";
}

export type ServerMessage = ChoiceRequest | ReadRequest | Solution | ErrorMessage | Plain;

export type ClientMessage =
  | { type: "load"; program: string }
  | { type: "query"; goal: string }
  | { type: "choose"; id: number; index: number }
  | { type: "term"; id: number; text: string }
  | { type: "next" }
  | { type: "stop" };

export function encodeClient(message: ClientMessage): string {
  return JSON.stringify(message) + "\n";
}

export class ProtocolDecodeError extends Error {}

function fail(reason: string): never {
  throw new ProtocolDecodeError(reason);
}

export function decodeServer(line: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (e) {
    fail(`bad JSON: ${(e as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    fail("message must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  switch (obj.type) {
    case "choice": {
      const { id, alternatives } = obj;
      if (typeof id !== "number") fail("choice: missing id");
      if (!Array.isArray(alternatives) || !alternatives.every((a) => typeof a === "string")) {
        fail("choice: alternatives must be strings");
      }
      return { type: "choice", id, alternatives: alternatives as string[] };
    }
    case "read": {
      const { id, variable } = obj;
      if (typeof id !== "number") fail("read: missing id");
      if (typeof variable !== "string") fail("read: missing variable");
      return { type: "read", id, variable };
    }
    case "solution": {
      const bindings = obj.bindings;
      if (typeof bindings !== "object" || bindings === null || Array.isArray(bindings)) {
        fail("solution: missing bindings");
      }
      for (const value of Object.values(bindings as Record<string, unknown>)) {
        if (typeof value !== "string") fail("solution: bindings must be strings");
      }
      return { type: "solution", bindings: bindings as Record<string, string> };
    }
    case "error": {
      if (typeof obj.message !== "string") fail("error: missing message");
      return { type: "error", message: obj.message };
    }
    case "more":
    case "fail":
    case "done":
      return { type: obj.type };
    default:
      fail(`unknown message type ${JSON.stringify(obj.type)}`);
  }
}

/** Reassembles newline-terminated lines from arbitrary stream chunks. */
export class LineSplitter {
  private buffer = "";

  push(chunk: string): string[] {
    this.buffer += chunk;
    const lines = this.buffer.split("\n");
    this.buffer = lines.pop() ?? "";
    return lines.filter((line) => line.length > 0);
  }
}
