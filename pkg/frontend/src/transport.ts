/**
 * Line transports.  The playground only ever sees newline-terminated
 * protocol lines; how they travel (WebSocket from a browser, raw TCP from
 * tests or tooling) is behind this interface.
 */

import { LineSplitter } from "./protocol.js";

export interface LineTransport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

/** Browser side of the ws<->tcp bridge (see bridge.ts). */
export class WebSocketLineTransport implements LineTransport {
  private splitter = new LineSplitter();
  private lineHandler: (line: string) => void = () => {};
  private closeHandler: () => void = () => {};

  constructor(private socket: WebSocket) {
    socket.addEventListener("message", (event) => {
      for (const line of this.splitter.push(String(event.data))) {
        this.lineHandler(line);
      }
    });
    socket.addEventListener("close", () => this.closeHandler());
    socket.addEventListener("error", () => this.closeHandler());
  }

  static connect(url: string): Promise<WebSocketLineTransport> {
    return new Promise((resolve, reject) => {
      const socket = new WebSocket(url);
      socket.addEventListener("open", () => resolve(new WebSocketLineTransport(socket)));
      socket.addEventListener("error", () => reject(new Error(`cannot reach ${url}`)));
    });
  }

  send(line: string): void {
    this.socket.send(line);
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }

  close(): void {
    this.socket.close();
  }
}

/** Direct TCP connection to `prologi serve --protocol tcp:PORT` (node only). */
export async function connectTcp(host: string, port: number): Promise<LineTransport> {
  const net = await import("node:net");
  const splitter = new LineSplitter();
  let lineHandler: (line: string) => void = () => {};
  let closeHandler: () => void = () => {};

  const socket: import("node:net").Socket = await new Promise((resolve, reject) => {
    const conn = net.createConnection({ host, port }, () => resolve(conn));
    conn.once("error", reject);
  });
  socket.setEncoding("utf-8");
  socket.on("data", (chunk: string) => {
    for (const line of splitter.push(chunk)) {
      lineHandler(line);
    }
  });
  socket.on("close", () => closeHandler());
  socket.on("error", () => closeHandler());

  return {
    send: (line) => socket.write(line),
    onLine: (handler) => {
      lineHandler = handler;
    },
    onClose: (handler) => {
      closeHandler = handler;
    },
    close: () => socket.end(),
  };
}
