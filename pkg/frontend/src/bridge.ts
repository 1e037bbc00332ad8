/**
 * WebSocket-to-TCP bridge: browsers cannot open raw sockets, so each
 * WebSocket connection is piped to its own TCP connection against
 * `prologi serve --protocol tcp:PORT` (one engine session per tab).
 *
 *   node dist/bridge.js [ws-port] [tcp-host] [tcp-port]
 */

import net from "node:net";
import { WebSocketServer, WebSocket } from "ws";

const wsPort = Number(process.argv[2] ?? 8137);
const tcpHost = process.argv[3] ?? "127.0.0.1";
const tcpPort = Number(process.argv[4] ?? 7070);

const server = new WebSocketServer({ port: wsPort });

server.on("connection", (browser: WebSocket) => {
  const engine = net.createConnection({ host: tcpHost, port: tcpPort });
  engine.setEncoding("utf-8");
  engine.on("data", (chunk: string) => browser.send(chunk));
  engine.on("close", () => browser.close());
  engine.on("error", () => browser.close());
  browser.on("message", (data) => engine.write(String(data)));
  browser.on("close", () => engine.end());
  browser.on("error", () => engine.end());
});

console.log(`bridge: ws://0.0.0.0:${wsPort} -> tcp://${tcpHost}:${tcpPort}`);
