/**
 * Browser entry point.  Expects the ws<->tcp bridge (bridge.ts) in front
 * of a running `prologi serve --protocol tcp:PORT`.
 */

import { WebSocketLineTransport } from "./transport.js";
import { mountPlayground } from "./ui.js";

const DEFAULT_BRIDGE = `ws://${location.hostname || "127.0.0.1"}:8137`;

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  const url = new URLSearchParams(location.search).get("bridge") ?? DEFAULT_BRIDGE;
  const connect = () => WebSocketLineTransport.connect(url);
  try {
    const app = mountPlayground(root, await connect(), connect);
    app.elements.program.value = "% load a program, pose a goal, press Run\n";
    app.elements.goal.value = "";
  } catch (e) {
    root.textContent = `cannot connect to bridge at ${url}: ${(e as Error).message}`;
  }
}

void boot();
