/**
 * DOM playground: program/goal editors, a run button, the engine's
 * prompts (choice menus as numbered buttons, read prompts as an input
 * field), streamed solutions as binding tables, and a raw event log.
 *
 * Choice buttons disable after one click: a pick is final in the engine,
 * so the UI mirrors that.  Out-of-range indices cannot be sent at all;
 * only the buttons for received alternatives exist.
 */

import { PlaygroundSession, renderAnswerRows } from "./session.js";
import { LineTransport } from "./transport.js";

export interface PlaygroundApp {
  session: PlaygroundSession;
  elements: {
    program: HTMLTextAreaElement;
    goal: HTMLInputElement;
    run: HTMLButtonElement;
    status: HTMLElement;
    prompt: HTMLElement;
    answers: HTMLElement;
    log: HTMLElement;
    next: HTMLButtonElement;
    stop: HTMLButtonElement;
    reconnect: HTMLButtonElement;
  };
}

/** Supplies a fresh transport when the user asks to reconnect. */
export type TransportFactory = () => Promise<LineTransport>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function mountPlayground(
  root: HTMLElement,
  transport: LineTransport,
  reconnectWith?: TransportFactory,
): PlaygroundApp {
  const program = el("textarea", { id: "program", rows: "10", spellcheck: "false" });
  const goal = el("input", { id: "goal", spellcheck: "false" });
  const run = el("button", { id: "run" }, "Run");
  const status = el("span", { id: "status" }, "idle");
  const prompt = el("div", { id: "prompt" });
  const answers = el("div", { id: "answers" });
  const log = el("ul", { id: "log" });
  const next = el("button", { id: "next" }, "next solution");
  const stop = el("button", { id: "stop" }, "stop");
  const reconnect = el("button", { id: "reconnect", hidden: "" }, "reconnect");

  root.append(
    el("h1", {}, "prologi playground"),
    labelled("Program", program),
    labelled("Goal", goal),
    row(run, status, reconnect),
    prompt,
    row(next, stop),
    answers,
    el("h2", {}, "wire log"),
    log,
  );

  const app: PlaygroundApp = {
    session: undefined as unknown as PlaygroundSession,
    elements: { program, goal, run, status, prompt, answers, log, next, stop, reconnect },
  };

  function attach(fresh: LineTransport): void {
    app.session = new PlaygroundSession(fresh, render);
    render(app.session);
  }

  run.addEventListener("click", () => {
    app.session.start(program.value, goal.value);
  });
  next.addEventListener("click", () => app.session.next());
  stop.addEventListener("click", () => app.session.stop());
  reconnect.addEventListener("click", () => {
    if (!reconnectWith) return;
    status.textContent = "connecting";
    reconnect.hidden = true;
    reconnectWith().then(attach, (error: Error) => {
      status.textContent = `error: ${error.message}`;
      reconnect.hidden = false;
    });
  });

  function render(state: PlaygroundSession): void {
    if (state !== app.session) {
      return; // an abandoned session (pre-reconnect) went quiet
    }
    status.textContent = state.lastError
      ? `${state.status}: ${state.lastError}`
      : state.status;
    next.disabled = !state.awaitingMore;
    stop.disabled = !state.awaitingMore;
    reconnect.hidden = !(state.status === "error" && reconnectWith !== undefined);
    renderPrompt(state);
    renderAnswers(state);
    renderLog(state);
  }

  function renderPrompt(state: PlaygroundSession): void {
    prompt.replaceChildren();
    const pending = state.pending;
    if (pending === null) {
      return;
    }
    if (pending.kind === "choice") {
      prompt.append(el("p", {}, "Pick one alternative:"));
      pending.alternatives.forEach((alternative, i) => {
        const button = el("button", { "data-index": String(i + 1) });
        button.textContent = `${i + 1}) ${alternative}`;
        button.dataset.alternative = alternative; // byte-true wire payload
        button.addEventListener("click", () => {
          for (const sibling of prompt.querySelectorAll("button")) {
            sibling.disabled = true; // a pick is final
          }
          app.session.choose(i + 1);
        });
        prompt.append(button);
      });
    } else {
      const form = el("form", { id: "read-form" });
      const label = el("label", { for: "read-input" }, `${pending.variable}? `);
      const input = el("input", { id: "read-input", autocomplete: "off" });
      const submit = el("button", { type: "submit" }, "send");
      form.append(label, input, submit);
      form.addEventListener("submit", (event) => {
        event.preventDefault();
        app.session.submitRead(input.value);
      });
      prompt.append(form);
    }
  }

  function renderAnswers(state: PlaygroundSession): void {
    answers.replaceChildren();
    state.answers.forEach((bindings, index) => {
      const table = el("table", { class: "answer", "data-answer": String(index + 1) });
      for (const [name, value] of renderAnswerRows(bindings)) {
        const tr = el("tr");
        tr.append(el("td", {}, name), el("td", {}, value));
        table.append(tr);
      }
      answers.append(table);
    });
  }

  function renderLog(state: PlaygroundSession): void {
    log.replaceChildren();
    for (const entry of state.eventLog) {
      log.append(el("li", { class: entry.direction },
        `${entry.direction === "sent" ? ">" : "<"} ${entry.line}`));
    }
  }

  attach(transport);
  return app;
}

function labelled(caption: string, field: HTMLElement): HTMLElement {
  const wrapper = el("div", { class: "field" });
  wrapper.append(el("label", {}, caption), field);
  return wrapper;
}

function row(...children: HTMLElement[]): HTMLElement {
  const wrapper = el("div", { class: "row" });
  wrapper.append(...children);
  return wrapper;
}
