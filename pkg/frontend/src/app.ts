/** Wiring: DOM events -> protocol client -> state fold -> rendering. */

import { HttpTransport, ProverClient } from "./protocol.js";
import { applyEvent, exportScript, initialState, UiProofState } from "./state.js";
import { renderScript, renderState } from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startApp(baseUrl: string = ""): void {
  const client = new ProverClient(new HttpTransport(baseUrl));
  let state: UiProofState = initialState();
  let cmdHistory: string[] = [];
  let histPos = 0;

  const view = el<HTMLDivElement>("view");
  const scriptView = el<HTMLPreElement>("script");
  const input = el<HTMLInputElement>("tactic-input");
  const loadArea = el<HTMLTextAreaElement>("load-text");

  function redraw() {
    view.innerHTML = renderState(state);
    scriptView.textContent = renderScript(state.script);
    input.disabled = client.pending;
  }

  function update(ev: Parameters<typeof applyEvent>[1]) {
    state = applyEvent(state, ev);
    redraw();
  }

  async function guarded(run: () => Promise<void>) {
    if (client.pending) return;
    input.disabled = true;
    try {
      await run();
    } catch (err) {
      update({ kind: "connection-lost" });
      try {
        await client.reconnect();
        const resp = await client.state();
        update({ kind: "reconnected" });
        update({ kind: "resync", resp });
      } catch {
        // stay on the banner until the next attempt
      }
    } finally {
      input.disabled = false;
      input.focus();
    }
  }

  el<HTMLButtonElement>("load-btn").addEventListener("click", () =>
    guarded(async () => {
      const text = loadArea.value;
      const resp = await client.load(text);
      update({ kind: "loaded", text, resp });
    }),
  );

  el<HTMLButtonElement>("undo-btn").addEventListener("click", () =>
    guarded(async () => {
      update({ kind: "undo", resp: await client.undo() });
    }),
  );

  el<HTMLButtonElement>("export-btn").addEventListener("click", () => {
    const blob = new Blob([exportScript(state)], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = (state.proof ?? "proof") + ".txt";
    a.click();
    URL.revokeObjectURL(a.href);
  });

  input.addEventListener("keydown", (e) => {
    if (e.key === "ArrowUp" && histPos > 0) {
      histPos -= 1;
      input.value = cmdHistory[histPos] ?? "";
      e.preventDefault();
    } else if (e.key === "ArrowDown" && histPos < cmdHistory.length) {
      histPos += 1;
      input.value = cmdHistory[histPos] ?? "";
      e.preventDefault();
    } else if (e.key === "Enter") {
      const text = input.value.trim();
      if (!text) return;
      cmdHistory.push(text);
      histPos = cmdHistory.length;
      input.value = "";
      guarded(async () => {
        update({ kind: "tactic", text, resp: await client.tactic(text) });
      });
    }
  });

  guarded(async () => {
    await client.connect();
    update({ kind: "resync", resp: await client.state() });
  });
}

declare global {
  interface Window {
    polyproveStart: typeof startApp;
  }
}

if (typeof window !== "undefined") {
  window.polyproveStart = startApp;
}
