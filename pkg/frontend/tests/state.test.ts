import { describe, expect, it } from "vitest";

import { ProverClient } from "../src/protocol.js";
import {
  applyEvent,
  describeError,
  exportScript,
  initialState,
  UiProofState,
} from "../src/state.js";
import { renderState, renderSubgoal } from "../src/render.js";
import { FakeTransport } from "./fake.js";

async function drive(
  transport: FakeTransport,
  commands: { kind: "load" | "tactic" | "undo"; text?: string }[],
): Promise<{ state: UiProofState; client: ProverClient }> {
  const client = new ProverClient(transport);
  await client.connect();
  let state = initialState();
  for (const c of commands) {
    if (c.kind === "load") {
      state = applyEvent(state, { kind: "loaded", text: c.text ?? "", resp: await client.load(c.text ?? "") });
    } else if (c.kind === "tactic") {
      state = applyEvent(state, { kind: "tactic", text: c.text ?? "", resp: await client.tactic(c.text ?? "") });
    } else {
      state = applyEvent(state, { kind: "undo", resp: await client.undo() });
    }
  }
  return { state, client };
}

describe("UiProofState", () => {
  it("accumulates accepted tactics into the script", async () => {
    const { state } = await drive(new FakeTransport(), [
      { kind: "load", text: "Theorem thm : x." },
      { kind: "tactic", text: "intros." },
      { kind: "tactic", text: "case H1." },
    ]);
    expect(state.script).toEqual(["intros.", "case H1."]);
    expect(exportScript(state)).toBe("intros.\ncase H1.\n");
  });

  it("a tactic error leaves proof state unchanged and shows the diagnostic verbatim", async () => {
    const t = new FakeTransport();
    const { state, client } = await drive(t, [
      { kind: "load", text: "Theorem thm : x." },
      { kind: "tactic", text: "intros." },
    ]);
    const before = JSON.stringify({ ...state, diagnostic: null });
    const resp = await client.tactic("boom.");
    const after = applyEvent(state, { kind: "tactic", text: "boom.", resp });
    expect(after.diagnostic).toContain("A = B"); // the offending equation, verbatim
    expect(after.diagnostic).toContain("NotAmenable");
    expect(JSON.stringify({ ...after, diagnostic: null })).toBe(before);
  });

  it("undo pops the script and mirrors the server state", async () => {
    const { state } = await drive(new FakeTransport(), [
      { kind: "load", text: "T" },
      { kind: "tactic", text: "intros." },
      { kind: "tactic", text: "case H1." },
      { kind: "undo" },
    ]);
    expect(state.script).toEqual(["intros."]);
    expect(state.subgoals[0].hyps.length).toBe(1);
  });

  it("history replays to the identical state on a fresh session", async () => {
    const commands: { kind: "load" | "tactic" | "undo"; text?: string }[] = [
      { kind: "load", text: "T" },
      { kind: "tactic", text: "intros." },
      { kind: "tactic", text: "case H1." },
      { kind: "undo" },
      { kind: "tactic", text: "apply IH to H3 H4." },
    ];
    const a = await drive(new FakeTransport(), commands);
    const b = await drive(new FakeTransport(), commands);
    expect(JSON.stringify(a.state)).toBe(JSON.stringify(b.state));
  });

  it("completion is reported and rendering switches to the banner", async () => {
    const { state } = await drive(new FakeTransport(), [
      { kind: "load", text: "T" },
      { kind: "tactic", text: "search." },
    ]);
    expect(state.completed).toBe(true);
    expect(renderState(state)).toContain("Proof completed: thm.");
  });
});

describe("rendering", () => {
  it("shows annotations as badges and escapes formulas", () => {
    const html = renderSubgoal(
      {
        tyvars: ["A"],
        eigenvars: [{ name: "l1", ty: "list A" }],
        hyps: [
          { label: "H1", ann: "@", formula: "gappend l1 l2 l3" },
          { label: "H2", ann: "*", formula: "x -> y" },
        ],
        goal: "l3 = l4",
      },
      0,
      1,
    );
    expect(html).toContain("ann-at");
    expect(html).toContain("ann-star");
    expect(html).toContain("x -&gt; y");
  });

  it("renders a diagnostic block", () => {
    const s = { ...initialState(), diagnostic: "[NotAmenable] A = B" };
    expect(renderState(s)).toContain("NotAmenable");
  });
});

describe("no client-side drift", () => {
  it("the folded state equals a fresh resync of the same session", async () => {
    const t = new FakeTransport();
    const { state, client } = await drive(t, [
      { kind: "load", text: "T" },
      { kind: "tactic", text: "intros." },
      { kind: "tactic", text: "case H1." },
      { kind: "undo" },
      { kind: "tactic", text: "case H1." },
    ]);
    const sid = client.sessionId!;
    const resp = await t.send(sid, { id: 99, cmd: "state", payload: {} });
    const resynced = applyEvent(initialState(), { kind: "resync", resp });
    expect(JSON.stringify(resynced.subgoals)).toBe(JSON.stringify(state.subgoals));
    expect(resynced.proof).toBe(state.proof);
  });
});

describe("ProverClient", () => {
  it("rejects overlapping requests (single in-flight discipline)", async () => {
    const t = new FakeTransport();
    const slow: typeof t.send = t.send.bind(t);
    t.send = (sid, body) =>
      new Promise((resolve) => setTimeout(() => resolve(slow(sid, body)), 10));
    const client = new ProverClient(t);
    await client.connect();
    const first = client.state();
    await expect(client.state()).rejects.toThrow(/pending/);
    await first;
  });

  it("reconnects with a state resync after a transport failure", async () => {
    const t = new FakeTransport();
    const client = new ProverClient(t);
    await client.connect();
    let state = initialState();
    state = applyEvent(state, { kind: "loaded", text: "T", resp: await client.load("T") });
    t.failNext = true;
    let lost = false;
    try {
      await client.tactic("intros.");
    } catch {
      lost = true;
      state = applyEvent(state, { kind: "connection-lost" });
    }
    expect(lost).toBe(true);
    expect(renderState(state)).toContain("connection lost");
    await client.reconnect();
    state = applyEvent(state, { kind: "reconnected" });
    state = applyEvent(state, { kind: "resync", resp: await client.state() });
    expect(state.banner).toBeNull();
  });
});
