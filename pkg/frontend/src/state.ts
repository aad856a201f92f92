/** Client-side proof state: a pure fold over server responses.
 *
 * The server is the source of truth; this module only mirrors the last
 * subgoal rendering, keeps the command history that produced it, and
 * derives the exportable proof script.  Replaying `history` against a
 * fresh session must reproduce the same state.
 */

import type { Response, SubgoalView } from "./protocol.js";

export interface HistoryEntry {
  kind: "load" | "tactic" | "undo";
  text: string; // verbatim command text for tactics, file text for load
}

export interface UiProofState {
  proof: string | null;
  completed: boolean;
  subgoals: SubgoalView[];
  theorems: string[];
  history: HistoryEntry[];
  /** commands accepted since the current theorem started */
  script: string[];
  diagnostic: string | null;
  banner: string | null; // connection-level message
}

export function initialState(): UiProofState {
  return {
    proof: null,
    completed: false,
    subgoals: [],
    theorems: [],
    history: [],
    script: [],
    diagnostic: null,
    banner: null,
  };
}

export type UiEvent =
  | { kind: "loaded"; text: string; resp: Response }
  | { kind: "tactic"; text: string; resp: Response }
  | { kind: "undo"; resp: Response }
  | { kind: "resync"; resp: Response }
  | { kind: "connection-lost" }
  | { kind: "reconnected" };

/** Pure transition; an error response leaves proof state untouched. */
export function applyEvent(state: UiProofState, ev: UiEvent): UiProofState {
  switch (ev.kind) {
    case "connection-lost":
      return { ...state, banner: "connection lost; reconnecting..." };
    case "reconnected":
      return { ...state, banner: null };
    case "loaded": {
      if (ev.resp.status === "error") {
        return { ...state, diagnostic: describeError(ev.resp) };
      }
      return {
        ...fromResponse(state, ev.resp),
        history: [...state.history, { kind: "load", text: ev.text }],
        script: [],
        diagnostic: null,
      };
    }
    case "tactic": {
      if (ev.resp.status === "error") {
        return { ...state, diagnostic: describeError(ev.resp) };
      }
      const completedNow = Boolean(ev.resp.proof_completed);
      return {
        ...fromResponse(state, ev.resp),
        proof: completedNow ? ev.resp.proof_completed ?? null : state.proof,
        completed: completedNow || (ev.resp.completed ?? false),
        history: [...state.history, { kind: "tactic", text: ev.text }],
        script: [...state.script, ev.text],
        diagnostic: null,
      };
    }
    case "undo": {
      if (ev.resp.status === "error") {
        return { ...state, diagnostic: describeError(ev.resp) };
      }
      return {
        ...fromResponse(state, ev.resp),
        history: [...state.history, { kind: "undo", text: "undo." }],
        script: state.script.slice(0, -1),
        diagnostic: null,
      };
    }
    case "resync": {
      if (ev.resp.status === "error") {
        return { ...state, diagnostic: describeError(ev.resp) };
      }
      return { ...fromResponse(state, ev.resp), diagnostic: null };
    }
  }
}

function fromResponse(state: UiProofState, resp: Response): UiProofState {
  return {
    ...state,
    proof: resp.proof ?? state.proof,
    completed: resp.completed ?? false,
    subgoals: resp.subgoals ?? [],
    theorems: resp.theorems ?? state.theorems,
  };
}

/** Diagnostics keep the server text verbatim; the refused-case-analysis
 * message carries the offending type equation and must stay intact. */
export function describeError(resp: Response): string {
  const code = resp.code ? `[${resp.code}] ` : "";
  return code + (resp.diagnostic ?? "unknown error");
}

/** The accepted commands, one per line, as a `.thm` proof body. */
export function exportScript(state: UiProofState): string {
  return state.script.join("\n") + (state.script.length ? "\n" : "");
}
