/** HTML rendering of the mirrored proof state.
 *
 * Terms arrive pre-printed by the server, so rendering is escaping plus
 * layout; annotations become badges on the hypothesis labels.
 */

import type { SubgoalView } from "./protocol.js";
import type { UiProofState } from "./state.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSubgoal(sub: SubgoalView, index: number, total: number): string {
  const parts: string[] = [];
  parts.push(`<div class="subgoal">`);
  parts.push(`<div class="subgoal-head">Subgoal ${index + 1} of ${total}</div>`);
  if (sub.tyvars.length) {
    parts.push(
      `<div class="tyvars">Type parameters: ${sub.tyvars.map(escapeHtml).join(", ")}</div>`,
    );
  }
  if (sub.eigenvars.length) {
    const vs = sub.eigenvars
      .map((e) => `${escapeHtml(e.name)} : ${escapeHtml(e.ty)}`)
      .join(", ");
    parts.push(`<div class="vars">Variables: ${vs}</div>`);
  }
  parts.push(`<table class="hyps">`);
  for (const h of sub.hyps) {
    const badge = h.ann ? `<span class="badge ann-${h.ann === "*" ? "star" : "at"}">${h.ann}</span>` : "";
    parts.push(
      `<tr><td class="label">${escapeHtml(h.label)}${badge}</td>` +
        `<td class="formula">${escapeHtml(h.formula)}</td></tr>`,
    );
  }
  parts.push(`</table>`);
  parts.push(`<div class="turnstile"></div>`);
  parts.push(`<div class="goal">${escapeHtml(sub.goal)}</div>`);
  parts.push(`</div>`);
  return parts.join("\n");
}

export function renderState(state: UiProofState): string {
  const parts: string[] = [];
  if (state.banner) {
    parts.push(`<div class="banner">${escapeHtml(state.banner)}</div>`);
  }
  if (state.diagnostic) {
    parts.push(`<div class="diagnostic">${escapeHtml(state.diagnostic)}</div>`);
  }
  if (state.proof && state.completed) {
    parts.push(`<div class="completed">Proof completed: ${escapeHtml(state.proof)}.</div>`);
  } else if (state.proof) {
    parts.push(`<div class="proving">Proving ${escapeHtml(state.proof)}</div>`);
    state.subgoals.forEach((sub, i) =>
      parts.push(renderSubgoal(sub, i, state.subgoals.length)),
    );
  } else {
    parts.push(`<div class="idle">No proof in progress.</div>`);
  }
  if (state.theorems.length) {
    parts.push(
      `<div class="theorems">Proved: ${state.theorems.map(escapeHtml).join(", ")}</div>`,
    );
  }
  return parts.join("\n");
}

export function renderScript(script: string[]): string {
  return script.map(escapeHtml).join("\n");
}
