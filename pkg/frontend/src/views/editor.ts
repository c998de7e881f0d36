// Per-label rule buffers with live parse status, a structured clause list,
// and change highlighting against the rules the server last reported.

import { diffRules } from "../diff.js";
import { parseRule } from "../dsl.js";
import type { SessionState } from "../types.js";

export interface EditorHandlers {
  onEdit: (label: string, text: string) => void;
}

export interface BufferStatus {
  ok: boolean;
  message?: string;
  position?: number;
}

export function bufferStatus(text: string): BufferStatus {
  const parsed = parseRule(text);
  if (parsed.ok) return { ok: true };
  return { ok: false, message: parsed.error.message, position: parsed.error.position };
}

export function renderEditor(
  container: HTMLElement,
  state: SessionState,
  drafts: Record<string, string>,
  handlers: EditorHandlers,
  disabled: boolean,
): void {
  container.textContent = "";
  for (const label of state.labels) {
    const info = state.rules[label];
    const draft = drafts[label] ?? info.dsl;
    const status = bufferStatus(draft);

    const section = document.createElement("section");
    section.className = "rule-editor";
    section.dataset.label = label;

    const heading = document.createElement("h3");
    heading.textContent = label;
    section.appendChild(heading);

    const area = document.createElement("textarea");
    area.value = draft;
    area.rows = Math.max(2, draft.split(";").length);
    area.disabled = disabled;
    area.addEventListener("input", () => handlers.onEdit(label, area.value));
    section.appendChild(area);

    const statusEl = document.createElement("p");
    statusEl.className = "parse-status " + (status.ok ? "ok" : "error");
    statusEl.textContent = status.ok
      ? "parses"
      : `syntax error: ${status.message} (position ${status.position})`;
    section.appendChild(statusEl);

    const list = document.createElement("ul");
    list.className = "clause-list";
    const diff = status.ok ? diffRules(info.dsl, draft) : null;
    if (diff) {
      for (const clause of diff.clauses) {
        const li = document.createElement("li");
        li.textContent = clause.text;
        li.className = clause.status;
        list.appendChild(li);
      }
      for (const removed of diff.removed) {
        const li = document.createElement("li");
        li.textContent = removed;
        li.className = "removed";
        list.appendChild(li);
      }
    } else {
      for (const clause of info.clauses) {
        const li = document.createElement("li");
        li.textContent = clause.join(", ");
        list.appendChild(li);
      }
    }
    section.appendChild(list);
    container.appendChild(section);
  }
}

/** True when every draft (or its fallback, the server rule) parses. */
export function allBuffersParse(
  state: SessionState,
  drafts: Record<string, string>,
): boolean {
  return state.labels.every((label) =>
    bufferStatus(drafts[label] ?? state.rules[label].dsl).ok,
  );
}
