// Candidate cards: facts as grouped chips, the predicted label, per-rule
// satisfaction bars, the informativeness score, and a label picker.

import type { BatchRecord, BatchView } from "../types.js";

export interface CardHandlers {
  onPick: (recordId: string, label: string) => void;
}

function factGroups(record: BatchRecord): { title: string; chips: string[] }[] {
  const objects: string[] = [];
  const attrs: string[] = [];
  for (const fact of record.facts) {
    if (fact.startsWith("object(")) {
      objects.push(fact.replace(/^object\([^,]*,\s*/, "").replace(/\)$/, ""));
    } else if (!/^(num|area)\(/.test(fact)) {
      attrs.push(fact);
    }
  }
  const numerics: string[] = [];
  for (const [attr, perSort] of Object.entries(record.numeric)) {
    for (const [sort, value] of Object.entries(perSort)) {
      numerics.push(`${attr}(${sort}) = ${value}`);
    }
  }
  const groups = [];
  if (objects.length) groups.push({ title: "objects", chips: objects });
  if (attrs.length) groups.push({ title: "attributes", chips: attrs });
  if (numerics.length) groups.push({ title: "numerics", chips: numerics });
  return groups;
}

function csrBars(record: BatchRecord): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "csr-bars";
  for (const [label, csr] of Object.entries(record.decision.per_rule_csr)) {
    const row = document.createElement("div");
    row.className = "csr-row";
    const name = document.createElement("span");
    name.className = "csr-label";
    name.textContent = label;
    const bar = document.createElement("div");
    bar.className = "csr-track";
    const fill = document.createElement("div");
    fill.className = "csr-fill" + (csr === 1 ? " satisfied" : "");
    fill.style.width = `${Math.round(Math.min(Math.max(csr, 0), 1) * 100)}%`;
    bar.appendChild(fill);
    const value = document.createElement("span");
    value.className = "csr-value";
    value.textContent = csr.toFixed(2);
    row.append(name, bar, value);
    wrap.appendChild(row);
  }
  return wrap;
}

export function renderCards(
  container: HTMLElement,
  batch: BatchView,
  labels: string[],
  corrections: Record<string, string>,
  handlers: CardHandlers,
  disabled: boolean,
): void {
  container.textContent = "";
  for (const record of batch.records) {
    const card = document.createElement("article");
    card.className = "card";
    card.dataset.recordId = record.id;

    const header = document.createElement("header");
    const title = document.createElement("strong");
    title.textContent = record.id;
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = `score ${record.score.score.toFixed(2)}`;
    header.append(title, score);
    card.appendChild(header);

    for (const group of factGroups(record)) {
      const row = document.createElement("div");
      row.className = "chip-group";
      const caption = document.createElement("span");
      caption.className = "chip-title";
      caption.textContent = group.title;
      row.appendChild(caption);
      for (const chip of group.chips) {
        const el = document.createElement("span");
        el.className = "chip";
        el.textContent = chip;
        row.appendChild(el);
      }
      card.appendChild(row);
    }

    const predicted = document.createElement("p");
    predicted.className = "predicted";
    predicted.textContent = `predicted: ${record.decision.assigned}`;
    if (record.decision.tie_broken) predicted.textContent += " (tie-broken)";
    card.appendChild(predicted);
    card.appendChild(csrBars(record));

    const picker = document.createElement("div");
    picker.className = "picker";
    const chosen = corrections[record.id] ?? record.decision.assigned;
    for (const label of labels) {
      const btn = document.createElement("button");
      btn.type = "button";
      btn.textContent = label;
      btn.disabled = disabled;
      btn.className = "label-btn" + (label === chosen ? " chosen" : "");
      btn.addEventListener("click", () => handlers.onPick(record.id, label));
      picker.appendChild(btn);
    }
    card.appendChild(picker);
    container.appendChild(card);
  }
}
