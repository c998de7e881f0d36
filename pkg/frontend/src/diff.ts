// Clause-level rule diff for the editor highlight: which clauses of the new
// rule text are new or changed relative to the rule the server last reported.

import { clauseText, parseRule } from "./dsl.js";

export type ClauseStatus = "unchanged" | "changed";

export interface RuleDiff {
  clauses: { text: string; status: ClauseStatus }[];
  removed: string[]; // clauses of the old rule that no longer appear
}

function normalize(text: string): string {
  // Variable-consistent normalization: rename variables by first appearance
  // so `truck(X,A)` and `truck(X,B)` compare equal.
  const seen = new Map<string, string>();
  return text.replace(/\b[A-Z][A-Za-z0-9]*\b/g, (name) => {
    if (!seen.has(name)) seen.set(name, `v${seen.size}`);
    return seen.get(name)!;
  });
}

export function diffRules(oldDsl: string, newDsl: string): RuleDiff | null {
  const oldParsed = parseRule(oldDsl);
  const newParsed = parseRule(newDsl);
  if (!oldParsed.ok || !newParsed.ok) return null;
  const oldTexts = oldParsed.rule.clauses.map(clauseText);
  const oldKeys = new Set(oldTexts.map(normalize));
  const newTexts = newParsed.rule.clauses.map(clauseText);
  const newKeys = new Set(newTexts.map(normalize));
  return {
    clauses: newTexts.map((text) => ({
      text,
      status: oldKeys.has(normalize(text)) ? "unchanged" : "changed",
    })),
    removed: oldTexts.filter((text) => !newKeys.has(normalize(text))),
  };
}
