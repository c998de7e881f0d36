import { describe, expect, it } from "vitest";

import { clauseText, parseRule } from "../src/dsl.js";

describe("grammar mirror", () => {
  it("parses a two-clause rule", () => {
    const out = parseRule(
      "highway(X) :- !people(X,B) ; truck(X,A), num(A,N), greater(N,5).",
    );
    expect(out.ok).toBe(true);
    if (!out.ok) return;
    expect(out.rule.label).toBe("highway");
    expect(out.rule.clauses).toHaveLength(2);
    expect(out.rule.clauses[0][0]).toMatchObject({ negated: true, name: "people" });
    expect(out.rule.clauses[1].map((a) => a.name)).toEqual(["truck", "num", "greater"]);
  });

  it("parses uppercase predicate names", () => {
    const out = parseRule("normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.31).");
    expect(out.ok).toBe(true);
  });

  it("rejects an empty clause with a position", () => {
    const out = parseRule("l(X) :- .");
    expect(out.ok).toBe(false);
    if (out.ok) return;
    expect(out.error.position).toBe(8);
    expect(out.error.message).toContain("empty clause");
  });

  it("rejects a missing terminator", () => {
    const out = parseRule("l(X) :- truck(X,A)");
    expect(out.ok).toBe(false);
  });

  it("rejects a non-variable head", () => {
    const out = parseRule("l(x) :- truck(X,A).");
    expect(out.ok).toBe(false);
  });

  it("reports the offset of a stray character", () => {
    const text = "l(X) :- truck(X,A), %";
    const out = parseRule(text);
    expect(out.ok).toBe(false);
    if (out.ok) return;
    expect(out.error.position).toBe(text.indexOf("%"));
  });

  it("prints clause text canonically", () => {
    const out = parseRule("l(X) :- truck(X,A), num(A,N), greater(N,5).");
    expect(out.ok).toBe(true);
    if (!out.ok) return;
    expect(clauseText(out.rule.clauses[0])).toBe("truck(X,A), num(A,N), greater(N,5)");
  });
});
