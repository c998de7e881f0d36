import { describe, expect, it } from "vitest";

import { diffRules } from "../src/diff.js";

const BASE = "normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.17).";

describe("rule diff", () => {
  it("flags exactly the clause whose constant changed", () => {
    const edited = "normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.31).";
    const diff = diffRules(BASE, edited);
    expect(diff).not.toBeNull();
    expect(diff!.clauses.filter((c) => c.status === "changed")).toHaveLength(1);
    expect(diff!.removed).toHaveLength(1);
  });

  it("treats variable renaming as unchanged", () => {
    const renamed = "normal(X) :- ACDR(X,B), area(B,M), smaller(M,0.17).";
    const diff = diffRules(BASE, renamed);
    expect(diff!.clauses.every((c) => c.status === "unchanged")).toBe(true);
    expect(diff!.removed).toHaveLength(0);
  });

  it("marks an appended clause as changed and keeps the rest", () => {
    const appended = BASE.slice(0, -1) + " ; object(X,cup).";
    const diff = diffRules(BASE, appended);
    expect(diff!.clauses.map((c) => c.status)).toEqual(["unchanged", "changed"]);
    expect(diff!.removed).toHaveLength(0);
  });

  it("returns null when either side fails to parse", () => {
    expect(diffRules(BASE, "normal(X :- ")).toBeNull();
  });
});
