// Dashboard behavior against a scripted in-memory service: rendering is a
// pure projection of the fetched state, and no mutation bypasses the API.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { StudioApp } from "../src/app.js";
import type { BatchView, MetricsRow, SessionState } from "../src/types.js";

const LABELS = ["downtown", "highway"];

function sessionFixture(overrides: Partial<SessionState> = {}): SessionState {
  return {
    id: "s1",
    iteration: 0,
    terminal: false,
    ready: false,
    labels: LABELS,
    labeled_ids: ["a", "b", "c"],
    unlabeled_count: 12,
    rules: {
      downtown: { dsl: "downtown(X) :- object(X,building).", clauses: [["object(X,building)"]] },
      highway: {
        dsl: "highway(X) :- truck(X,A), num(A,N), greater(N,5).",
        clauses: [["truck(X,A)", "num(A,N)", "greater(N,5)"]],
      },
    },
    constraints: { include: [], exclude: [] },
    batch_ids: ["r1", "r2", "r3"],
    metrics_count: 1,
    ...overrides,
  };
}

function batchFixture(): BatchView {
  const record = (id: string, assigned: string, score: number) => ({
    id,
    facts: [`object(${id},road)`],
    numeric: { num: { road: 1 } },
    decision: {
      assigned,
      satisfied_labels: [assigned],
      per_rule_csr: { downtown: assigned === "downtown" ? 1 : 0.25, highway: 0.5 },
      tie_broken: false,
    },
    score: { score, n_labels: 1, u: 0.3 },
  });
  return {
    strategy: "multi-criteria",
    ids: ["r1", "r2", "r3"],
    records: [record("r1", "downtown", 1.7), record("r2", "highway", 0.4), record("r3", "downtown", 0)],
  };
}

function metricsFixture(n: number): MetricsRow[] {
  return Array.from({ length: n }, (_, i) => ({
    iteration: i,
    test_accuracy: 0.5 + i * 0.1,
    pool_accuracy: 0.5 + i * 0.1,
    hit_rate: i ? 0.33 : 0,
    labeled_size: 3 + i * 3,
    n_clauses: 2,
    avg_clauses_per_rule: 1,
    n_predicates: 4,
    avg_predicates_per_clause: 2,
    training_consistency: true,
  }));
}

interface Scripted {
  state: SessionState;
  batch: BatchView;
  metrics: MetricsRow[];
  calls: { method: string; url: string; body?: unknown }[];
  rejectCorrections?: boolean;
}

function installFetch(script: Scripted): void {
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    script.calls.push({ method, url, body });
    const json = (data: unknown, status = 200) =>
      new Response(JSON.stringify(data), { status });
    if (url.endsWith("/batch")) return json(script.batch);
    if (url.endsWith("/metrics")) return json({ metrics: script.metrics });
    if (url.endsWith("/corrections")) {
      if (script.rejectCorrections) {
        return json({ code: "conflict", message: "record nope is not in the pending batch", detail: "" }, 409);
      }
      script.state = { ...script.state, ready: true };
      return json(script.state);
    }
    if (url.endsWith("/rules")) return json(script.state);
    if (url.endsWith("/step")) {
      script.state = { ...script.state, iteration: script.state.iteration + 1, ready: false };
      script.metrics = metricsFixture(script.state.iteration + 1);
      return json({ metrics: script.metrics.at(-1), state: script.state });
    }
    return json(script.state);
  });
}

describe("studio app", () => {
  let root: HTMLElement;
  let script: Scripted;

  beforeEach(() => {
    document.body.innerHTML = '<main id="app"></main>';
    root = document.getElementById("app")!;
    script = {
      state: sessionFixture(),
      batch: batchFixture(),
      metrics: metricsFixture(1),
      calls: [],
    };
    installFetch(script);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("renders iteration, three cards, and chart points after load", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    expect(root.querySelector("#iteration")!.textContent).toContain("iteration 0");
    expect(root.querySelectorAll(".card")).toHaveLength(3);
    const svg = root.querySelector(".history-chart") as SVGElement;
    expect(svg.dataset.points).toBe("1");
    expect(root.querySelectorAll(".csr-row").length).toBe(6);
  });

  it("shows an error banner with retry when the service is unreachable", async () => {
    vi.stubGlobal("fetch", async () => {
      throw new Error("connection refused");
    });
    const app = new StudioApp(root);
    await app.loadSession("http://down", "s1");
    expect(root.querySelector(".banner.error")!.textContent).toContain("connection refused");
    expect(root.querySelector("#retry")).not.toBeNull();
  });

  it("charts one point per iteration in the history", async () => {
    script.metrics = metricsFixture(5);
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    const svg = root.querySelector(".history-chart") as SVGElement;
    expect(svg.dataset.points).toBe("5");
    const accuracy = svg.querySelector(".series.accuracy")!;
    expect(accuracy.getAttribute("points")!.split(" ")).toHaveLength(5);
  });

  it("submits every card with its final label (one relabeled, two kept)", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    app.pickLabel("r2", "downtown");
    await app.submitCorrections();
    const call = script.calls.find((c) => c.url.endsWith("/corrections"))!;
    expect(call.body).toEqual({
      corrections: { r1: "downtown", r2: "downtown", r3: "downtown" },
    });
  });

  it("reverts the cards and resyncs when the server rejects", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    script.rejectCorrections = true;
    app.pickLabel("r1", "highway");
    await app.submitCorrections();
    expect(app.state.corrections).toEqual({});
    expect(root.querySelector(".banner.error")!.textContent).toContain("not in the pending batch");
  });

  it("guards against double submit while a request is in flight", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    const first = app.submitCorrections();
    const second = app.submitCorrections();
    await Promise.all([first, second]);
    expect(script.calls.filter((c) => c.url.endsWith("/corrections"))).toHaveLength(1);
  });

  it("disables the step button while any buffer has a parse error", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    await app.submitCorrections(); // ready
    expect((root.querySelector("#step") as HTMLButtonElement).disabled).toBe(false);
    app.editRule("highway", "highway(X :- broken");
    expect((root.querySelector("#step") as HTMLButtonElement).disabled).toBe(true);
    const status = root.querySelector('[data-label="highway"] .parse-status')!;
    expect(status.className).toContain("error");
    expect(status.textContent).toContain("position");
    app.editRule("highway", "highway(X) :- truck(X,A).");
    expect((root.querySelector("#step") as HTMLButtonElement).disabled).toBe(false);
  });

  it("steps only through the API and re-renders the new iteration", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    await app.submitCorrections();
    app.editRule("downtown", "downtown(X) :- object(X,building) ; object(X,tram).");
    await app.editAndStep();
    const ruleCall = script.calls.find((c) => c.url.endsWith("/rules"))!;
    expect(ruleCall.body).toMatchObject({ label: "downtown" });
    expect(script.calls.some((c) => c.url.endsWith("/step"))).toBe(true);
    expect(root.querySelector("#iteration")!.textContent).toContain("iteration 1");
  });

  it("highlights exactly the edited clause in the editor diff", async () => {
    const app = new StudioApp(root);
    await app.loadSession("http://test", "s1");
    app.editRule("highway", "highway(X) :- truck(X,A), num(A,N), greater(N,7).");
    const items = root.querySelectorAll('[data-label="highway"] .clause-list li');
    expect(items).toHaveLength(2); // edited clause + struck-through original
    expect(items[0].className).toBe("changed");
    expect(items[1].className).toBe("removed");
  });
});
