// Scripted session against the real service: load a live session, correct
// one label, edit one clause, step, and observe the next iteration with an
// updated batch. Blocked step on parse error is verified on the way.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createSession } from "../src/api.js";
import { StudioApp } from "../src/app.js";

const PORT = 8941;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let workdir = "";
let sessionId = "";

async function waitFor(
  cond: () => boolean | Promise<boolean>,
  what: string,
  timeoutMs = 30_000,
): Promise<void> {
  const started = Date.now();
  for (;;) {
    if (await cond()) return;
    if (Date.now() - started > timeoutMs) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 150));
  }
}

async function serviceUp(): Promise<boolean> {
  try {
    const resp = await fetch(`${BASE}/sessions/__probe__`);
    return resp.status === 404;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "rapid-studio-e2e-"));
  const gen = spawnSync(
    "python3",
    [
      "-c",
      `from rapid.synth import write_task, traffic_task; write_task(traffic_task(seed=6, pool_size=45), ${JSON.stringify(workdir)})`,
    ],
    { encoding: "utf-8" },
  );
  if (gen.status !== 0) throw new Error(`task generation failed: ${gen.stderr}`);

  server = spawn(
    "python3",
    [
      "-c",
      `import uvicorn
from rapid.service import create_app
uvicorn.run(create_app(${JSON.stringify(join(workdir, "sessions"))}), host="127.0.0.1", port=${PORT}, log_level="warning")`,
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitFor(serviceUp, "service startup");

  const created = await createSession(BASE, {
    dataset: join(workdir, "dataset.jsonl"),
    vocabulary: join(workdir, "vocabulary.json"),
    config: { max_iterations: 8, feedback_mode: "full" },
    seed: 6,
  });
  sessionId = created.id;
}, 60_000);

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("studio against a live service", () => {
  it("loads, corrects one label, edits one clause, steps to iteration 1", async () => {
    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    const app = new StudioApp(root);
    await app.loadSession(BASE, sessionId);

    // Dashboard reflects the live session: iteration 0, a batch of 3 cards.
    expect(root.querySelector("#iteration")!.textContent).toContain("iteration 0");
    const cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(3);
    const batchIds = [...cards].map((c) => (c as HTMLElement).dataset.recordId!);

    // Correct the first card by clicking a label other than the prediction.
    const firstCard = cards[0] as HTMLElement;
    const predicted = firstCard.querySelector(".label-btn.chosen")!.textContent!;
    const other = [...firstCard.querySelectorAll(".label-btn")].find(
      (b) => b.textContent !== predicted,
    ) as HTMLButtonElement;
    other.click();
    await waitFor(
      () => app.state.corrections[batchIds[0]] === other.textContent,
      "correction staged",
    );

    (root.querySelector("#submit-corrections") as HTMLButtonElement).click();
    await waitFor(() => app.state.session?.ready === true, "corrections accepted");

    // A broken buffer blocks the step button; the service never sees it.
    app.editRule(app.state.session!.labels[0], "broken(X :-");
    expect((root.querySelector("#step") as HTMLButtonElement).disabled).toBe(true);

    // Edit one clause for real: append a disjunct to the first rule.
    const label = app.state.session!.labels[0];
    const current = app.state.session!.rules[label].dsl;
    const edited = current.slice(0, -1) + " ; object(X,sky).";
    app.editRule(label, edited);
    const stepBtn = root.querySelector("#step") as HTMLButtonElement;
    expect(stepBtn.disabled).toBe(false);
    stepBtn.click();
    await waitFor(() => app.state.session?.iteration === 1, "step to iteration 1");

    // New iteration rendered with an updated batch disjoint from labeled.
    expect(root.querySelector("#iteration")!.textContent).toContain("iteration 1");
    const newCards = [...root.querySelectorAll(".card")].map(
      (c) => (c as HTMLElement).dataset.recordId!,
    );
    expect(newCards).toHaveLength(3);
    for (const id of newCards) {
      expect(app.state.session!.labeled_ids).not.toContain(id);
    }
    for (const id of batchIds) {
      expect(app.state.session!.labeled_ids).toContain(id);
    }

    // The clause edit went through the API: it shows up as an include
    // constraint and in the metrics history length.
    expect(
      app.state.session!.constraints.include.some(([l]) => l === label),
    ).toBe(true);
    const svg = root.querySelector(".history-chart") as SVGElement;
    expect(svg.dataset.points).toBe("2");
  }, 90_000);

  it("server rejects malformed rule text with a parse position", async () => {
    const resp = await fetch(`${BASE}/sessions/${sessionId}/rules`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ label: "downtown", dsl: "downtown(X :- ." }),
    });
    expect(resp.status).toBe(422);
    const body = await resp.json();
    expect(body.code).toBe("parse_error");
    expect(body.detail).toContain("position");
  });
});
