// Studio dashboard: one session, three panels (batch cards, rule editors,
// history chart). All state shown is a projection of the last server fetch;
// the only mutations are the documented API calls.

import { ServiceError, SessionClient } from "./api.js";
import { allBuffersParse, renderEditor } from "./views/editor.js";
import { renderCards } from "./views/cards.js";
import { renderChart } from "./views/chart.js";
import type { BatchView, MetricsRow, SessionState } from "./types.js";

export interface AppState {
  client: SessionClient | null;
  session: SessionState | null;
  batch: BatchView | null;
  metrics: MetricsRow[];
  corrections: Record<string, string>;
  drafts: Record<string, string>;
  inflight: boolean;
  banner: { tone: "info" | "error" | "success"; text: string } | null;
}

export function initialState(): AppState {
  return {
    client: null,
    session: null,
    batch: null,
    metrics: [],
    corrections: {},
    drafts: {},
    inflight: false,
    banner: null,
  };
}

export class StudioApp {
  state: AppState = initialState();

  constructor(private root: HTMLElement) {
    this.render();
  }

  // -- data flow --

  async loadSession(baseUrl: string, sessionId: string): Promise<void> {
    this.state.client = new SessionClient(baseUrl, sessionId);
    this.state.corrections = {};
    this.state.drafts = {};
    await this.refresh();
  }

  async refresh(preserveBanner = false): Promise<void> {
    const client = this.state.client;
    if (!client) return;
    this.state.inflight = true;
    this.render();
    try {
      const session = await client.getState();
      const metrics = await client.getMetrics();
      let batch: BatchView | null = null;
      if (session.batch_ids && session.batch_ids.length) {
        batch = await client.getBatch();
      }
      this.state.session = session;
      this.state.batch = batch;
      this.state.metrics = metrics;
      if (!preserveBanner) this.state.banner = null;
    } catch (err) {
      this.state.banner = {
        tone: "error",
        text: err instanceof ServiceError ? `${err.body.code}: ${err.message}` : String(err),
      };
    } finally {
      this.state.inflight = false;
      this.render();
    }
  }

  pickLabel(recordId: string, label: string): void {
    this.state.corrections[recordId] = label;
    this.render();
  }

  editRule(label: string, text: string): void {
    this.state.drafts[label] = text;
    this.render();
  }

  /** POST the resolved batch. Every card is submitted with its final label
   * (explicit correction or the accepted prediction). */
  async submitCorrections(): Promise<void> {
    const { client, session, batch } = this.state;
    if (!client || !session || !batch || this.state.inflight) return;
    const payload: Record<string, string> = {};
    for (const record of batch.records) {
      payload[record.id] = this.state.corrections[record.id] ?? record.decision.assigned;
    }
    this.state.inflight = true;
    this.render();
    try {
      this.state.session = await client.postCorrections(payload);
      this.state.banner = { tone: "success", text: "corrections submitted" };
    } catch (err) {
      // Server rejected: drop the optimistic picks and resync.
      this.state.corrections = {};
      this.state.banner = {
        tone: "error",
        text: err instanceof ServiceError ? err.message : String(err),
      };
      this.state.inflight = false;
      await this.refresh(true);
      return;
    }
    this.state.inflight = false;
    this.render();
  }

  /** POST every edited rule, then step, then re-render the new iteration. */
  async editAndStep(): Promise<void> {
    const { client, session } = this.state;
    if (!client || !session || this.state.inflight) return;
    if (!allBuffersParse(session, this.state.drafts)) return; // button is disabled anyway
    this.state.inflight = true;
    this.render();
    try {
      for (const label of session.labels) {
        const draft = this.state.drafts[label];
        if (draft !== undefined && draft !== session.rules[label].dsl) {
          this.state.session = await client.postRule(label, draft);
        }
      }
      await client.step();
      this.state.corrections = {};
      this.state.drafts = {};
    } catch (err) {
      this.state.banner = {
        tone: "error",
        text: err instanceof ServiceError ? `${err.body.code}: ${err.message}` : String(err),
      };
      this.state.inflight = false;
      this.render();
      return;
    }
    this.state.inflight = false;
    await this.refresh();
  }

  // -- view --

  stepAllowed(): boolean {
    const { session } = this.state;
    if (!session || this.state.inflight || session.terminal) return false;
    if (!session.ready) return false;
    return allBuffersParse(session, this.state.drafts);
  }

  render(): void {
    const { session, batch, banner } = this.state;
    this.root.textContent = "";

    if (banner) {
      const el = document.createElement("div");
      el.className = `banner ${banner.tone}`;
      el.textContent = banner.text;
      if (banner.tone === "error") {
        const retry = document.createElement("button");
        retry.textContent = "retry";
        retry.id = "retry";
        retry.addEventListener("click", () => void this.refresh());
        el.appendChild(retry);
      }
      this.root.appendChild(el);
    }
    if (!session) {
      const empty = document.createElement("p");
      empty.id = "no-session";
      empty.textContent = "no session loaded";
      this.root.appendChild(empty);
      return;
    }

    const head = document.createElement("header");
    head.className = "session-head";
    head.innerHTML = "";
    const title = document.createElement("h2");
    title.id = "iteration";
    title.textContent = `session ${session.id} — iteration ${session.iteration}`;
    const facts = document.createElement("p");
    facts.id = "session-facts";
    facts.textContent =
      `${session.labeled_ids.length} labeled, ${session.unlabeled_count} unlabeled` +
      (session.terminal ? " — pool exhausted" : "");
    head.append(title, facts);
    this.root.appendChild(head);

    const chartBox = document.createElement("section");
    chartBox.id = "chart";
    renderChart(chartBox, this.state.metrics);
    this.root.appendChild(chartBox);

    const cardsBox = document.createElement("section");
    cardsBox.id = "cards";
    if (batch) {
      renderCards(
        cardsBox,
        batch,
        session.labels,
        this.state.corrections,
        { onPick: (rid, label) => this.pickLabel(rid, label) },
        this.state.inflight || session.ready,
      );
    } else {
      cardsBox.textContent = session.terminal ? "pool exhausted" : "no pending batch";
    }
    this.root.appendChild(cardsBox);

    const submit = document.createElement("button");
    submit.id = "submit-corrections";
    submit.textContent = "submit corrections";
    submit.disabled = !batch || this.state.inflight || session.ready;
    submit.addEventListener("click", () => void this.submitCorrections());
    this.root.appendChild(submit);

    const editorBox = document.createElement("section");
    editorBox.id = "editors";
    renderEditor(
      editorBox,
      session,
      this.state.drafts,
      { onEdit: (label, text) => this.editRule(label, text) },
      this.state.inflight,
    );
    this.root.appendChild(editorBox);

    const step = document.createElement("button");
    step.id = "step";
    step.textContent = "step iteration";
    step.disabled = !this.stepAllowed();
    step.addEventListener("click", () => void this.editAndStep());
    this.root.appendChild(step);
  }
}

export function mount(root: HTMLElement): StudioApp {
  return new StudioApp(root);
}
