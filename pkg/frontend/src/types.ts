// JSON shapes of the session API.

export interface RuleInfo {
  dsl: string;
  clauses: string[][];
}

export interface SessionState {
  id: string;
  iteration: number;
  terminal: boolean;
  ready: boolean;
  labels: string[];
  labeled_ids: string[];
  unlabeled_count: number;
  rules: Record<string, RuleInfo>;
  constraints: { include: [string, string][]; exclude: [string, string][] };
  batch_ids: string[] | null;
  metrics_count: number;
}

export interface Decision {
  assigned: string;
  satisfied_labels: string[];
  per_rule_csr: Record<string, number>;
  tie_broken: boolean;
}

export interface BatchRecord {
  id: string;
  facts: string[];
  numeric: Record<string, Record<string, number>>;
  decision: Decision;
  score: { score: number; n_labels: number; u: number };
}

export interface BatchView {
  strategy: string;
  ids: string[];
  records: BatchRecord[];
}

export interface MetricsRow {
  iteration: number;
  test_accuracy: number | null;
  pool_accuracy: number | null;
  hit_rate: number;
  labeled_size: number;
  n_clauses: number;
  avg_clauses_per_rule: number;
  n_predicates: number;
  avg_predicates_per_clause: number;
  training_consistency: boolean;
}

export interface ApiError {
  code: string;
  message: string;
  detail: string;
}
