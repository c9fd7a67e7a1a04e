// Response shapes of the explore-service HTTP API.

export interface Overview {
  items: number;
  total_weight: number;
  affected_items: number;
  affected_weight_fraction: number;
  jaccard_distance: number;
  split_distance: number;
  merge_distance: number;
  jaccard_index: number;
  affected_jaccard_index: number;
  delta_precision_multiplier: number;
  sample: {
    total_draws: number;
    distinct_pairs: number;
    class_counts: Record<string, number>;
    strata_draws: Record<string, number>;
  };
  progress: Progress;
}

export interface Progress {
  tasks_total: number;
  tasks_answered: number;
  per_class: Record<string, { answered: number; total: number }>;
}

export interface EstimateRow {
  metric: string;
  point: number | null;
  std_err: number | null;
  ci_low: number | null;
  ci_high: number | null;
  effective_sample_size: number;
  n_draws: number;
  n_usable: number;
  multiplier: number | null;
  notes: string;
}

export interface Estimates {
  reports: EstimateRow[];
  class_reweights: Record<string, number | null>;
  unestimable_classes: string[];
  conflicts: [string, string][];
  n_verdicts: number;
}

export interface Task {
  i: string;
  j: string;
  draw_count: number;
  payload: Record<string, string>;
  status: string;
  lease_expires_in?: number;
}

export interface NextTask {
  task: Task | null;
  progress: Progress;
}

export type VerdictValue = "equivalent" | "not_equivalent" | "unknown";

export interface ClusterMember {
  id: string;
  weight: number;
  region: "both" | "base_only" | "exp_only";
  attributes: Record<string, string>;
}

export interface PairDetail {
  i: string;
  j: string;
  class: string;
  is_self: boolean;
  w: number;
  l: number;
  draw_count: number;
  stratum: string;
  verdict: string | null;
  attributes: Record<string, string>;
  i_attributes: Record<string, string>;
  j_attributes: Record<string, string>;
  base_cluster: ClusterMember[];
  exp_cluster: ClusterMember[];
  base_cluster_size: number;
  exp_cluster_size: number;
}

export interface SlicePredicate {
  key: string;
  op: "eq" | "ne";
  value: string;
}

export interface SliceGroup {
  group: string;
  draws: number;
  contribution: number;
  split_contribution: number;
  merge_contribution: number;
  share: number;
}

export interface SliceResult {
  groups: SliceGroup[];
  total_contribution: number;
  total_draws: number;
  attribute_keys: string[];
}

export interface MetricRow {
  granularity: string;
  subject: string;
  metric: string;
  value: number;
}
