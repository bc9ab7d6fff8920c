/** Wire types for the analysis-service JSON API. */

export interface DatasetSummary {
  id: string;
  source_id: string;
  n_points: number;
  element_names: string[];
}

export interface DatasetPoint {
  id: number;
  x: number;
  y: number;
  z: number;
}

export interface DatasetDetail {
  id: string;
  source_id: string;
  element_names: string[];
  /** [min_x, min_y, max_x, max_y] over the point coordinates. */
  bounds: [number, number, number, number];
  points: DatasetPoint[];
}

export interface GroupRecord {
  group_id: number;
  name: string;
  color: string;
  locked: boolean;
  annotation: string | null;
  members: number[];
}

export interface RegistrySnapshot {
  active_group: number | null;
  groups: GroupRecord[];
}

export interface ElementStats {
  element: string;
  n: number;
  mean: number;
  sd: number;
  cv: number | null;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface StatsPayload {
  n: number;
  sort: string;
  scale: string;
  group_id?: number;
  /** Already ordered by the requested sort. */
  stats: ElementStats[];
}

export interface ClusterRequest {
  algorithm: "kmeans" | "hierarchical" | "minmax";
  n_clusters: number;
  seed?: number;
  linkage?: "single" | "complete" | "average" | "ward";
  reduction?:
    | { kind: "none" }
    | { kind: "pca"; variance_fraction: number }
    | { kind: "tsne"; perplexity: number; iterations?: number; seed?: number };
  elements?: string[];
  to_groups?: boolean;
}

export interface ClusterResponse {
  labels: number[];
  diagnostics: Record<string, unknown>;
  config: Record<string, unknown>;
  registry?: RegistrySnapshot;
}

export interface GroupCommandResponse {
  registry: RegistrySnapshot;
  group_id?: number;
  skipped?: number[];
}

export interface ApiErrorBody {
  error_code: string;
  message: string;
  field?: string;
}

/** Raised for any non-2xx response; carries the backend error taxonomy. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly field?: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.error_code;
    this.field = body.field;
  }
}
