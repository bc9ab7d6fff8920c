import {
  ApiError,
  ApiErrorBody,
  ClusterRequest,
  ClusterResponse,
  DatasetDetail,
  DatasetSummary,
  GroupCommandResponse,
  RegistrySnapshot,
  StatsPayload,
} from "./types.js";

export interface StatsQuery {
  groupId?: number;
  points?: number[];
  elements?: string[];
  sort?: "mean_desc" | "mean_asc" | "cv_desc" | "cv_asc";
  scale?: "linear" | "log10";
}

/** Thin typed wrapper over the backend; the one base-URL setting lives here. */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { error_code: "http_error", message: response.statusText };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listDatasets(): Promise<{ datasets: DatasetSummary[] }> {
    return this.request("/api/datasets");
  }

  getDataset(id: string): Promise<DatasetDetail> {
    return this.request(`/api/datasets/${id}`);
  }

  getStats(id: string, query: StatsQuery = {}): Promise<StatsPayload> {
    const params = new URLSearchParams();
    if (query.groupId !== undefined) params.set("group_id", String(query.groupId));
    if (query.points) params.set("points", query.points.join(","));
    if (query.elements) params.set("elements", query.elements.join(","));
    if (query.sort) params.set("sort", query.sort);
    if (query.scale) params.set("scale", query.scale);
    const qs = params.toString();
    return this.request(`/api/datasets/${id}/stats${qs ? "?" + qs : ""}`);
  }

  getRegistry(id: string): Promise<{ registry: RegistrySnapshot }> {
    return this.request(`/api/datasets/${id}/groups`);
  }

  createGroup(id: string, name: string): Promise<GroupCommandResponse> {
    return this.post(`/api/datasets/${id}/groups`, { op: "create", name });
  }

  assignToGroup(
    id: string,
    groupId: number,
    target: { pointIds?: number[]; polygon?: [number, number][] },
  ): Promise<GroupCommandResponse> {
    return this.post(`/api/datasets/${id}/groups`, {
      op: "assign",
      group_id: groupId,
      point_ids: target.pointIds,
      polygon: target.polygon,
    });
  }

  removeFromGroup(
    id: string,
    groupId: number,
    target: { pointIds?: number[]; polygon?: [number, number][] },
  ): Promise<GroupCommandResponse> {
    return this.post(`/api/datasets/${id}/groups`, {
      op: "remove",
      group_id: groupId,
      point_ids: target.pointIds,
      polygon: target.polygon,
    });
  }

  annotateGroup(id: string, groupId: number, text: string): Promise<GroupCommandResponse> {
    return this.post(`/api/datasets/${id}/groups`, { op: "annotate", group_id: groupId, text });
  }

  setGroupLocked(id: string, groupId: number, locked: boolean): Promise<GroupCommandResponse> {
    return this.post(`/api/datasets/${id}/groups`, { op: "lock", group_id: groupId, locked });
  }

  runClustering(id: string, request: ClusterRequest): Promise<ClusterResponse> {
    return this.post(`/api/datasets/${id}/cluster`, request);
  }

  async getWorkspace(id: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/api/datasets/${id}/workspace`);
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return response.text();
  }

  putWorkspace(id: string, body: string): Promise<{ dataset_mismatch: boolean; registry: RegistrySnapshot }> {
    return this.request(`/api/datasets/${id}/workspace`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body,
    });
  }
}
