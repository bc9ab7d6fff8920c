import { ApiClient } from "./api.js";
import { Camera } from "./camera.js";
import { membershipIndex, pointColors } from "./colors.js";
import { LassoTrace } from "./lasso.js";
import { buildPcp, PcpModel } from "./pcp.js";
import { buildSandbox, PanelSource, pointTicks, SandboxModel, TickMark } from "./sandbox.js";
import {
  ApiError,
  ClusterRequest,
  ClusterResponse,
  DatasetDetail,
  RegistrySnapshot,
  StatsPayload,
} from "./types.js";
import { ToolMode, ViewState } from "./viewstate.js";

/**
 * The workbench controller: owns the dataset snapshot, the latest registry,
 * and the fetch pipeline behind the views. Mutations run one at a time in
 * FIFO order; stats refreshes carry sequence numbers so stale responses are
 * dropped instead of overwriting newer state.
 */
export class Workbench {
  readonly camera = new Camera();
  readonly view = new ViewState();

  dataset: DatasetDetail | null = null;
  registry: RegistrySnapshot = { active_group: null, groups: [] };
  sandbox: SandboxModel = { panels: [], elements: [], axisMax: new Map() };
  pcp: PcpModel = { axes: [], lines: [] };
  hoverTicks: TickMark[] = [];
  hoverAnnotation: string | null = null;

  private mutationQueue: Promise<unknown> = Promise.resolve();
  private statsSeq = 0;
  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: ApiClient,
    readonly datasetId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async load(viewport = { width: 900, height: 640 }): Promise<void> {
    this.dataset = await this.api.getDataset(this.datasetId);
    this.camera.fit(this.dataset.bounds, viewport);
    this.registry = (await this.api.getRegistry(this.datasetId)).registry;
    await this.refreshSandbox();
    this.emit();
  }

  /** Colors for the context image, one per point; ungrouped points gray. */
  get colors(): string[] {
    if (!this.dataset) return [];
    return pointColors(this.dataset.points.length, this.registry);
  }

  get panelCount(): number {
    return this.sandbox.panels.length;
  }

  /** Serialized mutation pipeline; each step sees the previous registry. */
  private enqueue<T>(run: () => Promise<T>): Promise<T> {
    const next = this.mutationQueue.then(run);
    this.mutationQueue = next.catch(() => undefined);
    return next;
  }

  async createGroup(name: string): Promise<number | null> {
    try {
      const response = await this.enqueue(() => this.api.createGroup(this.datasetId, name));
      this.registry = response.registry;
      await this.refreshSandbox();
      this.emit();
      return response.group_id ?? null;
    } catch (error) {
      this.surface(error);
      return null;
    }
  }

  /**
   * Apply a finished lasso gesture to the active group. Plain gestures add
   * the enclosed points; shift removes them. The enclosed set is decided by
   * the backend, never locally.
   */
  async applyLasso(trace: LassoTrace, shiftHeld: boolean): Promise<void> {
    const groupId = this.registry.active_group;
    if (groupId === null) {
      this.view.setNotice({ kind: "info", text: "create a group before lassoing points" });
      this.emit();
      return;
    }
    const polygon = trace.toPolygon(this.camera);
    if (!polygon) return;
    try {
      const response = await this.enqueue(() =>
        shiftHeld
          ? this.api.removeFromGroup(this.datasetId, groupId, { polygon })
          : this.api.assignToGroup(this.datasetId, groupId, { polygon }),
      );
      this.registry = response.registry;
      if (response.skipped && response.skipped.length > 0) {
        this.view.setNotice({
          kind: "info",
          text: `${response.skipped.length} points stayed in locked groups`,
        });
      }
      await this.refreshSandbox();
      this.emit();
    } catch (error) {
      this.surface(error);
    }
  }

  /** Assign explicit point ids (single-point clicks, scripted edits). */
  async assignPoints(groupId: number, pointIds: number[]): Promise<void> {
    try {
      const response = await this.enqueue(() =>
        this.api.assignToGroup(this.datasetId, groupId, { pointIds }));
      this.registry = response.registry;
      await this.refreshSandbox();
      this.emit();
    } catch (error) {
      this.surface(error);
    }
  }

  async setGroupLocked(groupId: number, locked: boolean): Promise<void> {
    try {
      const response = await this.enqueue(() =>
        this.api.setGroupLocked(this.datasetId, groupId, locked));
      this.registry = response.registry;
      this.emit();
    } catch (error) {
      this.surface(error);
    }
  }

  async annotateGroup(groupId: number, text: string): Promise<void> {
    try {
      const response = await this.enqueue(() =>
        this.api.annotateGroup(this.datasetId, groupId, text));
      this.registry = response.registry;
      this.emit();
    } catch (error) {
      this.surface(error);
    }
  }

  async runClustering(request: ClusterRequest): Promise<ClusterResponse | null> {
    try {
      const response = await this.enqueue(() =>
        this.api.runClustering(this.datasetId, request));
      if (response.registry) {
        this.registry = response.registry;
        await this.refreshSandbox();
      }
      this.emit();
      return response;
    } catch (error) {
      this.surface(error);
      return null;
    }
  }

  /** All-points summary plus one histogram panel per group. */
  async refreshSandbox(): Promise<void> {
    const seq = ++this.statsSeq;
    const query = { sort: this.view.sandbox.sort, scale: this.view.sandbox.scale };
    const sources: PanelSource[] = [
      {
        groupId: null,
        title: "all points",
        color: null,
        stats: await this.api.getStats(this.datasetId, query),
      },
    ];
    const withMembers = this.registry.groups.filter((g) => g.members.length > 0);
    const groupStats = await Promise.all(
      withMembers.map((g) =>
        this.api.getStats(this.datasetId, { ...query, groupId: g.group_id })),
    );
    if (seq !== this.statsSeq) return; // a newer refresh superseded this one
    withMembers.forEach((group, i) => {
      sources.push({
        groupId: group.group_id,
        title: group.name,
        color: group.color,
        stats: groupStats[i],
      });
    });
    this.sandbox = buildSandbox(sources, this.view.sandbox);
    this.pcp = buildPcp(
      withMembers.map((group, i) => ({
        groupId: group.group_id,
        color: group.color,
        stats: groupStats[i],
      })),
      this.view.sandbox.hidden,
    );
  }

  /** Examine-mode hover: per-panel ticks plus the group annotation overlay. */
  async hoverPoint(pointId: number | null): Promise<void> {
    this.view.hoverPoint = pointId;
    if (pointId === null || this.view.toolMode !== ToolMode.Examine) {
      this.hoverTicks = [];
      this.hoverAnnotation = null;
      this.emit();
      return;
    }
    const stats = await this.pointStats(pointId);
    this.hoverTicks = pointTicks(stats, this.sandbox, this.view.sandbox);
    const owner = membershipIndex(this.registry).get(pointId);
    const group = this.registry.groups.find((g) => g.group_id === owner);
    this.hoverAnnotation = group?.annotation ?? null;
    this.emit();
  }

  pointStats(pointId: number): Promise<StatsPayload> {
    return this.api.getStats(this.datasetId, {
      points: [pointId],
      sort: this.view.sandbox.sort,
      scale: this.view.sandbox.scale,
    });
  }

  private surface(error: unknown): void {
    if (error instanceof ApiError) {
      this.view.setNotice({ kind: "error", text: `${error.code}: ${error.message}` });
    } else {
      this.view.setNotice({ kind: "error", text: String(error) });
    }
    this.emit();
  }
}
