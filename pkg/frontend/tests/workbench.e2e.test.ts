import { beforeEach, describe, expect, inject, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Workbench } from "../src/app.js";
import { membershipIndex, UNGROUPED_COLOR } from "../src/colors.js";
import { DEFAULT_FORM, toRequest } from "../src/clusterPanel.js";
import { LassoTrace } from "../src/lasso.js";
import { MAX_GROUP_PANELS } from "../src/sandbox.js";
import { ToolMode } from "../src/viewstate.js";

/**
 * End-to-end checks against a live backend (spawned in globalSetup). The
 * workbench view model is driven exactly the way the DOM handlers drive it.
 */

const baseUrl = inject("baseUrl");
const datasetId = inject("datasetId");

function freshClient(): ApiClient {
  return new ApiClient(baseUrl);
}

async function resetWorkspace(api: ApiClient): Promise<void> {
  const saved = JSON.parse(await api.getWorkspace(datasetId));
  saved.registry = { active_group: null, groups: [] };
  saved.last_cluster_config = null;
  await api.putWorkspace(datasetId, JSON.stringify(saved));
}

describe("workbench against the live service", () => {
  beforeEach(async () => {
    await resetWorkspace(freshClient());
  });

  it("lasso gesture selects exactly the member set the backend reports", async () => {
    const bench = new Workbench(freshClient(), datasetId);
    await bench.load({ width: 600, height: 600 });
    await bench.createGroup("lasso test");
    bench.view.setToolMode(ToolMode.Lasso);

    // a scripted rectangle around the lower-left 5x5 block of the grid
    const trace = new LassoTrace(0);
    const corners: [number, number][] = [
      [-0.5, -0.5],
      [4.5, -0.5],
      [4.5, 4.5],
      [-0.5, 4.5],
    ];
    for (const [x, y] of corners) {
      const [sx, sy] = bench.camera.toScreen(x, y);
      trace.add(sx, sy);
    }
    await bench.applyLasso(trace, false);

    const groupId = bench.registry.active_group!;
    const local = bench.registry.groups.find((g) => g.group_id === groupId)!;
    const remote = (await freshClient().getRegistry(datasetId)).registry
      .groups.find((g) => g.group_id === groupId)!;
    expect(local.members).toEqual(remote.members);
    expect(local.members.length).toBe(25);

    // shift-lasso over the same path reverts the gesture
    await bench.applyLasso(trace, true);
    const reverted = (await freshClient().getRegistry(datasetId)).registry
      .groups.find((g) => g.group_id === groupId)!;
    expect(reverted.members).toEqual([]);
  });

  it("sandbox shows group count + 1 panels and errors visibly on the 21st group", async () => {
    const bench = new Workbench(freshClient(), datasetId);
    await bench.load({ width: 600, height: 600 });
    expect(bench.panelCount).toBe(1); // all-points summary only

    for (let i = 0; i < MAX_GROUP_PANELS; i++) {
      const gid = await bench.createGroup(`group ${i}`);
      expect(gid).not.toBeNull();
      await bench.assignPoints(gid!, [i]);
    }
    expect(bench.registry.groups.length).toBe(MAX_GROUP_PANELS);
    expect(bench.panelCount).toBe(MAX_GROUP_PANELS + 1);

    const overflow = await bench.createGroup("one too many");
    expect(overflow).toBeNull();
    expect(bench.view.notice?.kind).toBe("error");
    expect(bench.view.notice?.text).toContain("group_limit_exceeded");
    expect(bench.panelCount).toBe(MAX_GROUP_PANELS + 1);
  });

  it("clustering with k=5 shows five colored regions matching the labels", async () => {
    const bench = new Workbench(freshClient(), datasetId);
    await bench.load({ width: 600, height: 600 });
    const response = await bench.runClustering(
      toRequest({ ...DEFAULT_FORM, nClusters: 5, seed: 3 }, true),
    );
    expect(response).not.toBeNull();
    const labels = response!.labels;
    expect(new Set(labels).size).toBe(5);

    const colors = bench.colors;
    expect(new Set(colors).size).toBe(5); // every point got one of 5 group colors
    expect(colors).not.toContain(UNGROUPED_COLOR);

    // the render model's color partition is exactly the label partition
    const owner = membershipIndex(bench.registry);
    const labelToGroup = new Map<number, number>();
    labels.forEach((label, pointId) => {
      const group = owner.get(pointId);
      expect(group).toBeDefined();
      if (!labelToGroup.has(label)) labelToGroup.set(label, group!);
      expect(group).toBe(labelToGroup.get(label));
    });

    // rendered colors agree with the registry snapshot fetched fresh
    const remote = (await freshClient().getRegistry(datasetId)).registry;
    const colorOf = new Map(remote.groups.map((g) => [g.group_id, g.color]));
    labels.forEach((label, pointId) => {
      expect(colors[pointId]).toBe(colorOf.get(labelToGroup.get(label)!));
    });

    // identical request, fresh workbench: deterministic regrouping
    await resetWorkspace(freshClient());
    const again = new Workbench(freshClient(), datasetId);
    await again.load({ width: 600, height: 600 });
    const replay = await again.runClustering(
      toRequest({ ...DEFAULT_FORM, nClusters: 5, seed: 3 }, true),
    );
    expect(replay!.labels).toEqual(labels);
  });

  it("examine hover produces ticks across every panel and shows annotations", async () => {
    const bench = new Workbench(freshClient(), datasetId);
    await bench.load({ width: 600, height: 600 });
    const gid = await bench.createGroup("annotated");
    await bench.assignPoints(gid!, [0, 1, 2]);
    await bench.annotateGroup(gid!, "bright rim");
    bench.view.setToolMode(ToolMode.Examine);

    await bench.hoverPoint(1);
    expect(bench.hoverTicks.length).toBe(bench.sandbox.elements.length);
    expect(bench.hoverAnnotation).toBe("bright rim");

    await bench.hoverPoint(null);
    expect(bench.hoverTicks).toEqual([]);
  });

  it("locked groups reject lasso edits with a visible notice", async () => {
    const bench = new Workbench(freshClient(), datasetId);
    await bench.load({ width: 600, height: 600 });
    const gid = await bench.createGroup("frozen");
    await bench.assignPoints(gid!, [5]);
    await bench.setGroupLocked(gid!, true);

    bench.view.setToolMode(ToolMode.Lasso);
    const trace = new LassoTrace(0);
    for (const [x, y] of [[-1, -1], [3, -1], [3, 3], [-1, 3]] as const) {
      const [sx, sy] = bench.camera.toScreen(x, y);
      trace.add(sx, sy);
    }
    await bench.applyLasso(trace, false);
    expect(bench.view.notice?.kind).toBe("error");
    expect(bench.view.notice?.text).toContain("group_locked");
    const remote = (await freshClient().getRegistry(datasetId)).registry;
    expect(remote.groups.find((g) => g.group_id === gid)!.members).toEqual([5]);
  });
});
