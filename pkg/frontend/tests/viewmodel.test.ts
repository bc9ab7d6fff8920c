import { describe, expect, it } from "vitest";

import { Camera } from "../src/camera.js";
import { membershipIndex, pointColors, UNGROUPED_COLOR } from "../src/colors.js";
import { DEFAULT_FORM, errorsFromApi, toRequest, validateForm } from "../src/clusterPanel.js";
import { LassoTrace } from "../src/lasso.js";
import { ApiError, RegistrySnapshot } from "../src/types.js";
import { ToolMode, ViewState } from "../src/viewstate.js";

const registry: RegistrySnapshot = {
  active_group: 1,
  groups: [
    { group_id: 0, name: "a", color: "#111111", locked: false, annotation: null, members: [0, 2] },
    { group_id: 1, name: "b", color: "#222222", locked: true, annotation: "note", members: [3] },
  ],
};

describe("point colors", () => {
  it("colors members by group and the rest neutral gray", () => {
    const colors = pointColors(5, registry);
    expect(colors).toEqual(["#111111", UNGROUPED_COLOR, "#111111", "#222222", UNGROUPED_COLOR]);
  });

  it("builds the ownership index", () => {
    const owner = membershipIndex(registry);
    expect(owner.get(3)).toBe(1);
    expect(owner.has(1)).toBe(false);
  });
});

describe("view state", () => {
  it("keeps exactly one tool mode and clears hover when leaving examine", () => {
    const view = new ViewState();
    view.setToolMode(ToolMode.Examine);
    view.hoverPoint = 12;
    view.setToolMode(ToolMode.Lasso);
    expect(view.toolMode).toBe(ToolMode.Lasso);
    expect(view.hoverPoint).toBeNull();
  });

  it("toggles hidden elements", () => {
    const view = new ViewState();
    view.toggleElementHidden("Fe");
    expect(view.sandbox.hidden.has("Fe")).toBe(true);
    view.toggleElementHidden("Fe");
    expect(view.sandbox.hidden.has("Fe")).toBe(false);
  });
});

describe("lasso trace", () => {
  it("decimates near-duplicate samples and maps to data space", () => {
    const camera = new Camera();
    camera.fit([0, 0, 10, 10], { width: 200, height: 200 });
    const trace = new LassoTrace(2);
    trace.add(10, 10);
    trace.add(10.5, 10.5); // dropped, too close
    trace.add(60, 10);
    trace.add(60, 60);
    expect(trace.length).toBe(3);
    const polygon = trace.toPolygon(camera)!;
    expect(polygon.length).toBe(3);
    const [sx, sy] = camera.toScreen(...polygon[0]);
    expect(sx).toBeCloseTo(10, 6);
    expect(sy).toBeCloseTo(10, 6);
  });

  it("refuses degenerate gestures", () => {
    const camera = new Camera();
    const trace = new LassoTrace();
    trace.add(0, 0);
    trace.add(50, 50);
    expect(trace.toPolygon(camera)).toBeNull();
  });
});

describe("cluster form", () => {
  it("accepts the defaults for a reasonable dataset", () => {
    expect(validateForm(DEFAULT_FORM, 576)).toEqual({});
  });

  it("rejects k beyond the point count before any request", () => {
    const errors = validateForm({ ...DEFAULT_FORM, nClusters: 1000 }, 576);
    expect(errors.n_clusters).toMatch(/576/);
  });

  it("rejects perplexity at or above n", () => {
    const errors = validateForm({ ...DEFAULT_FORM, reduction: "tsne", perplexity: 576 }, 576);
    expect(errors.perplexity).toMatch(/below/);
  });

  it("builds requests matching the backend contract", () => {
    const request = toRequest({ ...DEFAULT_FORM, algorithm: "hierarchical" }, true);
    expect(request.linkage).toBe("ward");
    expect(request.to_groups).toBe(true);
    const pca = toRequest({ ...DEFAULT_FORM, reduction: "pca" }, false);
    expect(pca.reduction).toEqual({ kind: "pca", variance_fraction: 0.95 });
    expect(pca.linkage).toBeUndefined();
  });

  it("maps backend rejections to the offending field", () => {
    const byField = errorsFromApi(new ApiError(400, {
      error_code: "invalid_config", message: "bad linkage", field: "linkage",
    }));
    expect(byField.linkage).toBe("bad linkage");
    const byCode = errorsFromApi(new ApiError(422, {
      error_code: "k_too_large", message: "too many clusters",
    }));
    expect(byCode.n_clusters).toBe("too many clusters");
  });
});
