import { Camera } from "./camera.js";

/**
 * Collects a free-form lasso path in screen space and converts it to a
 * dataset-coordinate polygon for the backend. The client never decides which
 * points fall inside; selection geometry is the engine's job.
 */
export class LassoTrace {
  private readonly screenPoints: [number, number][] = [];

  /** Skip samples closer than this many pixels to keep payloads small. */
  constructor(private readonly minStepPx = 2) {}

  get length(): number {
    return this.screenPoints.length;
  }

  add(sx: number, sy: number): void {
    const last = this.screenPoints[this.screenPoints.length - 1];
    if (last) {
      const dx = sx - last[0];
      const dy = sy - last[1];
      if (dx * dx + dy * dy < this.minStepPx * this.minStepPx) return;
    }
    this.screenPoints.push([sx, sy]);
  }

  /** The path so far, for drawing the rubber band. */
  get path(): ReadonlyArray<[number, number]> {
    return this.screenPoints;
  }

  /**
   * Close the path and map it to dataset coordinates. Returns null when the
   * gesture is too short to bound any area (the backend would reject it).
   */
  toPolygon(camera: Camera): [number, number][] | null {
    if (this.screenPoints.length < 3) return null;
    return this.screenPoints.map(([sx, sy]) => camera.toData(sx, sy));
  }
}
