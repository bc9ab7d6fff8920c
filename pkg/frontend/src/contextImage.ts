import { Camera } from "./camera.js";
import { DatasetDetail } from "./types.js";

/**
 * Canvas scatter of the sample points in their group colors: the main
 * interaction surface. Pan/zoom/lasso gestures are interpreted by the caller;
 * this class only draws.
 */
export class ContextImage {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(private readonly canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  render(
    dataset: DatasetDetail,
    colors: string[],
    camera: Camera,
    options: {
      hoverPoint?: number | null;
      lassoPath?: ReadonlyArray<[number, number]>;
      annotation?: string | null;
    } = {},
  ): void {
    const { width, height } = this.canvas;
    this.ctx.clearRect(0, 0, width, height);
    this.ctx.fillStyle = "#16181d";
    this.ctx.fillRect(0, 0, width, height);

    const radius = camera.dotRadius();
    // batch by color: one path per group keeps 6400 dots interactive
    const byColor = new Map<string, number[]>();
    for (let i = 0; i < dataset.points.length; i++) {
      const list = byColor.get(colors[i]);
      if (list) list.push(i);
      else byColor.set(colors[i], [i]);
    }
    for (const [color, ids] of byColor) {
      this.ctx.fillStyle = color;
      this.ctx.beginPath();
      for (const i of ids) {
        const p = dataset.points[i];
        const [sx, sy] = camera.toScreen(p.x, p.y);
        if (sx < -radius || sy < -radius || sx > width + radius || sy > height + radius) {
          continue;
        }
        this.ctx.moveTo(sx + radius, sy);
        this.ctx.arc(sx, sy, radius, 0, Math.PI * 2);
      }
      this.ctx.fill();
    }

    if (options.hoverPoint != null) {
      const p = dataset.points[options.hoverPoint];
      const [sx, sy] = camera.toScreen(p.x, p.y);
      this.ctx.strokeStyle = "#ffffff";
      this.ctx.lineWidth = 1.5;
      this.ctx.beginPath();
      this.ctx.arc(sx, sy, radius + 3, 0, Math.PI * 2);
      this.ctx.stroke();
      if (options.annotation) {
        this.ctx.font = "12px system-ui, sans-serif";
        this.ctx.fillStyle = "#f1f3f4";
        this.ctx.fillText(options.annotation, sx + radius + 8, sy - radius - 4);
      }
    }

    const path = options.lassoPath;
    if (path && path.length > 1) {
      this.ctx.strokeStyle = "#ffd166";
      this.ctx.lineWidth = 1;
      this.ctx.setLineDash([4, 3]);
      this.ctx.beginPath();
      this.ctx.moveTo(path[0][0], path[0][1]);
      for (const [sx, sy] of path.slice(1)) this.ctx.lineTo(sx, sy);
      this.ctx.closePath();
      this.ctx.stroke();
      this.ctx.setLineDash([]);
    }
  }

  /** Nearest point within `tolerancePx` of a screen position, or null. */
  hitTest(
    dataset: DatasetDetail,
    camera: Camera,
    sx: number,
    sy: number,
    tolerancePx = 8,
  ): number | null {
    let best: number | null = null;
    let bestDist = tolerancePx * tolerancePx;
    for (const p of dataset.points) {
      const [px, py] = camera.toScreen(p.x, p.y);
      const d = (px - sx) * (px - sx) + (py - sy) * (py - sy);
      if (d <= bestDist) {
        best = p.id;
        bestDist = d;
      }
    }
    return best;
  }
}
