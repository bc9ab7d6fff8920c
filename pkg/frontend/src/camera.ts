/** Pan/zoom camera mapping dataset coordinates onto the canvas. */

export interface Size {
  width: number;
  height: number;
}

const MIN_DOT_RADIUS = 1.5;
const MAX_DOT_RADIUS = 9;

export class Camera {
  /** Screen pixels per dataset unit. Always > 0. */
  zoom = 1;
  /** Screen position of the dataset origin. */
  offsetX = 0;
  offsetY = 0;

  /** Frame the given bounds with a margin so every point is visible. */
  fit(bounds: [number, number, number, number], viewport: Size, margin = 24): void {
    const [minX, minY, maxX, maxY] = bounds;
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    this.zoom = Math.min(
      (viewport.width - 2 * margin) / spanX,
      (viewport.height - 2 * margin) / spanY,
    );
    if (!(this.zoom > 0) || !isFinite(this.zoom)) this.zoom = 1;
    // center the data box in the viewport (screen y grows downward)
    this.offsetX = viewport.width / 2 - this.zoom * (minX + spanX / 2);
    this.offsetY = viewport.height / 2 + this.zoom * (minY + spanY / 2);
  }

  toScreen(x: number, y: number): [number, number] {
    return [this.offsetX + this.zoom * x, this.offsetY - this.zoom * y];
  }

  toData(sx: number, sy: number): [number, number] {
    return [(sx - this.offsetX) / this.zoom, (this.offsetY - sy) / this.zoom];
  }

  panBy(dxScreen: number, dyScreen: number): void {
    this.offsetX += dxScreen;
    this.offsetY += dyScreen;
  }

  /** Zoom by a factor keeping the screen point (sx, sy) fixed. */
  zoomAt(factor: number, sx: number, sy: number): void {
    const next = this.zoom * factor;
    if (!(next > 0) || !isFinite(next)) return;
    const [dx, dy] = this.toData(sx, sy);
    this.zoom = next;
    this.offsetX = sx - this.zoom * dx;
    this.offsetY = sy + this.zoom * dy;
  }

  /**
   * Dot radius shrinks as the view zooms out so dense grids stay legible,
   * clamped to stay visible and non-overwhelming.
   */
  dotRadius(gridSpacing = 1): number {
    const raw = this.zoom * gridSpacing * 0.38;
    return Math.min(MAX_DOT_RADIUS, Math.max(MIN_DOT_RADIUS, raw));
  }
}
