/** World (planar meters) <-> screen (canvas pixels) transform with pan/zoom.
 * Screen y grows downward, world y grows upward. */

export interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export class Viewport {
  scale = 1; // pixels per meter
  offsetX = 0; // world coordinate at the left edge
  offsetY = 0; // world coordinate at the bottom edge

  constructor(
    public width: number,
    public height: number,
  ) {}

  /** Fit the bounds into the canvas with a relative margin. */
  fit(bounds: Bounds, margin = 0.05): void {
    const spanX = Math.max(bounds.maxX - bounds.minX, 1);
    const spanY = Math.max(bounds.maxY - bounds.minY, 1);
    this.scale = Math.min(this.width / (spanX * (1 + 2 * margin)), this.height / (spanY * (1 + 2 * margin)));
    const centerX = (bounds.minX + bounds.maxX) / 2;
    const centerY = (bounds.minY + bounds.maxY) / 2;
    this.offsetX = centerX - this.width / (2 * this.scale);
    this.offsetY = centerY - this.height / (2 * this.scale);
  }

  toScreen(x: number, y: number): [number, number] {
    return [(x - this.offsetX) * this.scale, this.height - (y - this.offsetY) * this.scale];
  }

  toWorld(px: number, py: number): [number, number] {
    return [px / this.scale + this.offsetX, (this.height - py) / this.scale + this.offsetY];
  }

  panByPixels(dx: number, dy: number): void {
    this.offsetX -= dx / this.scale;
    this.offsetY += dy / this.scale;
  }

  /** Zoom by a factor keeping the world point under (px, py) fixed. */
  zoomAt(px: number, py: number, factor: number): void {
    const [wx, wy] = this.toWorld(px, py);
    this.scale *= factor;
    this.offsetX = wx - px / this.scale;
    this.offsetY = wy - (this.height - py) / this.scale;
  }
}
