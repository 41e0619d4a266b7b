/**
 * Canvas scatter plot for large point clouds.
 *
 * Points are drawn as small batched rects grouped by venue color (one
 * fillStyle change per venue per frame), which keeps ~60k points responsive
 * without per-point DOM nodes. Pan with pointer drag, zoom with the wheel;
 * hit-testing is a linear nearest-point scan in screen space.
 */

import { VenuePalette } from "./palette.js";
import type { Filters, Point } from "./types.js";

const MARK_SIZE = 3;
const HIT_RADIUS = 8;

interface Viewport {
  centerX: number;
  centerY: number;
  scale: number;
}

export class ScatterPlot {
  private points: Point[] = [];
  private byVenue = new Map<string, number[]>();
  private visible: boolean[] = [];
  private view: Viewport = { centerX: 0, centerY: 0, scale: 1 };
  private readonly ctx: CanvasRenderingContext2D | null;
  readonly palette = new VenuePalette();
  onSelect: ((docId: string) => void) | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    ctx?: CanvasRenderingContext2D | null,
  ) {
    this.ctx = ctx !== undefined ? ctx : canvas.getContext("2d");
    canvas.addEventListener("click", (event) => {
      const { x, y } = this.localCoords(event);
      const docId = this.hitTest(x, y);
      if (docId !== null && this.onSelect) this.onSelect(docId);
    });
    canvas.addEventListener("wheel", (event) => {
      event.preventDefault();
      this.zoomBy(event.deltaY < 0 ? 1.2 : 1 / 1.2);
    });
    let dragging: { x: number; y: number } | null = null;
    canvas.addEventListener("pointerdown", (event) => {
      dragging = this.localCoords(event);
    });
    canvas.addEventListener("pointermove", (event) => {
      if (!dragging) return;
      const here = this.localCoords(event);
      this.view.centerX -= (here.x - dragging.x) / this.view.scale;
      this.view.centerY += (here.y - dragging.y) / this.view.scale;
      dragging = here;
      this.render();
    });
    canvas.addEventListener("pointerup", () => {
      dragging = null;
    });
  }

  private localCoords(event: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  }

  setPoints(points: Point[]): void {
    this.points = points;
    this.byVenue = new Map();
    points.forEach((point, index) => {
      let bucket = this.byVenue.get(point.venue);
      if (!bucket) this.byVenue.set(point.venue, (bucket = []));
      bucket.push(index);
    });
    this.visible = points.map(() => true);
    this.fitView();
    this.render();
  }

  setFilters(filters: Filters): void {
    const venues = filters.venues === null ? null : new Set(filters.venues);
    this.visible = this.points.map(
      (point) =>
        (venues === null || venues.has(point.venue)) &&
        (filters.yearFrom === null || point.year >= filters.yearFrom) &&
        (filters.yearTo === null || point.year <= filters.yearTo),
    );
    this.render();
  }

  venues(): string[] {
    return [...this.byVenue.keys()];
  }

  visibleCount(): number {
    return this.visible.filter(Boolean).length;
  }

  private fitView(): void {
    if (this.points.length === 0) return;
    let minX = Infinity;
    let maxX = -Infinity;
    let minY = Infinity;
    let maxY = -Infinity;
    for (const point of this.points) {
      minX = Math.min(minX, point.x);
      maxX = Math.max(maxX, point.x);
      minY = Math.min(minY, point.y);
      maxY = Math.max(maxY, point.y);
    }
    this.view.centerX = (minX + maxX) / 2;
    this.view.centerY = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    this.view.scale = Math.min(
      (this.canvas.width * 0.9) / spanX,
      (this.canvas.height * 0.9) / spanY,
    );
  }

  zoomBy(factor: number): void {
    this.view.scale *= factor;
    this.render();
  }

  toScreen(point: Point): { sx: number; sy: number } {
    return {
      sx: (point.x - this.view.centerX) * this.view.scale + this.canvas.width / 2,
      sy: this.canvas.height / 2 - (point.y - this.view.centerY) * this.view.scale,
    };
  }

  hitTest(offsetX: number, offsetY: number): string | null {
    let best: string | null = null;
    let bestDist = HIT_RADIUS * HIT_RADIUS;
    this.points.forEach((point, index) => {
      if (!this.visible[index]) return;
      const { sx, sy } = this.toScreen(point);
      const dist = (sx - offsetX) ** 2 + (sy - offsetY) ** 2;
      if (dist < bestDist) {
        bestDist = dist;
        best = point.doc_id;
      }
    });
    return best;
  }

  render(): void {
    const ctx = this.ctx;
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const half = MARK_SIZE / 2;
    for (const [venue, indexes] of this.byVenue) {
      ctx.fillStyle = this.palette.color(venue);
      for (const index of indexes) {
        if (!this.visible[index]) continue;
        const { sx, sy } = this.toScreen(this.points[index]);
        if (sx < -MARK_SIZE || sy < -MARK_SIZE) continue;
        if (sx > this.canvas.width + MARK_SIZE || sy > this.canvas.height + MARK_SIZE) continue;
        ctx.fillRect(sx - half, sy - half, MARK_SIZE, MARK_SIZE);
      }
    }
  }
}
