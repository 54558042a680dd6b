/** Simulated monochrome LCD framebuffer.
 *
 * Default geometry matches the measured target handset: 96x64 total,
 * of which at most 46x46 is usable for an inline image. Ink is 1
 * (dark pixel on a light LCD), so a WBMP white bit (1) becomes ink 0.
 */

import { ADVANCE, GLYPH_HEIGHT, LINE_HEIGHT, glyphFor } from "./font.js";
import type { Bitmap } from "./wbmp.js";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ScreenGeometry {
  width: number;
  height: number;
  imageViewport: number;
}

export const DEFAULT_GEOMETRY: ScreenGeometry = { width: 96, height: 64, imageViewport: 46 };

export class Screen {
  readonly width: number;
  readonly height: number;
  readonly imageViewport: number;
  pixels: Uint8Array;
  lastImageRect: Rect | null = null;

  constructor(geometry: ScreenGeometry = DEFAULT_GEOMETRY) {
    this.width = geometry.width;
    this.height = geometry.height;
    this.imageViewport = geometry.imageViewport;
    this.pixels = new Uint8Array(this.width * this.height);
  }

  clear(): void {
    this.pixels.fill(0);
    this.lastImageRect = null;
  }

  set(x: number, y: number, ink: boolean): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.pixels[y * this.width + x] = ink ? 1 : 0;
  }

  get(x: number, y: number): boolean {
    return this.pixels[y * this.width + x] === 1;
  }

  hline(y: number): void {
    for (let x = 0; x < this.width; x++) this.set(x, y, true);
  }

  drawText(x: number, y: number, text: string): void {
    let cx = x;
    for (const ch of text) {
      const glyph = glyphFor(ch);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < glyph[gy].length; gx++) {
          if (glyph[gy][gx]) this.set(cx + gx, y + gy, true);
        }
      }
      cx += ADVANCE;
    }
  }

  get columns(): number {
    return Math.floor(this.width / ADVANCE);
  }

  get lineHeight(): number {
    return LINE_HEIGHT;
  }

  /** Draw a WBMP 1:1, record where it landed. Oversized images are refused. */
  drawBitmap(bitmap: Bitmap, x: number, y: number): Rect | null {
    if (bitmap.width > this.imageViewport || bitmap.height > this.imageViewport) {
      return null;
    }
    for (let by = 0; by < bitmap.height; by++) {
      for (let bx = 0; bx < bitmap.width; bx++) {
        this.set(x + bx, y + by, bitmap.pixels[by * bitmap.width + bx] === 0);
      }
    }
    const rect = { x, y, w: bitmap.width, h: bitmap.height };
    this.lastImageRect = rect;
    return rect;
  }

  /** Extract a region as a dark-module grid (true = ink). */
  exportGrid(rect: Rect): boolean[][] {
    const grid: boolean[][] = [];
    for (let y = 0; y < rect.h; y++) {
      const row: boolean[] = [];
      for (let x = 0; x < rect.w; x++) {
        row.push(this.get(rect.x + x, rect.y + y));
      }
      grid.push(row);
    }
    return grid;
  }
}
