/** The microbrowser state machine: fetch, cache, parse, render, input.
 *
 * Talks plain HTTP (the gateway is transparent here) but refuses any
 * content that is not text/vnd.wap.wml or image/vnd.wap.wbmp -- this
 * device cannot render HTML or PNG, and pretending otherwise would
 * hide server bugs.
 */

import { HttpCache } from "./cache.js";
import { DEFAULT_GEOMETRY, Screen, type ScreenGeometry } from "./screen.js";
import { decodeWbmp, type Bitmap } from "./wbmp.js";
import {
  parseWml,
  WmlParseError,
  type AnchorEl,
  type Card,
  type CardElement,
  type InputEl,
} from "./wml.js";

export const WML_CONTENT_TYPE = "text/vnd.wap.wml";
export const WBMP_CONTENT_TYPE = "image/vnd.wap.wbmp";

export interface FetchResult {
  status: number;
  contentType: string;
  cacheControl: string | null;
  body: Uint8Array;
}

export type Fetcher = (url: string) => Promise<FetchResult>;

export interface MicrobrowserOptions {
  fetcher: Fetcher;
  clock?: () => number;
  geometry?: ScreenGeometry;
  onUpdate?: () => void;
}

type Status = "ok" | "no-network" | "error";

type Focusable = InputEl | AnchorEl;

export class Microbrowser {
  readonly screen: Screen;
  readonly cache: HttpCache;
  online = true;

  private readonly fetcher: Fetcher;
  private readonly onUpdate: () => void;
  private vars = new Map<string, string>();
  private history: string[] = [];
  private currentUrl: string | null = null;
  private card: Card | null = null;
  private images = new Map<string, Bitmap>();
  private focusables: Focusable[] = [];
  private focusIndex = 0;
  private status: Status = "ok";
  private statusMessage = "";

  constructor(opts: MicrobrowserOptions) {
    this.fetcher = opts.fetcher;
    this.cache = new HttpCache(opts.clock);
    this.screen = new Screen(opts.geometry ?? DEFAULT_GEOMETRY);
    this.onUpdate = opts.onUpdate ?? (() => {});
  }

  get currentCard(): Card | null {
    return this.card;
  }

  get screenStatus(): Status {
    return this.status;
  }

  get focused(): Focusable | null {
    return this.focusables[this.focusIndex] ?? null;
  }

  resolve(url: string): string {
    return new URL(url, this.currentUrl ?? undefined).toString();
  }

  /** Cache-first load; null means unreachable (offline, uncached). */
  private async load(url: string, wantType: string): Promise<{ contentType: string; body: Uint8Array } | null> {
    const cached = this.cache.get(url);
    if (cached) return cached;
    if (!this.online) return null;
    const result = await this.fetcher(url);
    if (result.status !== 200) {
      throw new Error(`HTTP ${result.status}`);
    }
    const contentType = result.contentType.split(";")[0].trim();
    if (contentType !== wantType) {
      throw new Error(`device cannot render ${contentType || "unknown content"}`);
    }
    this.cache.put(url, contentType, result.body, HttpCache.maxAgeOf(result.cacheControl));
    return { contentType, body: result.body };
  }

  async navigate(url: string, push = true): Promise<void> {
    const absolute = this.resolve(url);
    let loaded: { body: Uint8Array } | null;
    try {
      loaded = await this.load(absolute, WML_CONTENT_TYPE);
    } catch (err) {
      this.showError(String(err instanceof Error ? err.message : err));
      return;
    }
    if (loaded === null) {
      this.status = "no-network";
      this.statusMessage = "No network";
      this.card = null;
      this.render();
      return;
    }
    let card: Card;
    try {
      card = parseWml(new TextDecoder().decode(loaded.body)).cards[0];
    } catch (err) {
      if (err instanceof WmlParseError) {
        this.showError(`Bad deck: ${err.message}`);
        return;
      }
      throw err;
    }
    if (push && this.currentUrl) this.history.push(this.currentUrl);
    this.currentUrl = absolute;
    this.card = card;
    this.status = "ok";
    this.statusMessage = "";
    this.focusables = card.elements.filter(
      (el): el is Focusable => el.kind === "input" || el.kind === "anchor",
    );
    this.focusIndex = 0;
    this.images.clear();
    for (const el of card.elements) {
      if (el.kind !== "image") continue;
      const imageUrl = this.resolve(el.src);
      try {
        const image = await this.load(imageUrl, WBMP_CONTENT_TYPE);
        if (image) this.images.set(el.src, decodeWbmp(image.body));
      } catch {
        // image stays missing; alt text renders instead
      }
    }
    this.render();
  }

  async back(): Promise<void> {
    const prev = this.history.pop();
    if (prev) await this.navigate(prev, false);
  }

  /** Feed one character to the focused input, honoring its format mask. */
  key(ch: string): void {
    const el = this.focused;
    if (!el || el.kind !== "input") return;
    if (el.format && /N/.test(el.format) && !/^[0-9]$/.test(ch)) return;
    const value = this.vars.get(el.name) ?? "";
    if (el.maxlength !== null && value.length >= el.maxlength) return;
    this.vars.set(el.name, value + ch);
    this.render();
  }

  backspace(): void {
    const el = this.focused;
    if (!el || el.kind !== "input") return;
    const value = this.vars.get(el.name) ?? "";
    this.vars.set(el.name, value.slice(0, -1));
    this.render();
  }

  focusNext(): void {
    if (this.focusables.length === 0) return;
    this.focusIndex = (this.focusIndex + 1) % this.focusables.length;
    this.render();
  }

  varValue(name: string): string {
    return this.vars.get(name) ?? "";
  }

  /** Substitute $(name) variables, as the phone does before following a link. */
  substitute(href: string): string {
    return href.replace(/\$\((\w+)\)/g, (_, name: string) =>
      encodeURIComponent(this.vars.get(name) ?? ""),
    );
  }

  async activate(): Promise<void> {
    const el = this.focused;
    if (!el || el.kind !== "anchor") return;
    await this.navigate(this.substitute(el.href));
  }

  render(): void {
    const s = this.screen;
    s.clear();
    const lh = s.lineHeight;
    if (this.status !== "ok") {
      s.drawText(2, 2, this.status === "no-network" ? "NO NETWORK" : "ERROR");
      for (const [i, line] of wrap(this.statusMessage, s.columns).slice(0, 6).entries()) {
        s.drawText(2, 10 + i * lh, line);
      }
      this.drawSoftkeys();
      this.onUpdate();
      return;
    }
    if (!this.card) {
      this.drawSoftkeys();
      this.onUpdate();
      return;
    }
    s.drawText(2, 1, this.card.title.slice(0, s.columns));
    s.hline(7);
    let y = 9;
    for (const el of this.card.elements) {
      if (y >= s.height - 8) break;
      y = this.drawElement(el, y);
    }
    this.drawSoftkeys();
    this.onUpdate();
  }

  private drawElement(el: CardElement, y: number): number {
    const s = this.screen;
    const lh = s.lineHeight;
    const marker = (target: Focusable) => (this.focused === target ? ">" : " ");
    switch (el.kind) {
      case "text": {
        for (const line of wrap(el.text, s.columns - 1)) {
          s.drawText(2, y, line);
          y += lh;
        }
        return y;
      }
      case "input": {
        const raw = this.vars.get(el.name) ?? "";
        const value = el.masked ? "*".repeat(raw.length) : raw;
        s.drawText(0, y, `${marker(el)}${el.label}[${value}]`);
        return y + lh;
      }
      case "anchor": {
        s.drawText(0, y, `${marker(el)}[${el.label}]`);
        return y + lh;
      }
      case "image": {
        const bitmap = this.images.get(el.src);
        if (!bitmap) {
          s.drawText(2, y, `(${el.alt || "image"})`);
          return y + lh;
        }
        const x = Math.max(0, Math.floor((s.width - bitmap.width) / 2));
        const rect = s.drawBitmap(bitmap, x, y);
        if (!rect) {
          s.drawText(2, y, "(image too large)");
          return y + lh;
        }
        return y + rect.h + 1;
      }
    }
  }

  private drawSoftkeys(): void {
    const s = this.screen;
    s.hline(s.height - 7);
    s.drawText(1, s.height - 6, "BACK");
    if (!this.online) s.drawText(38, s.height - 6, "OFF");
    s.drawText(s.width - 13, s.height - 6, "OK");
  }

  private showError(message: string): void {
    this.status = "error";
    this.statusMessage = message;
    this.card = null;
    this.render();
  }
}

function wrap(text: string, columns: number): string[] {
  const words = text.split(/\s+/).filter(Boolean);
  const lines: string[] = [];
  let line = "";
  for (const word of words) {
    if (line && line.length + 1 + word.length > columns) {
      lines.push(line);
      line = word;
    } else {
      line = line ? `${line} ${word}` : word;
    }
  }
  if (line) lines.push(line);
  return lines.length ? lines : [""];
}
