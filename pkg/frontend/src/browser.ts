/** Thin DOM shell around the microbrowser core: a scaled canvas for the
 * 96x64 LCD, keypad buttons, and a connectivity toggle. All protocol
 * behaviour lives in the core; this file only paints and forwards keys.
 */

import { Microbrowser, type FetchResult } from "./microbrowser.js";

const SCALE = 4;

function fetcher(url: string): Promise<FetchResult> {
  return fetch(url).then(async (resp) => ({
    status: resp.status,
    contentType: resp.headers.get("Content-Type") ?? "",
    cacheControl: resp.headers.get("Cache-Control"),
    body: new Uint8Array(await resp.arrayBuffer()),
  }));
}

function paint(mb: Microbrowser, ctx: CanvasRenderingContext2D): void {
  const { width, height } = mb.screen;
  ctx.fillStyle = "#c7d8b0"; // period LCD green
  ctx.fillRect(0, 0, width * SCALE, height * SCALE);
  ctx.fillStyle = "#222";
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if (mb.screen.get(x, y)) {
        ctx.fillRect(x * SCALE, y * SCALE, SCALE, SCALE);
      }
    }
  }
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const service = (params.get("service") ?? "http://127.0.0.1:8080").replace(/\/$/, "");

  const canvas = document.getElementById("lcd") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");

  const mb = new Microbrowser({
    fetcher,
    onUpdate: () => paint(mb, ctx),
  });

  const wire = (id: string, fn: () => void) => {
    const el = document.getElementById(id);
    if (el) el.addEventListener("click", fn);
  };
  wire("key-down", () => mb.focusNext());
  wire("key-ok", () => void mb.activate());
  wire("key-back", () => void mb.back());
  wire("key-del", () => mb.backspace());
  for (let d = 0; d <= 9; d++) {
    wire(`key-${d}`, () => mb.key(String(d)));
  }
  const online = document.getElementById("online") as HTMLInputElement | null;
  if (online) {
    online.addEventListener("change", () => {
      mb.online = online.checked;
      mb.render();
    });
  }
  // Letters come from the host keyboard; multi-tap entry is out of scope.
  window.addEventListener("keydown", (ev) => {
    if (ev.key.length === 1 && /[\w .$%*+\-./:]/.test(ev.key)) {
      mb.key(ev.key);
    } else if (ev.key === "Backspace") {
      mb.backspace();
    } else if (ev.key === "Enter") {
      void mb.activate();
    } else if (ev.key === "Tab" || ev.key === "ArrowDown") {
      ev.preventDefault();
      mb.focusNext();
    }
  });

  void mb.navigate(`${service}/login`);
}

boot();
