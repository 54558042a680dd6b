/** Microbrowser HTTP cache keyed by absolute URL, honoring max-age.
 *
 * An entry past its expiry is never served; whether the device is
 * online makes no difference to that rule. The clock is injected so
 * tests can prove the boundary exactly.
 */

export interface CachedResponse {
  contentType: string;
  body: Uint8Array;
  expiresAt: number; // unix seconds
}

export class HttpCache {
  private entries = new Map<string, CachedResponse>();

  constructor(private clock: () => number = () => Date.now() / 1000) {}

  /** Parse max-age out of a Cache-Control header; 0 for uncacheable. */
  static maxAgeOf(cacheControl: string | null): number {
    if (!cacheControl) return 0;
    if (/no-store|no-cache/.test(cacheControl)) return 0;
    const m = /max-age=(\d+)/.exec(cacheControl);
    return m ? parseInt(m[1], 10) : 0;
  }

  put(url: string, contentType: string, body: Uint8Array, maxAge: number): void {
    if (maxAge <= 0) return;
    this.entries.set(url, {
      contentType,
      body,
      expiresAt: this.clock() + maxAge,
    });
  }

  get(url: string): CachedResponse | null {
    const entry = this.entries.get(url);
    if (!entry) return null;
    if (this.clock() >= entry.expiresAt) {
      this.entries.delete(url);
      return null;
    }
    return entry;
  }

  clear(): void {
    this.entries.clear();
  }
}
