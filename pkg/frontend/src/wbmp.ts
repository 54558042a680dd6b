/** WBMP type 0 codec: the only image format the microbrowser accepts. */

export interface Bitmap {
  width: number;
  height: number;
  /** Row-major, 1 = white per the format. */
  pixels: Uint8Array;
}

export class WbmpError extends Error {}

export function decodeWbmp(data: Uint8Array): Bitmap {
  let pos = 0;
  const mbi = (): number => {
    let value = 0;
    let count = 0;
    for (;;) {
      if (pos >= data.length) throw new WbmpError("truncated multi-byte integer");
      const b = data[pos++];
      if (++count > 5) throw new WbmpError("multi-byte integer exceeds 32 bits");
      value = value * 128 + (b & 0x7f);
      if ((b & 0x80) === 0) return value;
    }
  };
  const typeField = mbi();
  if (typeField !== 0) throw new WbmpError(`unsupported WBMP type ${typeField}`);
  if (pos >= data.length) throw new WbmpError("missing fixed header byte");
  if (data[pos++] !== 0) throw new WbmpError("extension headers not supported");
  const width = mbi();
  const height = mbi();
  if (width < 1 || height < 1) throw new WbmpError("zero-sized bitmap");
  const rowBytes = (width + 7) >> 3;
  if (data.length - pos < rowBytes * height) throw new WbmpError("pixel data truncated");
  const pixels = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    const rowOff = pos + y * rowBytes;
    for (let x = 0; x < width; x++) {
      pixels[y * width + x] = (data[rowOff + (x >> 3)] >> (7 - (x & 7))) & 1;
    }
  }
  return { width, height, pixels };
}

export function encodeWbmp(bitmap: Bitmap): Uint8Array {
  const mbi = (value: number): number[] => {
    const out = [value & 0x7f];
    value = Math.floor(value / 128);
    while (value > 0) {
      out.unshift(0x80 | (value & 0x7f));
      value = Math.floor(value / 128);
    }
    return out;
  };
  const rowBytes = (bitmap.width + 7) >> 3;
  const header = [0x00, 0x00, ...mbi(bitmap.width), ...mbi(bitmap.height)];
  const out = new Uint8Array(header.length + rowBytes * bitmap.height);
  out.set(header);
  for (let y = 0; y < bitmap.height; y++) {
    const rowOff = header.length + y * rowBytes;
    for (let x = 0; x < bitmap.width; x++) {
      if (bitmap.pixels[y * bitmap.width + x]) {
        out[rowOff + (x >> 3)] |= 0x80 >> (x & 7);
      }
    }
  }
  return out;
}
