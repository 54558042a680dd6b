/** 3x5 pixel font, monochrome LCD style. Lowercase maps to uppercase;
 * anything without a glyph renders as a hollow box. */

const RAW: Record<string, string> = {
  A: "010 101 111 101 101",
  B: "110 101 110 101 110",
  C: "011 100 100 100 011",
  D: "110 101 101 101 110",
  E: "111 100 110 100 111",
  F: "111 100 110 100 100",
  G: "011 100 101 101 011",
  H: "101 101 111 101 101",
  I: "111 010 010 010 111",
  J: "001 001 001 101 010",
  K: "101 101 110 101 101",
  L: "100 100 100 100 111",
  M: "101 111 101 101 101",
  N: "110 101 101 101 101",
  O: "010 101 101 101 010",
  P: "110 101 110 100 100",
  Q: "010 101 101 010 001",
  R: "110 101 110 101 101",
  S: "011 100 010 001 110",
  T: "111 010 010 010 010",
  U: "101 101 101 101 111",
  V: "101 101 101 101 010",
  W: "101 101 101 111 101",
  X: "101 101 010 101 101",
  Y: "101 101 010 010 010",
  Z: "111 001 010 100 111",
  "0": "111 101 101 101 111",
  "1": "010 110 010 010 111",
  "2": "111 001 111 100 111",
  "3": "111 001 111 001 111",
  "4": "101 101 111 001 001",
  "5": "111 100 111 001 111",
  "6": "111 100 111 101 111",
  "7": "111 001 001 010 010",
  "8": "111 101 111 101 111",
  "9": "111 101 111 001 111",
  " ": "000 000 000 000 000",
  ":": "000 010 000 010 000",
  ".": "000 000 000 000 010",
  ",": "000 000 000 010 100",
  "-": "000 000 111 000 000",
  "+": "000 010 111 010 000",
  "*": "101 010 111 010 101",
  "/": "001 001 010 100 100",
  "$": "010 011 010 110 010",
  "%": "101 001 010 100 101",
  "(": "001 010 010 010 001",
  ")": "100 010 010 010 100",
  "[": "011 010 010 010 011",
  "]": "110 010 010 010 110",
  ">": "100 010 001 010 100",
  "<": "001 010 100 010 001",
  "?": "111 001 010 000 010",
  "!": "010 010 010 000 010",
  "=": "000 111 000 111 000",
  _: "000 000 000 000 111",
  "'": "010 010 000 000 000",
  "&": "010 101 010 101 011",
  "#": "101 111 101 111 101",
};

const FALLBACK = "111 101 101 101 111";

export const GLYPH_WIDTH = 3;
export const GLYPH_HEIGHT = 5;
export const ADVANCE = 4;
export const LINE_HEIGHT = 6;

const GLYPHS = new Map<string, number[][]>();
for (const [ch, rows] of Object.entries(RAW)) {
  GLYPHS.set(
    ch,
    rows.split(" ").map((row) => row.split("").map((bit) => (bit === "1" ? 1 : 0))),
  );
}

export function glyphFor(ch: string): number[][] {
  const direct = GLYPHS.get(ch) ?? GLYPHS.get(ch.toUpperCase());
  if (direct) return direct;
  return FALLBACK.split(" ").map((row) => row.split("").map((bit) => (bit === "1" ? 1 : 0)));
}
