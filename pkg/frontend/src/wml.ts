/** Parser for the WML subset the service emits.
 *
 * Cards contain paragraphs; paragraphs contain text, input fields,
 * anchors and image references. Anything outside that subset is a
 * parse error, which the microbrowser turns into an error card.
 */

export interface TextEl {
  kind: "text";
  text: string;
}

export interface InputEl {
  kind: "input";
  name: string;
  label: string;
  masked: boolean;
  format: string | null;
  maxlength: number | null;
}

export interface AnchorEl {
  kind: "anchor";
  label: string;
  href: string;
}

export interface ImageEl {
  kind: "image";
  src: string;
  alt: string;
}

export type CardElement = TextEl | InputEl | AnchorEl | ImageEl;

export interface Card {
  id: string;
  title: string;
  elements: CardElement[];
}

export interface Deck {
  cards: Card[];
}

export class WmlParseError extends Error {}

interface XmlNode {
  tag: string;
  attrs: Record<string, string>;
  children: (XmlNode | string)[];
}

const ENTITIES: Record<string, string> = {
  amp: "&",
  lt: "<",
  gt: ">",
  quot: '"',
  apos: "'",
};

function decodeEntities(s: string): string {
  return s.replace(/&(#x?[0-9a-fA-F]+|\w+);/g, (_, name: string) => {
    if (name.startsWith("#x") || name.startsWith("#X")) {
      return String.fromCodePoint(parseInt(name.slice(2), 16));
    }
    if (name.startsWith("#")) {
      return String.fromCodePoint(parseInt(name.slice(1), 10));
    }
    const known = ENTITIES[name];
    if (known === undefined) throw new WmlParseError(`unknown entity &${name};`);
    return known;
  });
}

const TOKEN = /<!--[\s\S]*?-->|<\?[\s\S]*?\?>|<!DOCTYPE[^>]*>|<\/([\w:-]+)\s*>|<([\w:-]+)((?:\s+[\w:-]+\s*=\s*"[^"]*")*)\s*(\/?)>|([^<]+)/g;
const ATTR = /([\w:-]+)\s*=\s*"([^"]*)"/g;

function parseXml(document: string): XmlNode {
  const root: XmlNode = { tag: "#root", attrs: {}, children: [] };
  const stack: XmlNode[] = [root];
  let matched = 0;
  TOKEN.lastIndex = 0;
  for (let m = TOKEN.exec(document); m !== null; m = TOKEN.exec(document)) {
    matched += m[0].length;
    const [whole, closeTag, openTag, attrText, selfClose, text] = m;
    if (text !== undefined) {
      const decoded = decodeEntities(text);
      if (decoded.trim()) stack[stack.length - 1].children.push(decoded);
    } else if (openTag !== undefined) {
      const attrs: Record<string, string> = {};
      ATTR.lastIndex = 0;
      for (let a = ATTR.exec(attrText ?? ""); a !== null; a = ATTR.exec(attrText ?? "")) {
        attrs[a[1]] = decodeEntities(a[2]);
      }
      const node: XmlNode = { tag: openTag, attrs, children: [] };
      stack[stack.length - 1].children.push(node);
      if (!selfClose) stack.push(node);
    } else if (closeTag !== undefined) {
      const open = stack.pop();
      if (!open || open.tag !== closeTag) {
        throw new WmlParseError(`mismatched </${closeTag}>`);
      }
    } else if (whole.startsWith("<!") || whole.startsWith("<?")) {
      // declaration or comment: skipped
    }
  }
  if (matched !== document.length) throw new WmlParseError("unparsable markup");
  if (stack.length !== 1) throw new WmlParseError("unclosed element");
  return root;
}

function textContent(node: XmlNode): string {
  return node.children
    .map((c) => (typeof c === "string" ? c : textContent(c)))
    .join("");
}

function lowerParagraph(p: XmlNode, out: CardElement[]): void {
  let pendingLabel = "";
  for (const child of p.children) {
    if (typeof child === "string") {
      pendingLabel += child;
      continue;
    }
    if (child.tag === "input") {
      const name = child.attrs["name"];
      if (!name) throw new WmlParseError("input without name");
      out.push({
        kind: "input",
        name,
        label: pendingLabel.trim(),
        masked: child.attrs["type"] === "password",
        format: child.attrs["format"] ?? null,
        maxlength: child.attrs["maxlength"] ? parseInt(child.attrs["maxlength"], 10) : null,
      });
      pendingLabel = "";
    } else if (child.tag === "a") {
      const href = child.attrs["href"];
      if (!href) throw new WmlParseError("anchor without href");
      out.push({ kind: "anchor", label: textContent(child).trim(), href });
      pendingLabel = "";
    } else if (child.tag === "img") {
      const src = child.attrs["src"];
      if (!src) throw new WmlParseError("img without src");
      out.push({ kind: "image", src, alt: child.attrs["alt"] ?? "" });
      pendingLabel = "";
    } else {
      throw new WmlParseError(`unsupported element <${child.tag}> in paragraph`);
    }
  }
  if (pendingLabel.trim()) out.push({ kind: "text", text: pendingLabel.trim() });
}

export function parseWml(document: string): Deck {
  const root = parseXml(document);
  const wml = root.children.find(
    (c): c is XmlNode => typeof c !== "string" && c.tag === "wml",
  );
  if (!wml) throw new WmlParseError("no <wml> root");
  const cards: Card[] = [];
  for (const child of wml.children) {
    if (typeof child === "string") continue;
    if (child.tag !== "card") throw new WmlParseError(`unexpected <${child.tag}> in deck`);
    const elements: CardElement[] = [];
    for (const el of child.children) {
      if (typeof el === "string") continue;
      if (el.tag !== "p") throw new WmlParseError(`unexpected <${el.tag}> in card`);
      lowerParagraph(el, elements);
    }
    cards.push({
      id: child.attrs["id"] ?? "",
      title: child.attrs["title"] ?? "",
      elements,
    });
  }
  if (cards.length === 0) throw new WmlParseError("deck has no cards");
  return { cards };
}
