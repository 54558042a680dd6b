"""WML 1.3 decks for the prover flow, plus the gateway-side WBXML encoding.

Only the element subset the protocol decks need is modelled: paragraphs,
inline text, image references, input fields, and anchors. Encoding is
one-way -- this code plays server and gateway, never the phone's binary
parser.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class UnsupportedElement(ValueError):
    pass


@dataclass(frozen=True)
class Paragraph:
    text: str


@dataclass(frozen=True)
class ImageRef:
    src: str
    alt: str


@dataclass(frozen=True)
class InputField:
    name: str
    label: str
    masked: bool = False
    format: str | None = None
    maxlength: int | None = None


@dataclass(frozen=True)
class Anchor:
    label: str
    href: str


Element = Paragraph | ImageRef | InputField | Anchor


@dataclass(frozen=True)
class WmlCard:
    card_id: str
    title: str
    body: tuple[Element, ...]


@dataclass(frozen=True)
class WmlDeck:
    cards: tuple[WmlCard, ...]

    def __post_init__(self) -> None:
        if not self.cards:
            raise ValueError("deck needs at least one card")
        ids = [c.card_id for c in self.cards]
        if len(set(ids)) != len(ids):
            raise ValueError("card ids must be unique within a deck")


NONCE_FORMAT = "N*N"  # numeric-only input mask; length bounds enforced server-side


def build_login_deck(action_url: str, nonce_required: bool = True) -> WmlDeck:
    """Login card: user id, masked PIN, and (unless omitted) the verifier nonce.

    The nonce field is skipped for the cached-token flow where provers
    fetch credentials ahead of time.
    """
    body: list[Element] = [
        InputField(name="user", label="User:"),
        InputField(name="pin", label="PIN:", masked=True),
    ]
    params = "user=$(user)&pin=$(pin)"
    if nonce_required:
        body.append(InputField(name="nonce", label="Nonce:", format=NONCE_FORMAT, maxlength=10))
        params += "&nonce=$(nonce)"
    body.append(Anchor(label="Login", href=f"{action_url}?{params}"))
    return WmlDeck(cards=(WmlCard(card_id="login", title="Login", body=tuple(body)),))


def build_qr_deck(image_url: str, caption: str) -> WmlDeck:
    card = WmlCard(
        card_id="token",
        title="ID Token",
        body=(ImageRef(src=image_url, alt="QR token"), Paragraph(caption)),
    )
    return WmlDeck(cards=(card,))


def build_notice_deck(message: str, retry_url: str | None = None) -> WmlDeck:
    body: list[Element] = [Paragraph(message)]
    if retry_url:
        body.append(Anchor(label="Retry", href=retry_url))
    return WmlDeck(cards=(WmlCard(card_id="notice", title="Notice", body=tuple(body)),))


# ---------------------------------------------------------------------------
# Lowering to a generic element tree shared by both serializers.

@dataclass
class _Node:
    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    children: list["_Node | str"] = field(default_factory=list)


def _lower_element(el: Element) -> _Node:
    if isinstance(el, Paragraph):
        return _Node("p", children=[el.text])
    if isinstance(el, ImageRef):
        return _Node("p", children=[_Node("img", attrs=[("src", el.src), ("alt", el.alt)])])
    if isinstance(el, InputField):
        attrs = [("name", el.name)]
        if el.masked:
            attrs.append(("type", "password"))
        if el.format:
            attrs.append(("format", el.format))
        if el.maxlength is not None:
            attrs.append(("maxlength", str(el.maxlength)))
        return _Node("p", children=[el.label + " ", _Node("input", attrs=attrs)])
    if isinstance(el, Anchor):
        return _Node("p", children=[_Node("a", attrs=[("href", el.href)], children=[el.label])])
    raise UnsupportedElement(f"unsupported element kind {type(el).__name__}")


def _lower(deck: WmlDeck) -> _Node:
    root = _Node("wml")
    for card in deck.cards:
        node = _Node("card", attrs=[("id", card.card_id), ("title", card.title)])
        node.children = [_lower_element(el) for el in card.body]
        root.children.append(node)
    return root


# ---------------------------------------------------------------------------
# Textual WML

_XML_HEADER = (
    '<?xml version="1.0" encoding="utf-8"?>\n'
    '<!DOCTYPE wml PUBLIC "-//WAPFORUM//DTD WML 1.3//EN" '
    '"http://www.wapforum.org/DTD/wml13.dtd">\n'
)


def _escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(s: str) -> str:
    return _escape_text(s).replace('"', "&quot;")


def _xml(node: _Node) -> str:
    attrs = "".join(f' {name}="{_escape_attr(value)}"' for name, value in node.attrs)
    if not node.children:
        return f"<{node.tag}{attrs}/>"
    inner = "".join(
        _escape_text(child) if isinstance(child, str) else _xml(child)
        for child in node.children
    )
    return f"<{node.tag}{attrs}>{inner}</{node.tag}>"


def serialize_wml(deck: WmlDeck) -> str:
    """Deterministic WML 1.3 document; same deck always yields the same bytes."""
    return _XML_HEADER + _xml(_lower(deck)) + "\n"


# ---------------------------------------------------------------------------
# WBXML: the binary form the WAP gateway would push over the air.

WBXML_VERSION = 0x03
PUBLIC_ID_WML13 = 0x0B
CHARSET_UTF8 = 0x6A  # IANA MIBenum
_END = 0x01
_STR_I = 0x03

_TAG_TOKENS = {
    "a": 0x1C,
    "p": 0x20,
    "card": 0x27,
    "img": 0x2E,
    "input": 0x2F,
    "wml": 0x3F,
}

_ATTR_NAME_TOKENS = {
    "alt": 0x0C,
    "format": 0x12,
    "maxlength": 0x1A,
    "name": 0x21,
    "src": 0x32,
    "title": 0x36,
    "type": 0x37,
    "href": 0x4A,
    "id": 0x55,
}

# (name, value) pairs with a dedicated single token.
_ATTR_EXACT_TOKENS = {
    ("type", "password"): 0x3B,
}

# Attribute-start tokens that swallow a URL scheme prefix.
_ATTR_PREFIX_TOKENS = {
    "href": (("https://", 0x4C), ("http://", 0x4B)),
    "src": (("https://", 0x59), ("http://", 0x58)),
}


def _wbxml_string(out: bytearray, s: str) -> None:
    out.append(_STR_I)
    out += s.encode("utf-8")
    out.append(0x00)


def _wbxml_attr(out: bytearray, name: str, value: str) -> None:
    exact = _ATTR_EXACT_TOKENS.get((name, value))
    if exact is not None:
        out.append(exact)
        return
    token = _ATTR_NAME_TOKENS.get(name)
    if token is None:
        raise UnsupportedElement(f"attribute {name!r} has no WBXML token")
    for prefix, prefix_token in _ATTR_PREFIX_TOKENS.get(name, ()):
        if value.startswith(prefix):
            out.append(prefix_token)
            value = value[len(prefix):]
            break
    else:
        out.append(token)
    if value:
        _wbxml_string(out, value)


def _wbxml_node(out: bytearray, node: _Node) -> None:
    token = _TAG_TOKENS.get(node.tag)
    if token is None:
        raise UnsupportedElement(f"element {node.tag!r} has no WBXML token")
    if node.attrs:
        token |= 0x80
    if node.children:
        token |= 0x40
    out.append(token)
    if node.attrs:
        for name, value in node.attrs:
            _wbxml_attr(out, name, value)
        out.append(_END)
    if node.children:
        for child in node.children:
            if isinstance(child, str):
                _wbxml_string(out, child)
            else:
                _wbxml_node(out, child)
        out.append(_END)


def wbxml_encode(deck: WmlDeck) -> bytes:
    """Tokenize a deck as a WBXML 1.3 document with an empty string table."""
    out = bytearray([WBXML_VERSION, PUBLIC_ID_WML13, CHARSET_UTF8, 0x00])
    _wbxml_node(out, _lower(deck))
    return bytes(out)
