"""Codec between raw bytes and the 45-character QR-alphanumeric alphabet.

Packs 2 bytes into 3 characters (a trailing lone byte into 2), so byte
payloads can ride in a QR alphanumeric segment instead of the far less
dense byte mode. The alphabet is exactly the QR alphanumeric character
set, in value order.
"""

from __future__ import annotations

ALPHABET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"

_VALUES = {ch: i for i, ch in enumerate(ALPHABET)}


class Base45Error(ValueError):
    pass


class InvalidCharacter(Base45Error):
    pass


class InvalidLength(Base45Error):
    pass


class Overflow(Base45Error):
    pass


def b45_encode(data: bytes) -> str:
    """Encode bytes as base45 text; 2-byte groups become 3 characters.

    Each big-endian 16-bit group value v maps to digits (v % 45,
    v // 45 % 45, v // 2025), least significant first. A trailing
    single byte maps to 2 digits the same way.
    """
    out: list[str] = []
    for i in range(0, len(data) - 1, 2):
        v = (data[i] << 8) | data[i + 1]
        out.append(ALPHABET[v % 45])
        out.append(ALPHABET[(v // 45) % 45])
        out.append(ALPHABET[v // 2025])
    if len(data) % 2:
        b = data[-1]
        out.append(ALPHABET[b % 45])
        out.append(ALPHABET[b // 45])
    return "".join(out)


def b45_decode(text: str) -> bytes:
    """Inverse of :func:`b45_encode`; rejects malformed input loudly.

    Raises InvalidLength when ``len(text) % 3 == 1``, InvalidCharacter
    for symbols outside the alphabet, and Overflow for groups whose
    value does not fit the decoded byte width.
    """
    if len(text) % 3 == 1:
        raise InvalidLength(f"length {len(text)} mod 3 == 1 is not decodable")
    try:
        vals = [_VALUES[ch] for ch in text]
    except KeyError as exc:
        raise InvalidCharacter(f"{exc.args[0]!r} is not in the base45 alphabet") from None
    out = bytearray()
    for i in range(0, len(vals) - 2, 3):
        v = vals[i] + 45 * vals[i + 1] + 2025 * vals[i + 2]
        if v > 0xFFFF:
            raise Overflow(f"triplet value {v} exceeds 65535")
        out += v.to_bytes(2, "big")
    if len(vals) % 3 == 2:
        v = vals[-2] + 45 * vals[-1]
        if v > 0xFF:
            raise Overflow(f"pair value {v} exceeds 255")
        out.append(v)
    return bytes(out)
