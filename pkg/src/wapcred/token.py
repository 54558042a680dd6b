"""Credential and token domain logic: signing, envelopes, nonce binding.

An offline credential is a TLV payload plus an Ed25519 signature,
base45-wrapped behind the "LID1:" prefix so the whole envelope stays
QR-alphanumeric. Every byte counts against the 149-byte symbol budget,
which is why the wire schema is raw TLV rather than anything
self-describing.
"""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from wapcred import base45

ENVELOPE_PREFIX = "LID1:"
SCHEMA_VERSION = 1
SIGNATURE_LEN = 64
PAYLOAD_BUDGET = 149      # canonical payload + signature
ENVELOPE_BUDGET = 224     # alphanumeric capacity of the largest symbol that fits 46 px

MAX_SUBJECT_LEN = 16
MAX_ATTR_VALUE_LEN = 24

# Registered attribute codes; the wire carries the code, not the name.
ATTRIBUTE_CODES = {"status": 0x01, "age-over": 0x02, "entitlement": 0x03}
ATTRIBUTE_NAMES = {code: name for name, code in ATTRIBUTE_CODES.items()}

_TAG_SUBJECT = 0x01
_TAG_ISSUED = 0x02
_TAG_EXPIRES = 0x03
_TAG_NONCE = 0x04
_ATTR_TAG_BASE = 0x80  # attribute code 0xNN rides as tag 0x80 | 0xNN

TOKEN_ID_LEN = 22
TOKEN_ID_ALPHABET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class TokenError(Exception):
    pass


class FieldTooLong(TokenError):
    pass


class BudgetExceeded(TokenError):
    pass


class BadPrefix(TokenError):
    pass


class DecodeError(TokenError):
    pass


class SignatureInvalid(TokenError):
    pass


class Expired(TokenError):
    pass


class NotYetValid(TokenError):
    pass


class NonceMissing(TokenError):
    pass


class NonceMismatch(TokenError):
    pass


class LengthOutOfRange(TokenError):
    pass


@dataclass(frozen=True)
class Credential:
    subject_id: str
    attributes: tuple[tuple[int, str], ...]
    issued_at: int
    expires_at: int
    nonce: str | None = None


@dataclass(frozen=True)
class VerifiedClaims:
    subject_id: str
    attributes: tuple[tuple[int, str], ...]
    issued_at: int
    expires_at: int
    nonce: str | None


@dataclass(frozen=True)
class NonceChallenge:
    digits: str
    created_at: int


@dataclass
class UriToken:
    token_id: str
    subject_id: str
    entitlement: str
    state: str  # "issued" | "redeemed"
    issued_at: int


def _check_nonce_digits(nonce: str) -> None:
    if not (6 <= len(nonce) <= 10 and nonce.isascii() and nonce.isdigit()):
        raise TokenError(f"nonce must be 6-10 ASCII digits, got {nonce!r}")


def _tlv(tag: int, value: bytes) -> bytes:
    if len(value) > 0xFF:
        raise FieldTooLong(f"tag {tag:#x} value of {len(value)} bytes")
    return bytes([tag, len(value)]) + value


def canonical_payload(cred: Credential) -> bytes:
    """Deterministic TLV serialization of the signed fields.

    Byte layout: schema byte, then tag/length/value triples in fixed
    order (subject, attributes, issued, expires, nonce). Timestamps are
    4-byte big-endian unix seconds; an absent nonce omits its TLV.
    """
    subject = cred.subject_id.encode("utf-8")
    if len(subject) > MAX_SUBJECT_LEN:
        raise FieldTooLong(f"subject {cred.subject_id!r} exceeds {MAX_SUBJECT_LEN} bytes")
    if cred.expires_at <= cred.issued_at:
        raise TokenError("expires_at must be after issued_at")
    out = bytearray([SCHEMA_VERSION])
    out += _tlv(_TAG_SUBJECT, subject)
    for code, value in cred.attributes:
        if not 0x01 <= code <= 0x7F:
            raise TokenError(f"attribute code {code:#x} outside 0x01..0x7f")
        raw = value.encode("utf-8")
        if len(raw) > MAX_ATTR_VALUE_LEN:
            raise FieldTooLong(f"attribute {code:#x} value exceeds {MAX_ATTR_VALUE_LEN} bytes")
        out += _tlv(_ATTR_TAG_BASE | code, raw)
    out += _tlv(_TAG_ISSUED, cred.issued_at.to_bytes(4, "big"))
    out += _tlv(_TAG_EXPIRES, cred.expires_at.to_bytes(4, "big"))
    if cred.nonce is not None:
        _check_nonce_digits(cred.nonce)
        out += _tlv(_TAG_NONCE, cred.nonce.encode("ascii"))
    return bytes(out)


def parse_payload(data: bytes) -> Credential:
    """Inverse of canonical_payload; any deviation raises DecodeError."""
    if not data or data[0] != SCHEMA_VERSION:
        raise DecodeError("unknown schema version")
    pos = 1
    fields: dict[int, bytes] = {}
    attributes: list[tuple[int, str]] = []
    while pos < len(data):
        if pos + 2 > len(data):
            raise DecodeError("truncated TLV header")
        tag, length = data[pos], data[pos + 1]
        pos += 2
        if pos + length > len(data):
            raise DecodeError("truncated TLV value")
        value = data[pos:pos + length]
        pos += length
        if tag & _ATTR_TAG_BASE:
            try:
                attributes.append((tag & 0x7F, value.decode("utf-8")))
            except UnicodeDecodeError:
                raise DecodeError("attribute value is not UTF-8") from None
            continue
        if tag in fields:
            raise DecodeError(f"duplicate tag {tag:#x}")
        fields[tag] = value
    try:
        subject = fields.pop(_TAG_SUBJECT).decode("utf-8")
        issued_raw = fields.pop(_TAG_ISSUED)
        expires_raw = fields.pop(_TAG_EXPIRES)
    except (KeyError, UnicodeDecodeError):
        raise DecodeError("missing or malformed mandatory field") from None
    if len(issued_raw) != 4 or len(expires_raw) != 4:
        raise DecodeError("timestamps must be 4 bytes")
    issued = int.from_bytes(issued_raw, "big")
    expires = int.from_bytes(expires_raw, "big")
    nonce_raw = fields.pop(_TAG_NONCE, None)
    if fields:
        raise DecodeError(f"unknown tags {sorted(fields)}")
    nonce = None
    if nonce_raw is not None:
        nonce = nonce_raw.decode("ascii", errors="replace")
        try:
            _check_nonce_digits(nonce)
        except TokenError:
            raise DecodeError("malformed nonce field") from None
    cred = Credential(
        subject_id=subject,
        attributes=tuple(attributes),
        issued_at=issued,
        expires_at=expires,
        nonce=nonce,
    )
    if expires <= issued:
        raise DecodeError("validity window is empty")
    return cred


# ---------------------------------------------------------------------------
# Key handling: 32-byte raw keys, hex in text files.

def generate_signing_key() -> Ed25519PrivateKey:
    return Ed25519PrivateKey.generate()


def signing_key_to_hex(key: Ed25519PrivateKey) -> str:
    return key.private_bytes_raw().hex()


def signing_key_from_hex(hex_str: str) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(bytes.fromhex(hex_str.strip()))


def load_signing_key(path: str | Path) -> Ed25519PrivateKey:
    return signing_key_from_hex(Path(path).read_text())


def save_signing_key(key: Ed25519PrivateKey, path: str | Path) -> None:
    Path(path).write_text(signing_key_to_hex(key) + "\n")


def public_key_hex(key: Ed25519PrivateKey | Ed25519PublicKey) -> str:
    if isinstance(key, Ed25519PrivateKey):
        key = key.public_key()
    return key.public_bytes_raw().hex()


def public_key_from_hex(hex_str: str) -> Ed25519PublicKey:
    raw = bytes.fromhex(hex_str.strip())
    if len(raw) != 32:
        raise ValueError("public key must be 32 raw bytes (64 hex chars)")
    return Ed25519PublicKey.from_public_bytes(raw)


# ---------------------------------------------------------------------------
# Offline credentials

def issue_offline(
    subject_id: str,
    attributes: tuple[tuple[int, str], ...] | list[tuple[int, str]],
    validity_secs: int,
    signing_key: Ed25519PrivateKey,
    nonce: NonceChallenge | str | None = None,
    now: int | None = None,
) -> str:
    """Sign a credential and wrap it into its QR-alphanumeric envelope."""
    if now is None:
        now = int(time.time())
    nonce_digits = nonce.digits if isinstance(nonce, NonceChallenge) else nonce
    cred = Credential(
        subject_id=subject_id,
        attributes=tuple(attributes),
        issued_at=now,
        expires_at=now + validity_secs,
        nonce=nonce_digits,
    )
    payload = canonical_payload(cred)
    signed = payload + signing_key.sign(payload)
    if len(signed) > PAYLOAD_BUDGET:
        raise BudgetExceeded(f"{len(signed)} bytes exceed the {PAYLOAD_BUDGET}-byte budget")
    envelope = ENVELOPE_PREFIX + base45.b45_encode(signed)
    if len(envelope) > ENVELOPE_BUDGET:
        raise BudgetExceeded(f"{len(envelope)} chars exceed the {ENVELOPE_BUDGET}-char budget")
    return envelope


def verify_offline(
    envelope: str,
    issuer_public_key: Ed25519PublicKey | str,
    expected_nonce: str | None = None,
    now: int | None = None,
) -> VerifiedClaims:
    """Check an untrusted envelope: prefix, decoding, signature, window, nonce.

    The signature is checked before the validity window so a tampered
    expiry can never surface as a mere Expired error.
    """
    if isinstance(issuer_public_key, str):
        issuer_public_key = public_key_from_hex(issuer_public_key)
    if now is None:
        now = int(time.time())

    if not envelope.startswith(ENVELOPE_PREFIX):
        raise BadPrefix(f"envelope does not start with {ENVELOPE_PREFIX!r}")
    try:
        signed = base45.b45_decode(envelope[len(ENVELOPE_PREFIX):])
    except base45.Base45Error as exc:
        raise DecodeError(f"base45: {exc}") from None
    if len(signed) <= SIGNATURE_LEN:
        raise DecodeError("payload too short to carry a signature")
    payload, signature = signed[:-SIGNATURE_LEN], signed[-SIGNATURE_LEN:]
    cred = parse_payload(payload)
    try:
        issuer_public_key.verify(signature, payload)
    except InvalidSignature:
        raise SignatureInvalid("signature does not verify under the issuer key") from None

    if now < cred.issued_at:
        raise NotYetValid(f"credential not valid before {cred.issued_at}")
    if now >= cred.expires_at:  # half-open window [issued_at, expires_at)
        raise Expired(f"credential expired at {cred.expires_at}")

    if expected_nonce is not None:
        if cred.nonce is None:
            raise NonceMissing("credential carries no nonce")
        if cred.nonce != expected_nonce:
            raise NonceMismatch("credential nonce does not match the challenge")

    return VerifiedClaims(
        subject_id=cred.subject_id,
        attributes=cred.attributes,
        issued_at=cred.issued_at,
        expires_at=cred.expires_at,
        nonce=cred.nonce,
    )


# ---------------------------------------------------------------------------
# Nonce challenges and single-use URI tokens

def gen_nonce(length: int = 6) -> NonceChallenge:
    """Uniform random digit challenge from the OS CSPRNG."""
    if not 6 <= length <= 10:
        raise LengthOutOfRange(f"nonce length {length} outside 6..10")
    digits = "".join(secrets.choice("0123456789") for _ in range(length))
    return NonceChallenge(digits=digits, created_at=int(time.time()))


def new_token_id() -> str:
    return "".join(secrets.choice(TOKEN_ID_ALPHABET) for _ in range(TOKEN_ID_LEN))


def issue_uri(subject_id: str, entitlement: str, base_url: str, store) -> tuple[UriToken, str]:
    """Mint a single-use redemption URI; the token state lives in the store."""
    token = UriToken(
        token_id=new_token_id(),
        subject_id=subject_id,
        entitlement=entitlement,
        state="issued",
        issued_at=int(time.time()),
    )
    store.add_uri_token(token)
    uri = base_url.rstrip("/") + "/r/" + token.token_id
    if len(uri) > ENVELOPE_BUDGET:
        raise BudgetExceeded(f"redemption URI of {len(uri)} chars exceeds the QR budget")
    return token, uri
