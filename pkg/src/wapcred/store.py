"""Server-side state: user records, URI tokens, single-use redemption.

Everything is kept in memory behind one lock and journalled to an
append-only line-delimited JSON log. A redemption is fsynced to the log
before the call returns, so "only once" survives restarts and crashes.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from wapcred.token import UriToken


class StoreError(Exception):
    pass


class AuthFailed(StoreError):
    pass


class AlreadyRedeemed(StoreError):
    pass


class UnknownToken(StoreError):
    pass


class CorruptLog(StoreError):
    pass


@dataclass
class UserRecord:
    user_id: str
    pin_hash: str
    use_case: str  # "offline" | "subsidy"
    attributes: dict[str, str]
    entitlement: str | None
    created_at: int


@dataclass
class RedemptionRecord:
    token_id: str
    redeemed_at: int
    verifier_note: str | None = None


_DUMMY_SALT = bytes(16)


class Store:
    """Thread-safe record store over an append-only JSONL log."""

    def __init__(self, path: str | Path | None, scrypt_n: int = 2 ** 14):
        self._path = Path(path) if path is not None else None
        self._scrypt_n = scrypt_n
        self._lock = threading.Lock()
        self._users: dict[str, UserRecord] = {}
        self._tokens: dict[str, UriToken] = {}
        self._redemptions: dict[str, RedemptionRecord] = {}
        self._fh = None
        if self._path is not None:
            self._recover()
            self._fh = open(self._path, "ab")

    # -- log plumbing -------------------------------------------------

    def _recover(self) -> None:
        if not self._path.exists():
            return
        raw = self._path.read_bytes()
        last_nl = raw.rfind(b"\n")
        complete, torn = raw[: last_nl + 1], raw[last_nl + 1:]
        for lineno, line in enumerate(complete.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                self._apply(record)
            except (ValueError, KeyError, TypeError) as exc:
                raise CorruptLog(f"unreadable record at line {lineno}: {exc}") from None
        if torn:
            # A record is only as durable as its newline; drop the torn tail.
            with open(self._path, "r+b") as fh:
                fh.truncate(last_nl + 1)

    def _apply(self, record: dict) -> None:
        kind = record["kind"]
        if kind == "user":
            self._users[record["user_id"]] = UserRecord(
                user_id=record["user_id"],
                pin_hash=record["pin_hash"],
                use_case=record["use_case"],
                attributes=record["attributes"],
                entitlement=record.get("entitlement"),
                created_at=record["created_at"],
            )
        elif kind == "uri_token":
            self._tokens[record["token_id"]] = UriToken(
                token_id=record["token_id"],
                subject_id=record["subject_id"],
                entitlement=record["entitlement"],
                state="issued",
                issued_at=record["issued_at"],
            )
        elif kind == "redemption":
            token_id = record["token_id"]
            self._redemptions[token_id] = RedemptionRecord(
                token_id=token_id,
                redeemed_at=record["redeemed_at"],
                verifier_note=record.get("verifier_note"),
            )
            if token_id in self._tokens:
                self._tokens[token_id].state = "redeemed"
        else:
            raise CorruptLog(f"unknown record kind {kind!r}")

    def _append(self, record: dict) -> None:
        if self._fh is None:
            return
        self._fh.write(json.dumps(record, separators=(",", ":")).encode("utf-8") + b"\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    # -- users ----------------------------------------------------------

    def _hash_pin(self, pin: str, salt: bytes) -> str:
        digest = hashlib.scrypt(pin.encode("utf-8"), salt=salt, n=self._scrypt_n, r=8, p=1, dklen=32)
        return f"scrypt:{self._scrypt_n}:8:1:{salt.hex()}:{digest.hex()}"

    def put_user(
        self,
        user_id: str,
        pin: str,
        use_case: str = "offline",
        attributes: dict[str, str] | None = None,
        entitlement: str | None = None,
    ) -> UserRecord:
        if use_case not in ("offline", "subsidy"):
            raise ValueError(f"unknown use case {use_case!r}")
        record = UserRecord(
            user_id=user_id,
            pin_hash=self._hash_pin(pin, os.urandom(16)),
            use_case=use_case,
            attributes=dict(attributes or {}),
            entitlement=entitlement,
            created_at=int(time.time()),
        )
        with self._lock:
            self._users[user_id] = record
            self._append({
                "kind": "user",
                "user_id": record.user_id,
                "pin_hash": record.pin_hash,
                "use_case": record.use_case,
                "attributes": record.attributes,
                "entitlement": record.entitlement,
                "created_at": record.created_at,
            })
        return record

    def get_user(self, user_id: str) -> UserRecord | None:
        with self._lock:
            return self._users.get(user_id)

    def authenticate(self, user_id: str, pin: str) -> UserRecord:
        """Verify a PIN; unknown user and wrong PIN are indistinguishable.

        The unknown-user path still runs the KDF against a dummy record
        so the two rejections share a timing class.
        """
        with self._lock:
            record = self._users.get(user_id)
        if record is None:
            self._hash_pin(pin, _DUMMY_SALT)
            raise AuthFailed("bad user id or PIN")
        _, n, r, p, salt_hex, digest_hex = record.pin_hash.split(":")
        computed = hashlib.scrypt(
            pin.encode("utf-8"), salt=bytes.fromhex(salt_hex),
            n=int(n), r=int(r), p=int(p), dklen=32,
        )
        if not hmac.compare_digest(computed.hex(), digest_hex):
            raise AuthFailed("bad user id or PIN")
        return record

    # -- URI tokens and redemption ---------------------------------------

    def add_uri_token(self, tok: UriToken) -> None:
        with self._lock:
            self._tokens[tok.token_id] = tok
            self._append({
                "kind": "uri_token",
                "token_id": tok.token_id,
                "subject_id": tok.subject_id,
                "entitlement": tok.entitlement,
                "issued_at": tok.issued_at,
            })

    def get_uri_token(self, token_id: str) -> UriToken | None:
        with self._lock:
            return self._tokens.get(token_id)

    def redeem(self, token_id: str, now: int | None = None, verifier_note: str | None = None) -> dict:
        """Exactly-once redemption: the success is durable before it is returned."""
        if now is None:
            now = int(time.time())
        with self._lock:
            tok = self._tokens.get(token_id)
            if tok is None:
                raise UnknownToken(token_id)
            if tok.state == "redeemed":
                raise AlreadyRedeemed(token_id)
            record = {
                "kind": "redemption",
                "token_id": token_id,
                "redeemed_at": now,
            }
            if verifier_note is not None:
                record["verifier_note"] = verifier_note
            self._append(record)
            tok.state = "redeemed"
            self._redemptions[token_id] = RedemptionRecord(token_id, now, verifier_note)
            return {
                "subject": tok.subject_id,
                "entitlement": tok.entitlement,
                "redeemed_at": now,
            }
