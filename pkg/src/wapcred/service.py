"""The always-on issuing service: WML decks for microbrowsers, a small
verification API for smartphone verifiers.

Design constraints worth knowing: legacy microbrowsers handle non-200
responses and POST bodies badly, so login failures come back as 200
with an in-band notice deck and credentials travel as GET query
parameters (transport encryption is a deployment concern, handled by
TLS at the gateway).
"""

from __future__ import annotations

import argparse
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from wapcred import token as tokenmod
from wapcred import wbmp, wml
from wapcred.qr import qr_encode
from wapcred.store import AlreadyRedeemed, AuthFailed, Store, UnknownToken

WML_CONTENT_TYPE = "text/vnd.wap.wml"
WBXML_CONTENT_TYPE = "application/vnd.wap.wmlc"
WBMP_CONTENT_TYPE = "image/vnd.wap.wbmp"

DEFAULT_PIXEL_BUDGET = 46  # usable viewport measured on a 96x64 feature phone screen
DEFAULT_VALIDITY_SECS = 86400


@dataclass
class ServiceConfig:
    base_url: str = "http://127.0.0.1:8080"
    pixel_budget: int = DEFAULT_PIXEL_BUDGET
    validity_secs: int = DEFAULT_VALIDITY_SECS
    # When set, the signing key must produce exactly this public key; a
    # mismatched pair would issue credentials nobody can verify.
    issuer_pubkey_hex: str | None = None

    def __post_init__(self) -> None:
        if self.pixel_budget < 21:
            raise ValueError("pixel budget cannot fit any symbol")


@dataclass
class Response:
    status: int
    content_type: str
    body: bytes
    headers: dict[str, str] = field(default_factory=dict)


@dataclass
class _QrEntry:
    payload: str
    expires_at: int
    nonce_bound: bool


class Service:
    def __init__(
        self,
        store: Store,
        signing_key,
        config: ServiceConfig | None = None,
        clock=time.time,
    ):
        self.store = store
        self.signing_key = signing_key
        self.config = config or ServiceConfig()
        self.clock = clock
        if self.config.issuer_pubkey_hex is not None:
            actual = tokenmod.public_key_hex(signing_key)
            if actual != self.config.issuer_pubkey_hex.strip().lower():
                raise ValueError("signing key does not match the configured issuer public key")
        self._qr_images: dict[str, _QrEntry] = {}
        self._images_lock = threading.Lock()

    # -- plumbing ---------------------------------------------------------

    def _now(self) -> int:
        return int(self.clock())

    def _deck_response(self, deck: wml.WmlDeck, headers: dict, cache: str) -> Response:
        accept = headers.get("Accept", "")
        if WBXML_CONTENT_TYPE in accept:
            body = wml.wbxml_encode(deck)
            content_type = WBXML_CONTENT_TYPE
        else:
            body = wml.serialize_wml(deck).encode("utf-8")
            content_type = WML_CONTENT_TYPE
        return Response(200, content_type, body, {"Cache-Control": cache})

    def _mint_qr_id(self, payload: str, expires_at: int, nonce_bound: bool) -> str:
        qr_id = secrets.token_hex(8)
        with self._images_lock:
            self._qr_images[qr_id] = _QrEntry(payload, expires_at, nonce_bound)
        return qr_id

    # -- routes -----------------------------------------------------------

    def handle(self, path: str, query: dict[str, str], headers: dict[str, str]) -> Response:
        if path == "/login":
            return self.login(query, headers)
        if path == "/auth":
            return self.auth(query, headers)
        if path.startswith("/qr/") and path.endswith(".wbmp"):
            return self.qr_image(path[len("/qr/"):-len(".wbmp")])
        if path.startswith("/r/"):
            return self.redeem(path[len("/r/"):])
        if path == "/pubkey":
            return self.pubkey()
        return Response(404, "text/plain", b"not found\n")

    def login(self, query: dict[str, str], headers: dict[str, str]) -> Response:
        nonce_required = query.get("nonce_required") != "0"
        deck = wml.build_login_deck("/auth", nonce_required=nonce_required)
        return self._deck_response(deck, headers, "max-age=86400")

    def auth(self, query: dict[str, str], headers: dict[str, str]) -> Response:
        def failure(message: str) -> Response:
            deck = wml.build_notice_deck(message, retry_url="/login")
            return self._deck_response(deck, headers, "no-store")

        user_id = query.get("user", "")
        pin = query.get("pin", "")
        nonce = query.get("nonce", "").strip() or None
        if nonce is not None and not (6 <= len(nonce) <= 10 and nonce.isascii() and nonce.isdigit()):
            return failure("Bad nonce. Use 6-10 digits.")
        try:
            record = self.store.authenticate(user_id, pin)
        except AuthFailed:
            return failure("Login failed. Check user and PIN.")

        now = self._now()
        expires_at = now + self.config.validity_secs
        if record.use_case == "subsidy":
            _, uri = tokenmod.issue_uri(
                record.user_id, record.entitlement or "", self.config.base_url, self.store
            )
            payload = uri
            nonce_bound = False
            caption = "Show to redeem."
        else:
            attributes = tuple(
                (tokenmod.ATTRIBUTE_CODES[name], value)
                for name, value in sorted(record.attributes.items())
                if name in tokenmod.ATTRIBUTE_CODES
            )
            try:
                payload = tokenmod.issue_offline(
                    record.user_id,
                    attributes,
                    self.config.validity_secs,
                    self.signing_key,
                    nonce=nonce,
                    now=now,
                )
            except tokenmod.TokenError:
                # e.g. an over-budget attribute set; in-band like other failures
                return failure("Cannot issue token. Contact the service.")
            nonce_bound = nonce is not None
            caption = "Show this code."

        qr_id = self._mint_qr_id(payload, expires_at, nonce_bound)
        deck = wml.build_qr_deck(f"/qr/{qr_id}.wbmp", caption)
        cache = "no-store" if nonce_bound else f"max-age={self.config.validity_secs}"
        return self._deck_response(deck, headers, cache)

    def qr_image(self, qr_id: str) -> Response:
        now = self._now()
        with self._images_lock:
            entry = self._qr_images.get(qr_id)
            if entry is None:
                return Response(404, "text/plain", b"unknown image id\n")
            if now >= entry.expires_at:
                del self._qr_images[qr_id]
                return Response(410, "text/plain", b"token expired\n")
            if entry.nonce_bound:
                # Nonce-bound codes are one transaction; a single fetch
                # limits how long they linger to be shoulder-surfed.
                del self._qr_images[qr_id]
        matrix = qr_encode(entry.payload, "L", self.config.pixel_budget)
        image = wbmp.render_qr(matrix, scale=1, quiet_zone=0, pixel_budget=self.config.pixel_budget)
        cache = "no-store" if entry.nonce_bound else f"max-age={entry.expires_at - now}"
        return Response(200, WBMP_CONTENT_TYPE, image.data, {"Cache-Control": cache})

    def redeem(self, token_id: str) -> Response:
        try:
            data = self.store.redeem(token_id, now=self._now())
        except UnknownToken:
            return Response(404, "application/json", b'{"error": "unknown token"}\n')
        except AlreadyRedeemed:
            return Response(409, "application/json", b'{"error": "already redeemed"}\n')
        return Response(200, "application/json", (json.dumps(data) + "\n").encode("utf-8"))

    def pubkey(self) -> Response:
        body = tokenmod.public_key_hex(self.signing_key) + "\n"
        return Response(200, "text/plain", body.encode("ascii"))


class _Handler(BaseHTTPRequestHandler):
    service: Service  # set by make_server

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        split = urlsplit(self.path)
        query = {k: v[0] for k, v in parse_qs(split.query).items()}
        try:
            response = self.service.handle(split.path, query, dict(self.headers))
        except Exception:  # pragma: no cover - backstop, routes handle their own errors
            response = Response(500, "text/plain", b"internal error\n")
        body = response.body
        self.send_response(response.status)
        self.send_header("Content-Type", response.content_type)
        self.send_header("Content-Length", str(len(body)))
        # Lets a browser-hosted emulator page fetch decks/images directly.
        self.send_header("Access-Control-Allow-Origin", "*")
        for name, value in response.headers.items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format: str, *args) -> None:  # quiet by default
        pass


class _Server(ThreadingHTTPServer):
    # The socketserver default backlog of 5 drops bursts of concurrent
    # verifier redemptions; raise it well past anything the tests throw.
    request_queue_size = 128
    daemon_threads = True


def make_server(service: Service, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return _Server((host, port), handler)


def seed_users(store: Store, seed_path: str | Path) -> int:
    """Load demo users from a line-delimited JSON fixture; returns count added."""
    added = 0
    for line in Path(seed_path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        entry = json.loads(line)
        unknown = set(entry.get("attributes") or {}) - set(tokenmod.ATTRIBUTE_CODES)
        if unknown:
            raise ValueError(f"user {entry['user_id']!r} has unregistered attributes {sorted(unknown)}")
        if store.get_user(entry["user_id"]) is None:
            store.put_user(
                entry["user_id"],
                entry["pin"],
                use_case=entry.get("use_case", "offline"),
                attributes=entry.get("attributes"),
                entitlement=entry.get("entitlement"),
            )
            added += 1
    return added


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wapcred-service", description=__doc__)
    parser.add_argument("--listen", default="127.0.0.1:8080", help="host:port to bind")
    parser.add_argument("--base-url", default=None, help="public base URL (default http://LISTEN)")
    parser.add_argument("--key-file", default="issuer-key.hex",
                        help="signing key file (32-byte hex seed; created if missing)")
    parser.add_argument("--log-file", default="service-log.jsonl", help="append-only state log")
    parser.add_argument("--pixel-budget", type=int, default=DEFAULT_PIXEL_BUDGET)
    parser.add_argument("--validity-secs", type=int, default=DEFAULT_VALIDITY_SECS)
    parser.add_argument("--seed-file", default=None, help="line-delimited JSON demo users")
    args = parser.parse_args(argv)

    key_path = Path(args.key_file)
    if key_path.exists():
        signing_key = tokenmod.load_signing_key(key_path)
    else:
        signing_key = tokenmod.generate_signing_key()
        tokenmod.save_signing_key(signing_key, key_path)
        print(f"generated signing key at {key_path}")

    host, _, port = args.listen.partition(":")
    config = ServiceConfig(
        base_url=args.base_url or f"http://{args.listen}",
        pixel_budget=args.pixel_budget,
        validity_secs=args.validity_secs,
    )
    store = Store(args.log_file)
    if args.seed_file:
        added = seed_users(store, args.seed_file)
        print(f"seeded {added} users from {args.seed_file}")

    service = Service(store, signing_key, config)
    httpd = make_server(service, host, int(port or 0))
    print(f"serving on http://{httpd.server_address[0]}:{httpd.server_address[1]} "
          f"(issuer pubkey {tokenmod.public_key_hex(signing_key)})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
        store.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
