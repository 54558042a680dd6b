from __future__ import annotations

import re
import threading
import urllib.error
import urllib.request

import pytest

from wapcred import token as tokenmod
from wapcred import wbmp
from wapcred.qr import qr_decode_grid
from wapcred.service import Service, ServiceConfig, make_server
from wapcred.verifier_cli import grid_from_bitmap

from conftest import LiveService


def get(base, path, headers=None):
    req = urllib.request.Request(base + path, headers=headers or {})
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, dict(resp.headers), resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, dict(exc.headers), exc.read()


def image_path_of(deck_body: bytes) -> str:
    return re.search(rb'src="([^"]+)"', deck_body).group(1).decode()


def decode_qr_image(body: bytes) -> str:
    return qr_decode_grid(grid_from_bitmap(wbmp.wbmp_decode(body)))


class TestLoginEndpoint:
    def test_default_deck(self, live_service):
        status, headers, body = get(live_service.base_url, "/login")
        assert status == 200
        assert headers["Content-Type"] == "text/vnd.wap.wml"
        assert headers["Cache-Control"] == "max-age=86400"
        assert body.count(b"<input") == 3

    def test_nonce_free_variant(self, live_service):
        _, _, body = get(live_service.base_url, "/login?nonce_required=0")
        assert body.count(b"<input") == 2

    def test_content_negotiation(self, live_service):
        _, text_headers, text_body = get(live_service.base_url, "/login")
        status, headers, body = get(
            live_service.base_url, "/login", {"Accept": "application/vnd.wap.wmlc"}
        )
        assert status == 200
        assert headers["Content-Type"] == "application/vnd.wap.wmlc"
        assert body[:4] == bytes([0x03, 0x0B, 0x6A, 0x00])
        assert len(body) < len(text_body)


class TestAuthEndpoint:
    def test_nonce_flow_full_loop(self, live_service, signing_key):
        status, headers, deck = get(
            live_service.base_url, "/auth?user=alice&pin=1234&nonce=483920"
        )
        assert status == 200
        assert headers["Cache-Control"] == "no-store"
        status, headers, image = get(live_service.base_url, image_path_of(deck))
        assert status == 200
        assert headers["Content-Type"] == "image/vnd.wap.wbmp"
        assert headers["Cache-Control"] == "no-store"
        envelope = decode_qr_image(image)
        claims = tokenmod.verify_offline(
            envelope, tokenmod.public_key_hex(signing_key), expected_nonce="483920"
        )
        assert claims.subject_id == "alice"

    def test_wrong_pin_returns_failure_deck(self, live_service):
        status, _, body = get(live_service.base_url, "/auth?user=alice&pin=9999")
        assert status == 200  # in-band failure for microbrowsers
        assert b"failed" in body.lower()
        assert b"img" not in body

    def test_malformed_nonce_rejected(self, live_service):
        for bad in ("12345", "12345678901", "12a456"):
            _, _, body = get(live_service.base_url, f"/auth?user=alice&pin=1234&nonce={bad}")
            assert b"nonce" in body.lower()

    def test_nonce_free_flow_cacheable(self, live_service, signing_key):
        status, headers, deck = get(live_service.base_url, "/auth?user=alice&pin=1234")
        assert status == 200
        assert headers["Cache-Control"].startswith("max-age=")
        _, img_headers, image = get(live_service.base_url, image_path_of(deck))
        max_age = int(img_headers["Cache-Control"].split("=")[1])
        assert abs(max_age - 86400) <= 1
        envelope = decode_qr_image(image)
        claims = tokenmod.verify_offline(envelope, tokenmod.public_key_hex(signing_key))
        assert claims.nonce is None

    def test_subsidy_user_gets_uri(self, live_service):
        _, _, deck = get(live_service.base_url, "/auth?user=bob&pin=9999")
        _, _, image = get(live_service.base_url, image_path_of(deck))
        uri = decode_qr_image(image)
        assert uri.startswith(live_service.base_url + "/r/")
        assert len(uri) <= 224

    def test_over_budget_attributes_fail_in_band(self, live_service):
        # three max-length attributes push payload+signature past the byte budget
        live_service.store.put_user(
            "maximal", "0000",
            attributes={"status": "V" * 24, "age-over": "W" * 24, "entitlement": "X" * 24},
        )
        status, _, body = get(live_service.base_url, "/auth?user=maximal&pin=0000")
        assert status == 200
        assert b"<img" not in body
        assert b"Cannot issue" in body


class TestQrImageEndpoint:
    def test_unknown_id(self, live_service):
        status, _, _ = get(live_service.base_url, "/qr/deadbeef.wbmp")
        assert status == 404

    def test_nonce_bound_image_single_fetch(self, live_service):
        _, _, deck = get(live_service.base_url, "/auth?user=alice&pin=1234&nonce=483920")
        path = image_path_of(deck)
        status, _, _ = get(live_service.base_url, path)
        assert status == 200
        status, _, _ = get(live_service.base_url, path)
        assert status == 404

    def test_nonce_free_image_refetchable(self, live_service):
        _, _, deck = get(live_service.base_url, "/auth?user=alice&pin=1234")
        path = image_path_of(deck)
        assert get(live_service.base_url, path)[0] == 200
        assert get(live_service.base_url, path)[0] == 200

    def test_image_within_pixel_budget(self, live_service):
        _, _, deck = get(live_service.base_url, "/auth?user=alice&pin=1234")
        _, _, image = get(live_service.base_url, image_path_of(deck))
        bitmap = wbmp.wbmp_decode(image)
        assert bitmap.width <= 46 and bitmap.height <= 46

    def test_expired_image_gone(self, store, signing_key):
        clock = FakeClock()
        svc = LiveService(store, signing_key, clock=clock)
        try:
            store.put_user("alice", "1234", attributes={"status": "OK"})
            _, _, deck = get(svc.base_url, "/auth?user=alice&pin=1234")
            path = image_path_of(deck)
            clock.now += 86401
            status, _, _ = get(svc.base_url, path)
            assert status == 410
        finally:
            svc.stop()


class TestRedeemEndpoint:
    def _issue_uri(self, live_service):
        _, _, deck = get(live_service.base_url, "/auth?user=bob&pin=9999")
        _, _, image = get(live_service.base_url, image_path_of(deck))
        return decode_qr_image(image)

    def test_exactly_once(self, live_service):
        uri = self._issue_uri(live_service)
        path = uri[len(live_service.base_url):]
        status, _, body = get(live_service.base_url, path)
        assert status == 200
        assert b'"subject": "bob"' in body
        status, _, _ = get(live_service.base_url, path)
        assert status == 409

    def test_unknown_token(self, live_service):
        status, _, _ = get(live_service.base_url, "/r/" + "Z" * 22)
        assert status == 404

    def test_concurrent_first_fetches(self, live_service):
        uri = self._issue_uri(live_service)
        path = uri[len(live_service.base_url):]
        statuses = []
        barrier = threading.Barrier(16)

        def attempt():
            barrier.wait()
            statuses.append(get(live_service.base_url, path)[0])

        threads = [threading.Thread(target=attempt) for _ in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert statuses.count(200) == 1
        assert statuses.count(409) == 15


class TestPubkeyEndpoint:
    def test_hex_key(self, live_service, signing_key):
        status, headers, body = get(live_service.base_url, "/pubkey")
        assert status == 200
        assert headers["Content-Type"] == "text/plain"
        assert body.decode().strip() == tokenmod.public_key_hex(signing_key)
        assert len(body.decode().strip()) == 64


class FakeClock:
    def __init__(self, start=1_754_000_000):
        self.now = start

    def __call__(self):
        return self.now


def test_full_loop_property(live_service, signing_key):
    """Every successful auth must yield a QR that verifies end to end."""
    pub = tokenmod.public_key_hex(signing_key)
    for query, nonce in [
        ("/auth?user=alice&pin=1234&nonce=607080", "607080"),
        ("/auth?user=alice&pin=1234", None),
    ]:
        _, _, deck = get(live_service.base_url, query)
        _, _, image = get(live_service.base_url, image_path_of(deck))
        envelope = decode_qr_image(image)
        claims = tokenmod.verify_offline(envelope, pub, expected_nonce=nonce)
        assert claims.subject_id == "alice"
        assert claims.nonce == nonce


def test_config_rejects_tiny_budget():
    with pytest.raises(ValueError):
        ServiceConfig(pixel_budget=20)


def test_config_rejects_mismatched_keypair(store, signing_key):
    other = tokenmod.generate_signing_key()
    config = ServiceConfig(issuer_pubkey_hex=tokenmod.public_key_hex(other))
    with pytest.raises(ValueError):
        Service(store, signing_key, config)
    ok = ServiceConfig(issuer_pubkey_hex=tokenmod.public_key_hex(signing_key))
    Service(store, signing_key, ok)


def test_seed_users(tmp_path, signing_key):
    import json
    from wapcred.service import seed_users
    from wapcred.store import Store
    from conftest import TEST_SCRYPT_N

    seed = tmp_path / "users.jsonl"
    seed.write_text(
        json.dumps({"user_id": "carol", "pin": "1111", "use_case": "offline",
                    "attributes": {"status": "OK"}}) + "\n"
        + json.dumps({"user_id": "dave", "pin": "2222", "use_case": "subsidy",
                      "entitlement": "GRAIN"}) + "\n"
    )
    store = Store(tmp_path / "log.jsonl", scrypt_n=TEST_SCRYPT_N)
    assert seed_users(store, seed) == 2
    assert seed_users(store, seed) == 0  # idempotent on restart
    assert store.authenticate("carol", "1111").use_case == "offline"

    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"user_id": "eve", "pin": "3", "attributes": {"statsu": "X"}}) + "\n")
    with pytest.raises(ValueError):
        seed_users(store, bad)
    store.close()
