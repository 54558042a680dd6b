from __future__ import annotations

import threading

import pytest

from wapcred import token as tokenmod
from wapcred.service import Service, ServiceConfig, make_server
from wapcred.store import Store

# Full-strength scrypt is pointlessly slow for tests.
TEST_SCRYPT_N = 2 ** 12


@pytest.fixture(scope="session")
def signing_key():
    return tokenmod.generate_signing_key()


@pytest.fixture(scope="session")
def pubkey_file(signing_key, tmp_path_factory):
    path = tmp_path_factory.mktemp("keys") / "issuer-pub.hex"
    path.write_text(tokenmod.public_key_hex(signing_key) + "\n")
    return path


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "state.jsonl", scrypt_n=TEST_SCRYPT_N)
    yield s
    s.close()


class LiveService:
    """An in-process service bound to an ephemeral port."""

    def __init__(self, store, signing_key, config=None, clock=None):
        kwargs = {"clock": clock} if clock else {}
        self.store = store
        self.service = Service(store, signing_key, config or ServiceConfig(), **kwargs)
        self.httpd = make_server(self.service)
        host, port = self.httpd.server_address
        self.base_url = f"http://{host}:{port}"
        self.service.config.base_url = self.base_url
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()
        self._thread.join(timeout=5)


@pytest.fixture
def live_service(store, signing_key):
    store.put_user("alice", "1234", use_case="offline", attributes={"status": "ELIGIBLE"})
    store.put_user("bob", "9999", use_case="subsidy", entitlement="FOOD-2026-08")
    svc = LiveService(store, signing_key)
    yield svc
    svc.stop()
