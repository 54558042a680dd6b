from __future__ import annotations

import json
import threading
import time

import pytest

from wapcred.store import (
    AlreadyRedeemed,
    AuthFailed,
    CorruptLog,
    Store,
    UnknownToken,
)
from wapcred.token import UriToken

from conftest import TEST_SCRYPT_N


def make_token(token_id="A" * 22):
    return UriToken(token_id=token_id, subject_id="user01", entitlement="FOOD",
                    state="issued", issued_at=1_754_000_000)


class TestUsers:
    def test_put_then_authenticate(self, store):
        store.put_user("alice", "1234", attributes={"status": "OK"})
        record = store.authenticate("alice", "1234")
        assert record.user_id == "alice"
        assert record.attributes == {"status": "OK"}

    def test_wrong_pin(self, store):
        store.put_user("alice", "1234")
        with pytest.raises(AuthFailed):
            store.authenticate("alice", "0000")

    def test_unknown_user(self, store):
        with pytest.raises(AuthFailed):
            store.authenticate("nobody", "1234")

    def test_rejections_share_timing_class(self, store):
        # Coarse check only: both paths must pay the KDF cost.
        store.put_user("alice", "1234")

        def clock(fn):
            best = []
            for _ in range(5):
                t0 = time.perf_counter()
                with pytest.raises(AuthFailed):
                    fn()
                best.append(time.perf_counter() - t0)
            return sorted(best)[len(best) // 2]

        wrong_pin = clock(lambda: store.authenticate("alice", "0000"))
        unknown = clock(lambda: store.authenticate("nobody", "0000"))
        assert unknown > wrong_pin / 4

    def test_no_plaintext_pin_in_log(self, store, tmp_path):
        store.put_user("alice", "secret-pin-987654", attributes={"status": "OK"})
        log_text = (tmp_path / "state.jsonl").read_text()
        assert "secret-pin-987654" not in log_text
        assert "scrypt:" in log_text


class TestRedeem:
    def test_single_use(self, store):
        store.add_uri_token(make_token())
        data = store.redeem("A" * 22)
        assert data["subject"] == "user01"
        assert data["entitlement"] == "FOOD"
        with pytest.raises(AlreadyRedeemed):
            store.redeem("A" * 22)

    def test_unknown(self, store):
        with pytest.raises(UnknownToken):
            store.redeem("missing")

    def test_concurrent_redeems_exactly_one_success(self, store):
        store.add_uri_token(make_token())
        barrier = threading.Barrier(64)
        results = []

        def attempt():
            barrier.wait()
            try:
                store.redeem("A" * 22)
                results.append("ok")
            except AlreadyRedeemed:
                results.append("dup")

        threads = [threading.Thread(target=attempt) for _ in range(64)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results.count("ok") == 1
        assert results.count("dup") == 63


class TestPersistence:
    def test_redemption_survives_restart(self, tmp_path):
        path = tmp_path / "log.jsonl"
        s1 = Store(path, scrypt_n=TEST_SCRYPT_N)
        s1.add_uri_token(make_token())
        s1.redeem("A" * 22)
        s1.close()

        s2 = Store(path, scrypt_n=TEST_SCRYPT_N)
        with pytest.raises(AlreadyRedeemed):
            s2.redeem("A" * 22)
        s2.close()

    def test_users_survive_restart(self, tmp_path):
        path = tmp_path / "log.jsonl"
        s1 = Store(path, scrypt_n=TEST_SCRYPT_N)
        s1.put_user("alice", "1234", use_case="subsidy", entitlement="FOOD")
        s1.close()
        s2 = Store(path, scrypt_n=TEST_SCRYPT_N)
        assert s2.authenticate("alice", "1234").entitlement == "FOOD"
        s2.close()

    def test_empty_log(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text("")
        s = Store(path, scrypt_n=TEST_SCRYPT_N)
        assert s.get_user("anyone") is None
        s.close()

    def test_torn_final_line_truncated(self, tmp_path):
        path = tmp_path / "log.jsonl"
        s1 = Store(path, scrypt_n=TEST_SCRYPT_N)
        s1.add_uri_token(make_token("B" * 22))
        s1.add_uri_token(make_token("C" * 22))
        s1.close()
        # simulate a crash mid-append
        with open(path, "ab") as fh:
            fh.write(b'{"kind": "redemption", "token_id": "BBBB')

        s2 = Store(path, scrypt_n=TEST_SCRYPT_N)
        assert s2.get_uri_token("B" * 22).state == "issued"
        assert s2.get_uri_token("C" * 22).state == "issued"
        s2.close()
        # the torn tail is gone from the file
        assert not path.read_bytes().rstrip(b"\n").endswith(b"BBBB")

    def test_mid_log_corruption_fatal(self, tmp_path):
        path = tmp_path / "log.jsonl"
        good = json.dumps({"kind": "uri_token", "token_id": "X" * 22,
                           "subject_id": "u", "entitlement": "e", "issued_at": 1}) + "\n"
        path.write_text("NOT JSON AT ALL\n" + good)
        with pytest.raises(CorruptLog):
            Store(path, scrypt_n=TEST_SCRYPT_N)

    def test_unknown_kind_fatal(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text('{"kind": "mystery"}\n')
        with pytest.raises(CorruptLog):
            Store(path, scrypt_n=TEST_SCRYPT_N)

    def test_memory_only_store(self):
        s = Store(None)
        s.add_uri_token(make_token())
        assert s.redeem("A" * 22)["subject"] == "user01"
