from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wapcred import base45
from wapcred import token as tokenmod
from wapcred.qr.tables import ALPHANUMERIC_VALUES

NOW = 1_754_000_000


@pytest.fixture(scope="module")
def keypair():
    key = tokenmod.generate_signing_key()
    return key, tokenmod.public_key_hex(key)


class TestCanonicalPayload:
    def test_deterministic(self):
        cred = tokenmod.Credential("user01", ((1, "OK"),), NOW, NOW + 60, "483920")
        assert tokenmod.canonical_payload(cred) == tokenmod.canonical_payload(cred)

    def test_nonce_adds_exactly_one_tlv(self):
        base = tokenmod.Credential("user01", (), NOW, NOW + 60, None)
        with_nonce = tokenmod.Credential("user01", (), NOW, NOW + 60, "483920")
        a = tokenmod.canonical_payload(base)
        b = tokenmod.canonical_payload(with_nonce)
        assert b[: len(a)] == a
        assert len(b) - len(a) == 2 + 6

    def test_minimal_length_arithmetic(self):
        cred = tokenmod.Credential("user01", (), NOW, NOW + 60, None)
        payload = tokenmod.canonical_payload(cred)
        assert len(payload) == 1 + (2 + 6) + (2 + 4) + (2 + 4)

    def test_field_too_long(self):
        with pytest.raises(tokenmod.FieldTooLong):
            tokenmod.canonical_payload(
                tokenmod.Credential("X" * 17, (), NOW, NOW + 60, None)
            )
        with pytest.raises(tokenmod.FieldTooLong):
            tokenmod.canonical_payload(
                tokenmod.Credential("u", ((1, "V" * 25),), NOW, NOW + 60, None)
            )

    def test_round_trip(self):
        cred = tokenmod.Credential("user01", ((1, "ELIGIBLE"), (2, "18")), NOW, NOW + 60, "4839201")
        assert tokenmod.parse_payload(tokenmod.canonical_payload(cred)) == cred


class TestIssueVerify:
    def test_issue_and_verify(self, keypair):
        key, pub = keypair
        envelope = tokenmod.issue_offline("user01", [(1, "ELIGIBLE")], 86400, key, now=NOW)
        assert len(envelope) <= tokenmod.ENVELOPE_BUDGET
        assert envelope.startswith("LID1:")
        assert all(c in ALPHANUMERIC_VALUES for c in envelope)
        claims = tokenmod.verify_offline(envelope, pub, now=NOW + 100)
        assert claims.subject_id == "user01"
        assert claims.attributes == ((1, "ELIGIBLE"),)

    def test_nonce_binding(self, keypair):
        key, pub = keypair
        envelope = tokenmod.issue_offline("u", [], 3600, key, nonce="483920", now=NOW)
        claims = tokenmod.verify_offline(envelope, pub, expected_nonce="483920", now=NOW)
        assert claims.nonce == "483920"
        with pytest.raises(tokenmod.NonceMismatch):
            tokenmod.verify_offline(envelope, pub, expected_nonce="483921", now=NOW)

    def test_nonce_missing(self, keypair):
        key, pub = keypair
        envelope = tokenmod.issue_offline("u", [], 3600, key, now=NOW)
        with pytest.raises(tokenmod.NonceMissing):
            tokenmod.verify_offline(envelope, pub, expected_nonce="483920", now=NOW)

    def test_budget_exceeded(self, keypair):
        key, _ = keypair
        attrs = [(code, "V" * 24) for code in range(1, 31)]
        with pytest.raises(tokenmod.BudgetExceeded):
            tokenmod.issue_offline("u", attrs, 3600, key, now=NOW)

    def test_expiry_boundaries(self, keypair):
        key, pub = keypair
        envelope = tokenmod.issue_offline("u", [], 3600, key, now=NOW)
        tokenmod.verify_offline(envelope, pub, now=NOW)  # inclusive start
        tokenmod.verify_offline(envelope, pub, now=NOW + 3599)
        with pytest.raises(tokenmod.Expired):
            tokenmod.verify_offline(envelope, pub, now=NOW + 3600)  # half-open end
        with pytest.raises(tokenmod.NotYetValid):
            tokenmod.verify_offline(envelope, pub, now=NOW - 1)

    def test_wrong_key_rejected(self, keypair):
        key, _ = keypair
        other = tokenmod.generate_signing_key()
        envelope = tokenmod.issue_offline("u", [], 3600, key, now=NOW)
        with pytest.raises(tokenmod.SignatureInvalid):
            tokenmod.verify_offline(envelope, tokenmod.public_key_hex(other), now=NOW)

    def test_payload_byte_flip_rejected(self, keypair):
        key, pub = keypair
        envelope = tokenmod.issue_offline("user01", [(1, "OK")], 3600, key, now=NOW)
        signed = bytearray(base45.b45_decode(envelope[5:]))
        rng = random.Random(0)
        for _ in range(10):
            tampered = bytearray(signed)
            tampered[rng.randrange(len(signed) - 64)] ^= rng.randrange(1, 256)
            bad = "LID1:" + base45.b45_encode(bytes(tampered))
            with pytest.raises((tokenmod.SignatureInvalid, tokenmod.DecodeError)):
                tokenmod.verify_offline(bad, pub, now=NOW)

    def test_bad_prefix(self, keypair):
        _, pub = keypair
        with pytest.raises(tokenmod.BadPrefix):
            tokenmod.verify_offline("XYZ9:AAAA", pub, now=NOW)

    def test_garbage_payload(self, keypair):
        _, pub = keypair
        with pytest.raises(tokenmod.DecodeError):
            tokenmod.verify_offline("LID1:%%%", pub, now=NOW)
        with pytest.raises(tokenmod.DecodeError):
            tokenmod.verify_offline("LID1:" + base45.b45_encode(b"tiny"), pub, now=NOW)


subjects = st.text(
    alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=16
)
attr_lists = st.lists(
    st.tuples(st.integers(min_value=1, max_value=0x7F), st.text(max_size=8)), max_size=3
)


digit_strings = st.text(alphabet="0123456789", min_size=6, max_size=10)


@given(
    subject=subjects,
    attrs=attr_lists,
    validity=st.integers(min_value=1, max_value=10 ** 6),
    offset=st.integers(min_value=-100, max_value=10 ** 6 + 100),
    nonce=st.none() | digit_strings,
)
@settings(max_examples=60, deadline=None)
def test_soundness_property(keypair, subject, attrs, validity, offset, nonce):
    key, pub = keypair
    if len(subject.encode("utf-8")) > 16:
        return
    try:
        envelope = tokenmod.issue_offline(subject, attrs, validity, key, nonce=nonce, now=NOW)
    except (tokenmod.BudgetExceeded, tokenmod.FieldTooLong):
        return
    now = NOW + offset
    if 0 <= offset < validity:
        claims = tokenmod.verify_offline(envelope, pub, expected_nonce=nonce, now=now)
        assert claims.subject_id == subject
        assert claims.attributes == tuple(attrs)
        assert claims.issued_at == NOW and claims.expires_at == NOW + validity
    else:
        with pytest.raises((tokenmod.Expired, tokenmod.NotYetValid)):
            tokenmod.verify_offline(envelope, pub, expected_nonce=nonce, now=now)


class TestKeyHandling:
    def test_save_load_round_trip(self, tmp_path):
        key = tokenmod.generate_signing_key()
        path = tmp_path / "issuer-key.hex"
        tokenmod.save_signing_key(key, path)
        reloaded = tokenmod.load_signing_key(path)
        # same key material -> same issuer identity across restarts
        assert tokenmod.public_key_hex(reloaded) == tokenmod.public_key_hex(key)
        envelope = tokenmod.issue_offline("u", [], 60, reloaded, now=NOW)
        tokenmod.verify_offline(envelope, tokenmod.public_key_hex(key), now=NOW)

    def test_public_key_hex_shape(self):
        key = tokenmod.generate_signing_key()
        hex_str = tokenmod.public_key_hex(key)
        assert len(hex_str) == 64
        assert tokenmod.public_key_from_hex(hex_str)

    def test_bad_pubkey_hex_rejected(self):
        with pytest.raises(ValueError):
            tokenmod.public_key_from_hex("abcd")


class TestNonce:
    def test_lengths(self):
        assert len(tokenmod.gen_nonce(6).digits) == 6
        assert len(tokenmod.gen_nonce(10).digits) == 10
        assert tokenmod.gen_nonce().digits.isdigit()

    def test_out_of_range(self):
        with pytest.raises(tokenmod.LengthOutOfRange):
            tokenmod.gen_nonce(11)
        with pytest.raises(tokenmod.LengthOutOfRange):
            tokenmod.gen_nonce(5)

    def test_digit_frequency_chi_square(self):
        counts = [0] * 10
        draws = 10_000
        for _ in range(draws):
            for ch in tokenmod.gen_nonce(6).digits:
                counts[int(ch)] += 1
        total = draws * 6
        expected = total / 10
        chi2 = sum((c - expected) ** 2 / expected for c in counts)
        # 9 degrees of freedom, alpha = 0.001
        assert chi2 < 27.877


class TestUriToken:
    class FakeStore:
        def __init__(self):
            self.tokens = []

        def add_uri_token(self, tok):
            self.tokens.append(tok)

    def test_uri_shape(self):
        store = self.FakeStore()
        tok, uri = tokenmod.issue_uri("user01", "FOOD", "https://id.example/", store)
        assert uri == f"https://id.example/r/{tok.token_id}"
        assert len(uri) <= 50
        assert store.tokens == [tok]

    def test_token_ids_unique_and_alphanumeric(self):
        store = self.FakeStore()
        ids = set()
        for _ in range(200):
            tok, _ = tokenmod.issue_uri("u", "e", "http://x/", store)
            assert len(tok.token_id) == 22
            assert all(c in tokenmod.TOKEN_ID_ALPHABET for c in tok.token_id)
            assert all(c in ALPHANUMERIC_VALUES for c in tok.token_id)
            ids.add(tok.token_id)
        assert len(ids) == 200
