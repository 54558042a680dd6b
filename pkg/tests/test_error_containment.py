"""Adversarial-input sweeps: decoders must fail only with their own
error types, because the CLI's exit-code mapping hangs off them."""

from __future__ import annotations

import random

import pytest

from wapcred import base45, token, wbmp
from wapcred.qr import QrError, qr_decode_grid


def test_b45_decode_contains_failures():
    rng = random.Random(0)
    chars = [chr(c) for c in range(32, 127)]
    for _ in range(4000):
        s = "".join(rng.choice(chars) for _ in range(rng.randrange(0, 12)))
        try:
            base45.b45_decode(s)
        except base45.Base45Error:
            pass


def test_wbmp_decode_contains_failures():
    rng = random.Random(1)
    for _ in range(4000):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40)))
        try:
            wbmp.wbmp_decode(data)
        except wbmp.WbmpError:
            pass


def test_qr_decode_contains_failures():
    rng = random.Random(2)
    for _ in range(100):
        side = rng.choice([21, 25, 45])
        grid = [[rng.random() < 0.5 for _ in range(side)] for _ in range(side)]
        with pytest.raises(QrError):
            qr_decode_grid(grid)


def test_verify_offline_contains_failures(signing_key):
    rng = random.Random(3)
    pub = token.public_key_hex(signing_key)
    alphabet = base45.ALPHABET
    for _ in range(1500):
        s = "LID1:" + "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 250)))
        with pytest.raises(token.TokenError):
            token.verify_offline(s, pub)
