"""Verifier-side tool: challenge nonces, decode scanned payloads or
pixel-perfect WBMP images, verify offline, redeem online.

Exit codes are part of the interface (scripted subsidy workflows branch
on them):

    0   accepted / redeemed
    2   usage error
    10  signature rejected
    11  nonce missing or mismatched
    12  outside the validity window
    13  malformed payload or undecodable image
    20  already redeemed
    21  unknown token
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

from wapcred import token as tokenmod
from wapcred import wbmp
from wapcred.qr import QrError, qr_decode_grid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SIGNATURE = 10
EXIT_NONCE = 11
EXIT_EXPIRY = 12
EXIT_MALFORMED = 13
EXIT_ALREADY_REDEEMED = 20
EXIT_UNKNOWN_TOKEN = 21


def grid_from_bitmap(bitmap: wbmp.Bitmap) -> list[list[bool]] | None:
    """Locate the symbol in a pixel-perfect rendering and sample its modules.

    The bounding box of black pixels is exactly the symbol (the three
    finder corners pin it); the top-left finder's 7-module top edge
    gives the scale. Returns None when no plausible symbol is found.
    """
    black_rows = [y for y, row in enumerate(bitmap.pixels) if not all(row)]
    if not black_rows:
        return None
    y0, y1 = black_rows[0], black_rows[-1]
    rows = [bitmap.pixels[y] for y in black_rows]
    x0 = min(row.index(False) for row in rows)
    x1 = max(len(row) - 1 - row[::-1].index(False) for row in rows)
    w, h = x1 - x0 + 1, y1 - y0 + 1
    if w != h:
        return None

    top = bitmap.pixels[y0]
    run = 0
    for x in range(x0, x1 + 1):
        if top[x]:
            break
        run += 1
    if run == 0 or run % 7:
        return None
    scale = run // 7
    if w % scale:
        return None
    side = w // scale
    if (side - 17) % 4 or not 1 <= (side - 17) // 4 <= 40:
        return None
    half = scale // 2
    return [
        [not bitmap.pixels[y0 + y * scale + half][x0 + x * scale + half] for x in range(side)]
        for y in range(side)
    ]


def _print_claims(claims: tokenmod.VerifiedClaims) -> None:
    print(f"subject: {claims.subject_id}")
    for code, value in claims.attributes:
        name = tokenmod.ATTRIBUTE_NAMES.get(code, f"attr-{code:#04x}")
        print(f"{name}: {value}")
    print(f"issued-at: {claims.issued_at}")
    print(f"expires-at: {claims.expires_at}")
    if claims.nonce is not None:
        print(f"nonce: {claims.nonce}")


def _cmd_nonce(args) -> int:
    challenge = tokenmod.gen_nonce(args.len)
    print(challenge.digits)
    return EXIT_OK


def _cmd_verify(args) -> int:
    pubkey_hex = Path(args.pubkey).read_text().strip()
    try:
        claims = tokenmod.verify_offline(
            args.payload, pubkey_hex, expected_nonce=args.nonce, now=args.now
        )
    except tokenmod.SignatureInvalid as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_SIGNATURE
    except (tokenmod.NonceMissing, tokenmod.NonceMismatch) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_NONCE
    except (tokenmod.Expired, tokenmod.NotYetValid) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_EXPIRY
    except (tokenmod.BadPrefix, tokenmod.DecodeError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _print_claims(claims)
    return EXIT_OK


def _cmd_decode(args) -> int:
    try:
        bitmap = wbmp.wbmp_decode(Path(args.wbmp).read_bytes())
        grid = grid_from_bitmap(bitmap)
        if grid is None:
            raise QrError("no symbol found in image")
        print(qr_decode_grid(grid))
    except (OSError, wbmp.WbmpError, QrError) as exc:
        print(f"undecodable: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    return EXIT_OK


def _cmd_redeem(args) -> int:
    try:
        with urllib.request.urlopen(args.url) as resp:
            data = json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        if exc.code == 409:
            print("rejected: already redeemed", file=sys.stderr)
            return EXIT_ALREADY_REDEEMED
        if exc.code == 404:
            print("rejected: unknown token", file=sys.stderr)
            return EXIT_UNKNOWN_TOKEN
        print(f"rejected: HTTP {exc.code}", file=sys.stderr)
        return EXIT_UNKNOWN_TOKEN
    except (urllib.error.URLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key, value in data.items():
        print(f"{key}: {value}")
    return EXIT_OK


def _nonce_len(value: str) -> int:
    length = int(value)
    if not 6 <= length <= 10:
        raise argparse.ArgumentTypeError("nonce length must be 6..10")
    return length


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wapcred-verifier", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_nonce = sub.add_parser("nonce", help="print a fresh digit challenge")
    p_nonce.add_argument("--len", type=_nonce_len, default=6)
    p_nonce.set_defaults(func=_cmd_nonce)

    p_verify = sub.add_parser("verify", help="verify a scanned payload offline")
    p_verify.add_argument("--payload", required=True, help="text produced by the QR scanner")
    p_verify.add_argument("--pubkey", required=True, help="issuer public key file (64 hex chars)")
    p_verify.add_argument("--nonce", default=None, help="challenge the credential must carry")
    p_verify.add_argument("--now", type=int, default=None, help="clock override (unix seconds)")
    p_verify.set_defaults(func=_cmd_verify)

    p_decode = sub.add_parser("decode", help="print the payload of a rendered WBMP")
    p_decode.add_argument("--wbmp", required=True, help="WBMP file of a rendered symbol")
    p_decode.set_defaults(func=_cmd_decode)

    p_redeem = sub.add_parser("redeem", help="redeem a single-use URI online")
    p_redeem.add_argument("--url", required=True)
    p_redeem.set_defaults(func=_cmd_redeem)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
