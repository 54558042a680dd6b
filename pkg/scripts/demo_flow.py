#!/usr/bin/env python3
"""Walk the whole protocol in one process and narrate each step.

Spins up the service on an ephemeral port, plays both the prover and
the verifier for the two flows (offline credential with a nonce
challenge, single-use subsidy URI), and prints what travels over each
hop.
"""

from __future__ import annotations

import re
import sys
import tempfile
import urllib.error
import urllib.request
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wapcred import token as tokenmod
from wapcred import wbmp
from wapcred.qr import qr_decode_grid
from wapcred.service import Service, ServiceConfig, make_server
from wapcred.store import Store
from wapcred.verifier_cli import grid_from_bitmap


def fetch(url):
    try:
        with urllib.request.urlopen(url, timeout=10) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


def ascii_qr(bitmap: wbmp.Bitmap) -> str:
    return "\n".join(
        "".join("  " if px else "##" for px in row) for row in bitmap.pixels
    )


def main() -> int:
    tmp = Path(tempfile.mkdtemp(prefix="wapcred-demo-"))
    key = tokenmod.generate_signing_key()
    store = Store(tmp / "state.jsonl")
    store.put_user("alice", "1234", use_case="offline", attributes={"status": "ELIGIBLE"})
    store.put_user("bob", "9999", use_case="subsidy", entitlement="FOOD-2026-08")

    service = Service(store, key, ServiceConfig())
    httpd = make_server(service)
    host, port = httpd.server_address
    base = f"http://{host}:{port}"
    service.config.base_url = base
    import threading

    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    print(f"service listening at {base}; state in {tmp}\n")

    print("=== use case 1: offline identity credential ===")
    challenge = tokenmod.gen_nonce(6)
    print(f"verifier challenges with nonce {challenge.digits}")
    _, deck = fetch(f"{base}/auth?user=alice&pin=1234&nonce={challenge.digits}")
    image_path = re.search(rb'src="([^"]+)"', deck).group(1).decode()
    print(f"prover logs in, microbrowser loads {image_path}")
    _, image = fetch(base + image_path)
    bitmap = wbmp.wbmp_decode(image)
    print(f"phone displays a {bitmap.width}x{bitmap.height} px WBMP:")
    print(ascii_qr(bitmap))
    envelope = qr_decode_grid(grid_from_bitmap(bitmap))
    print(f"\nverifier scans -> {envelope[:40]}... ({len(envelope)} chars)")
    claims = tokenmod.verify_offline(
        envelope, tokenmod.public_key_hex(key), expected_nonce=challenge.digits
    )
    print(f"offline verification OK: subject={claims.subject_id} attrs={claims.attributes}\n")

    print("=== use case 2: food subsidy, single-use URI ===")
    _, deck = fetch(f"{base}/auth?user=bob&pin=9999")
    image_path = re.search(rb'src="([^"]+)"', deck).group(1).decode()
    _, image = fetch(base + image_path)
    uri = qr_decode_grid(grid_from_bitmap(wbmp.wbmp_decode(image)))
    print(f"QR carries single-use URI: {uri}")
    status, body = fetch(uri)
    print(f"first redemption:  HTTP {status} {body.decode().strip()}")
    status, body = fetch(uri)
    print(f"second redemption: HTTP {status} {body.decode().strip()}")

    httpd.shutdown()
    httpd.server_close()
    store.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
