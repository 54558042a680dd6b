#!/usr/bin/env python3
"""Print the sizing tradeoff that shapes the whole system: which QR
versions fit a given screen pixel budget, and how many raw bytes each
leaves for a credential once base45 overhead is paid.

Usage: capacity_report.py [pixel_budget]   (default 46)
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wapcred.qr import ECC_LEVELS, MAX_VERSION, capacity, modules_per_side
from wapcred.token import ENVELOPE_PREFIX


def base45_byte_budget(chars: int) -> int:
    """Largest n with encoded length 3*(n//2) + 2*(n%2) <= chars."""
    n = (chars // 3) * 2
    if chars % 3 == 2:
        n += 1
    return n


def main() -> int:
    budget = int(sys.argv[1]) if len(sys.argv) > 1 else 46
    prefix_cost = len(ENVELOPE_PREFIX)
    print(f"screen pixel budget: {budget} px (one module per pixel)\n")
    print(f"{'ver':>3} {'side':>4} {'fits':>4}   " +
          "  ".join(f"{'alnum-' + ecc:>9} {'bytes':>5}" for ecc in ECC_LEVELS))
    for version in range(1, MAX_VERSION + 1):
        side = modules_per_side(version)
        fits = "yes" if side <= budget else "no"
        cells = []
        for ecc in ECC_LEVELS:
            chars = capacity(version, ecc).alphanumeric_capacity
            cells.append(f"{chars:>9} {base45_byte_budget(chars - prefix_cost):>5}")
        print(f"{version:>3} {side:>4} {fits:>4}   " + "  ".join(cells))
    print(
        "\n'bytes' = raw payload budget per envelope after the "
        f"{prefix_cost}-char prefix, at 2 bytes per 3 chars."
    )
    print("An Ed25519 signature costs 64 of those bytes.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
