"""QR code generation and pixel-perfect decoding, versions 1..10.

The version ceiling exists because a 46-pixel feature-phone viewport
cannot show anything larger than version 7 at one pixel per module;
10 leaves headroom while keeping the tables small.
"""

from __future__ import annotations

from wapcred.qr import tables
from wapcred.qr.decoder import qr_decode_grid
from wapcred.qr.errors import (
    CapacityExceeded,
    CodewordCountMismatch,
    DoesNotFit,
    EccFailure,
    FormatInfoUnrecoverable,
    InvalidCharacterForMode,
    MalformedSegments,
    QrError,
    UnsupportedVersion,
)
from wapcred.qr.gf256 import rs_correct, rs_ecc
from wapcred.qr.matrix import QrMatrix, build_matrix
from wapcred.qr.segments import (
    MODE_ALPHANUMERIC,
    MODE_BYTE,
    decode_segments,
    encode_segments,
    interleave,
)
from wapcred.qr.tables import (
    ALPHANUMERIC_CHARSET,
    ECC_LEVELS,
    ECC_RECOVERY_FRACTION,
    MAX_VERSION,
    MIN_VERSION,
    capacity,
    modules_per_side,
)

__all__ = [
    "ALPHANUMERIC_CHARSET",
    "ECC_LEVELS",
    "ECC_RECOVERY_FRACTION",
    "MAX_VERSION",
    "MIN_VERSION",
    "MODE_ALPHANUMERIC",
    "MODE_BYTE",
    "CapacityExceeded",
    "CodewordCountMismatch",
    "DoesNotFit",
    "EccFailure",
    "FormatInfoUnrecoverable",
    "InvalidCharacterForMode",
    "MalformedSegments",
    "QrError",
    "QrMatrix",
    "UnsupportedVersion",
    "build_matrix",
    "capacity",
    "decode_segments",
    "encode_segments",
    "interleave",
    "modules_per_side",
    "qr_decode_grid",
    "qr_encode",
    "rs_correct",
    "rs_ecc",
    "select_version",
]


def select_version(payload_len: int, mode: str, ecc: str, pixel_budget: int) -> int:
    """Smallest version fitting payload_len at `ecc` within the pixel budget.

    One module occupies one pixel, so a version fits a screen only when
    its side is at most the budget.
    """
    if payload_len <= 0:
        raise ValueError("payload_len must be positive")
    if pixel_budget < modules_per_side(MIN_VERSION):
        raise ValueError(f"pixel budget {pixel_budget} below the smallest symbol")
    for version in range(MIN_VERSION, MAX_VERSION + 1):
        if modules_per_side(version) > pixel_budget:
            break
        entry = capacity(version, ecc)
        cap = entry.alphanumeric_capacity if mode == MODE_ALPHANUMERIC else entry.byte_capacity
        if cap >= payload_len:
            return version
    raise DoesNotFit(
        f"{payload_len} {mode} chars at level {ecc} do not fit within {pixel_budget} px"
    )


def qr_encode(text: str, ecc: str = "L", pixel_budget: int = 46) -> QrMatrix:
    """Encode text into the smallest symbol fitting the pixel budget.

    Alphanumeric mode is used whenever every character qualifies, byte
    mode (UTF-8) otherwise.
    """
    if all(c in tables.ALPHANUMERIC_VALUES for c in text):
        mode = MODE_ALPHANUMERIC
        payload_len = len(text)
    else:
        mode = MODE_BYTE
        payload_len = len(text.encode("utf-8"))
    version = select_version(payload_len, mode, ecc, pixel_budget)
    data = encode_segments(text, mode, version, ecc)
    return build_matrix(version, ecc, interleave(data, version, ecc))
