"""Pixel-perfect symbol decoding: grid of modules back to payload text.

Handles exact module grids plus byte-level codeword corruption (repaired
by the Reed-Solomon redundancy); geometric distortion is out of scope.
"""

from __future__ import annotations

from wapcred.qr import tables
from wapcred.qr.errors import FormatInfoUnrecoverable, UnsupportedVersion
from wapcred.qr.gf256 import rs_correct
from wapcred.qr.matrix import (
    QrMatrix,
    _MASKS,
    data_positions,
    format_bits,
    format_coords,
    function_patterns,
)
from wapcred.qr.segments import decode_segments, deinterleave

_FORMAT_CANDIDATES = {
    (ecc, mask): format_bits(ecc, mask)
    for ecc in tables.ECC_LEVELS
    for mask in range(8)
}


def _read_format(grid: list[list[bool]]) -> tuple[str, int]:
    """Recover (ecc, mask) from either redundant copy, fixing <= 3 bit errors."""
    for coords in format_coords(len(grid)):
        value = 0
        for i, (y, x) in enumerate(coords):
            if grid[y][x]:
                value |= 1 << i
        best_key = None
        best_dist = 16
        for key, bits in _FORMAT_CANDIDATES.items():
            dist = bin(value ^ bits).count("1")
            if dist < best_dist:
                best_dist = dist
                best_key = key
        if best_key is not None and best_dist <= 3:
            return best_key
    raise FormatInfoUnrecoverable("neither format info copy is within 3 bit errors of a valid code")


def qr_decode_grid(grid) -> str:
    """Decode a square boolean module grid (True = dark) back to its text."""
    if isinstance(grid, QrMatrix):
        rows = grid.modules
    else:
        rows = [[bool(cell) for cell in row] for row in grid]
    side = len(rows)
    if side == 0 or any(len(row) != side for row in rows):
        raise UnsupportedVersion("grid is not square")
    version, rem = divmod(side - 17, 4)
    if rem or not tables.MIN_VERSION <= version <= tables.MAX_VERSION:
        raise UnsupportedVersion(f"side {side} is not a supported symbol dimension")

    ecc, mask_id = _read_format(rows)
    _, reserved = function_patterns(version)

    predicate = _MASKS[mask_id]
    entry = tables.capacity(version, ecc)
    total_bits = entry.total_codewords * 8
    codewords = bytearray(entry.total_codewords)
    for i, (y, x) in enumerate(data_positions(side, reserved)):
        if i >= total_bits:
            break
        bit = rows[y][x] ^ predicate(x, y)
        if bit:
            codewords[i >> 3] |= 0x80 >> (i & 7)

    data = bytearray()
    lengths = entry.data_block_lengths()
    for block, data_len in zip(deinterleave(bytes(codewords), version, ecc), lengths):
        data += rs_correct(block, entry.ecc_per_block)[:data_len]
    return decode_segments(bytes(data), version)
