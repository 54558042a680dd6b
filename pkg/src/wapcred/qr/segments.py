"""Payload <-> data codewords: segment bit coding and block interleaving."""

from __future__ import annotations

from wapcred.qr import tables
from wapcred.qr.bits import BitBuffer, BitReader
from wapcred.qr.errors import (
    CapacityExceeded,
    CodewordCountMismatch,
    InvalidCharacterForMode,
    MalformedSegments,
)
from wapcred.qr.gf256 import rs_ecc

MODE_ALPHANUMERIC = "alphanumeric"
MODE_BYTE = "byte"

_MODE_INDICATOR = {MODE_ALPHANUMERIC: 0b0010, MODE_BYTE: 0b0100}
_PAD_CODEWORDS = (0xEC, 0x11)


def char_count_bits(mode: str, version: int) -> int:
    # Versions 1..9 share one indicator width; version 10 starts the next band.
    if mode == MODE_ALPHANUMERIC:
        return 9 if version <= 9 else 11
    if mode == MODE_BYTE:
        return 8 if version <= 9 else 16
    raise ValueError(f"unknown mode {mode!r}")


def encode_segments(text: str, mode: str, version: int, ecc: str) -> bytes:
    """Encode text as one segment and pad to the full data-codeword count."""
    entry = tables.capacity(version, ecc)
    if not text:
        raise ValueError("payload must be non-empty")

    buf = BitBuffer()
    buf.append(_MODE_INDICATOR[mode], 4)
    if mode == MODE_ALPHANUMERIC:
        bad = next((c for c in text if c not in tables.ALPHANUMERIC_VALUES), None)
        if bad is not None:
            raise InvalidCharacterForMode(f"{bad!r} is not QR-alphanumeric")
        if len(text) > entry.alphanumeric_capacity:
            raise CapacityExceeded(
                f"{len(text)} chars > {entry.alphanumeric_capacity} for version {version}-{ecc}"
            )
        buf.append(len(text), char_count_bits(mode, version))
        vals = [tables.ALPHANUMERIC_VALUES[c] for c in text]
        for i in range(0, len(vals) - 1, 2):
            buf.append(vals[i] * 45 + vals[i + 1], 11)
        if len(vals) % 2:
            buf.append(vals[-1], 6)
    else:
        data = text.encode("utf-8")
        if len(data) > entry.byte_capacity:
            raise CapacityExceeded(
                f"{len(data)} bytes > {entry.byte_capacity} for version {version}-{ecc}"
            )
        buf.append(len(data), char_count_bits(mode, version))
        for b in data:
            buf.append(b, 8)

    cap_bits = entry.data_codewords * 8
    buf.append(0, min(4, cap_bits - len(buf)))  # terminator
    if len(buf) % 8:
        buf.append(0, 8 - len(buf) % 8)
    out = bytearray(buf.to_bytes())
    for i in range(entry.data_codewords - len(out)):
        out.append(_PAD_CODEWORDS[i % 2])
    return bytes(out)


def decode_segments(data: bytes, version: int) -> str:
    """Parse the segment bit stream of decoded data codewords back to text."""
    reader = BitReader(data)
    parts: list[str] = []
    try:
        while reader.remaining >= 4:
            mode = reader.read(4)
            if mode == 0:  # terminator
                break
            if mode == _MODE_INDICATOR[MODE_ALPHANUMERIC]:
                count = reader.read(char_count_bits(MODE_ALPHANUMERIC, version))
                chars: list[str] = []
                for _ in range(count // 2):
                    v = reader.read(11)
                    if v >= 45 * 45:
                        raise MalformedSegments(f"alphanumeric pair value {v} out of range")
                    chars.append(tables.ALPHANUMERIC_CHARSET[v // 45])
                    chars.append(tables.ALPHANUMERIC_CHARSET[v % 45])
                if count % 2:
                    v = reader.read(6)
                    if v >= 45:
                        raise MalformedSegments(f"alphanumeric char value {v} out of range")
                    chars.append(tables.ALPHANUMERIC_CHARSET[v])
                parts.append("".join(chars))
            elif mode == _MODE_INDICATOR[MODE_BYTE]:
                count = reader.read(char_count_bits(MODE_BYTE, version))
                raw = bytes(reader.read(8) for _ in range(count))
                try:
                    parts.append(raw.decode("utf-8"))
                except UnicodeDecodeError as exc:
                    raise MalformedSegments(f"byte segment is not UTF-8: {exc}") from None
            else:
                raise MalformedSegments(f"unsupported mode indicator {mode:#06b}")
    except ValueError as exc:  # BitReader exhausted mid-segment
        raise MalformedSegments(str(exc)) from None
    if not parts:
        raise MalformedSegments("no segments before terminator")
    return "".join(parts)


def interleave(data: bytes, version: int, ecc: str) -> bytes:
    """Split data into blocks, append per-block ECC, interleave per the symbology."""
    entry = tables.capacity(version, ecc)
    if len(data) != entry.data_codewords:
        raise CodewordCountMismatch(
            f"got {len(data)} data codewords, version {version}-{ecc} needs {entry.data_codewords}"
        )
    lengths = entry.data_block_lengths()
    blocks: list[bytes] = []
    eccs: list[bytes] = []
    offset = 0
    for length in lengths:
        block = data[offset:offset + length]
        offset += length
        blocks.append(block)
        eccs.append(rs_ecc(block, entry.ecc_per_block))

    out = bytearray()
    for i in range(max(lengths)):
        for block in blocks:
            if i < len(block):
                out.append(block[i])
    for i in range(entry.ecc_per_block):
        for e in eccs:
            out.append(e[i])
    return bytes(out)


def deinterleave(codewords: bytes, version: int, ecc: str) -> list[bytes]:
    """Inverse of interleave: full per-block codewords (data + ECC)."""
    entry = tables.capacity(version, ecc)
    if len(codewords) != entry.total_codewords:
        raise CodewordCountMismatch(
            f"got {len(codewords)} codewords, version {version}-{ecc} needs {entry.total_codewords}"
        )
    lengths = entry.data_block_lengths()
    data_parts: list[bytearray] = [bytearray() for _ in lengths]
    idx = 0
    for i in range(max(lengths)):
        for b, length in enumerate(lengths):
            if i < length:
                data_parts[b].append(codewords[idx])
                idx += 1
    ecc_parts: list[bytearray] = [bytearray() for _ in lengths]
    for _ in range(entry.ecc_per_block):
        for b in range(len(lengths)):
            ecc_parts[b].append(codewords[idx])
            idx += 1
    return [bytes(d + e) for d, e in zip(data_parts, ecc_parts)]
