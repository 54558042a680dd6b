"""WBMP (type 0) codec and the QR-to-bitmap renderer.

Type 0 is the 1-bit monochrome format WAP microbrowsers display. Bit 1
is white per the format, so a QR "dark" module maps to 0 -- inverting
this silently breaks every scanner, hence the explicit mapping below.
"""

from __future__ import annotations

from dataclasses import dataclass

from wapcred.qr.matrix import QrMatrix


class WbmpError(ValueError):
    pass


class UnsupportedType(WbmpError):
    pass


class Truncated(WbmpError):
    pass


class BadMultiByteInt(WbmpError):
    pass


class BudgetExceeded(ValueError):
    pass


@dataclass
class Bitmap:
    width: int
    height: int
    pixels: list[list[bool]]  # row-major, True = white

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("bitmap dimensions must be >= 1")
        if len(self.pixels) != self.height or any(len(r) != self.width for r in self.pixels):
            raise ValueError("pixel grid does not match width x height")


@dataclass
class WbmpImage:
    bitmap: Bitmap
    data: bytes


def _mbi_encode(value: int) -> bytes:
    # 7 data bits per byte, high bit set on every byte but the last.
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def _mbi_decode(data: bytes, pos: int) -> tuple[int, int]:
    if pos >= len(data):
        raise Truncated("multi-byte integer expected past end of data")
    value = 0
    count = 0
    while True:
        if pos >= len(data):
            raise BadMultiByteInt("unterminated multi-byte integer")
        b = data[pos]
        pos += 1
        count += 1
        if count > 5:
            raise BadMultiByteInt("multi-byte integer exceeds 32 bits")
        value = (value << 7) | (b & 0x7F)
        if not b & 0x80:
            if value > 0xFFFFFFFF:
                raise BadMultiByteInt("multi-byte integer exceeds 32 bits")
            return value, pos


def wbmp_encode(bitmap: Bitmap) -> bytes:
    """Serialize as WBMP type 0: rows packed MSB-first, padded per row."""
    out = bytearray(b"\x00\x00")  # TypeField=0, FixHeaderField=0
    out += _mbi_encode(bitmap.width)
    out += _mbi_encode(bitmap.height)
    for row in bitmap.pixels:
        byte = 0
        for x, white in enumerate(row):
            if white:
                byte |= 0x80 >> (x & 7)
            if x & 7 == 7:
                out.append(byte)
                byte = 0
        if bitmap.width & 7:
            out.append(byte)
    return bytes(out)


def wbmp_decode(data: bytes) -> Bitmap:
    """Inverse of wbmp_encode; trailing pad bits in each row are ignored."""
    type_field, pos = _mbi_decode(data, 0)
    if type_field != 0:
        raise UnsupportedType(f"WBMP type {type_field} not supported")
    if pos >= len(data):
        raise Truncated("missing fixed header byte")
    if data[pos] != 0:
        raise UnsupportedType("nonzero fixed header; extension headers not supported")
    pos += 1
    width, pos = _mbi_decode(data, pos)
    height, pos = _mbi_decode(data, pos)
    if width < 1 or height < 1:
        raise WbmpError("zero-sized bitmap")
    row_bytes = (width + 7) // 8
    if len(data) - pos < row_bytes * height:
        raise Truncated(f"pixel data short: need {row_bytes * height} bytes, have {len(data) - pos}")
    pixels = []
    for y in range(height):
        row_off = pos + y * row_bytes
        pixels.append([
            data[row_off + (x >> 3)] & (0x80 >> (x & 7)) != 0
            for x in range(width)
        ])
    return Bitmap(width=width, height=height, pixels=pixels)


def render_qr(
    matrix: QrMatrix,
    scale: int = 1,
    quiet_zone: int = 0,
    pixel_budget: int | None = None,
) -> WbmpImage:
    """Render a symbol to WBMP: dark modules black (0), everything else white.

    The default zero quiet zone is deliberate: a 45-module symbol plus
    the recommended 4-module zone cannot fit a 46-pixel viewport, and
    the light page background around the image stands in for it.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    if quiet_zone < 0:
        raise ValueError("quiet_zone must be >= 0")
    side = (matrix.size + 2 * quiet_zone) * scale
    if pixel_budget is not None and side > pixel_budget:
        raise BudgetExceeded(f"rendered side {side} px exceeds budget {pixel_budget} px")
    pixels = [[True] * side for _ in range(side)]
    offset = quiet_zone * scale
    for my, row in enumerate(matrix.modules):
        for mx, dark in enumerate(row):
            if dark:
                for dy in range(scale):
                    prow = pixels[offset + my * scale + dy]
                    for dx in range(scale):
                        prow[offset + mx * scale + dx] = False
    bitmap = Bitmap(width=side, height=side, pixels=pixels)
    return WbmpImage(bitmap=bitmap, data=wbmp_encode(bitmap))


def downsample(bitmap: Bitmap, scale: int, quiet_zone: int) -> list[list[bool]]:
    """Recover the module grid (True = dark) from a rendering with known geometry."""
    side_px = bitmap.width
    side = side_px // scale - 2 * quiet_zone
    offset = quiet_zone * scale
    return [
        [not bitmap.pixels[offset + y * scale][offset + x * scale] for x in range(side)]
        for y in range(side)
    ]
