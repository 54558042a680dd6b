"""Module grid assembly: function patterns, data placement, masking."""

from __future__ import annotations

from dataclasses import dataclass

from wapcred.qr import tables
from wapcred.qr.errors import CodewordCountMismatch

_FORMAT_GEN = 0x537    # BCH(15,5) generator
_FORMAT_XOR = 0x5412   # guarantees format info is never all-zero
_VERSION_GEN = 0x1F25  # BCH(18,6) generator for version info

# Mask predicates, x = column, y = row.
_MASKS = (
    lambda x, y: (x + y) % 2 == 0,
    lambda x, y: y % 2 == 0,
    lambda x, y: x % 3 == 0,
    lambda x, y: (x + y) % 3 == 0,
    lambda x, y: (x // 3 + y // 2) % 2 == 0,
    lambda x, y: x * y % 2 + x * y % 3 == 0,
    lambda x, y: (x * y % 2 + x * y % 3) % 2 == 0,
    lambda x, y: ((x + y) % 2 + x * y % 3) % 2 == 0,
)

_FINDER_RUN = (True, False, True, True, True, False, True, False, False, False, False)
_FINDER_RUN_REV = tuple(reversed(_FINDER_RUN))


@dataclass
class QrMatrix:
    version: int
    ecc: str
    mask_id: int
    modules: list[list[bool]]  # True = dark

    @property
    def size(self) -> int:
        return tables.modules_per_side(self.version)


def format_bits(ecc: str, mask_id: int) -> int:
    data = tables.FORMAT_BITS[ecc] << 3 | mask_id
    rem = data
    for _ in range(10):
        rem = (rem << 1) ^ ((rem >> 9) * _FORMAT_GEN)
    return (data << 10 | rem) ^ _FORMAT_XOR


def version_bits(version: int) -> int:
    rem = version
    for _ in range(12):
        rem = (rem << 1) ^ ((rem >> 11) * _VERSION_GEN)
    return version << 12 | rem


def format_coords(side: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """(row, col) of format bit i for each redundant copy, i = 0..14."""
    copy1 = [(i, 8) for i in range(6)] + [(7, 8), (8, 8), (8, 7)] + [(8, 14 - i) for i in range(9, 15)]
    copy2 = [(8, side - 1 - i) for i in range(8)] + [(side - 15 + i, 8) for i in range(8, 15)]
    return copy1, copy2


def function_patterns(version: int) -> tuple[list[list[bool]], list[list[bool]]]:
    """(modules, reserved) with every function pattern drawn.

    Format areas are reserved but left blank; their bits depend on the
    mask chosen later. Version blocks (versions >= 7) are drawn here.
    """
    side = tables.modules_per_side(version)
    modules = [[False] * side for _ in range(side)]
    reserved = [[False] * side for _ in range(side)]

    def put(y: int, x: int, dark: bool) -> None:
        modules[y][x] = dark
        reserved[y][x] = True

    # Timing patterns; finders and alignment agree with them where they overlap.
    for i in range(side):
        put(6, i, i % 2 == 0)
        put(i, 6, i % 2 == 0)

    # Finder patterns with their light separators, clipped at the edges.
    for cy, cx in ((3, 3), (3, side - 4), (side - 4, 3)):
        for dy in range(-4, 5):
            for dx in range(-4, 5):
                y, x = cy + dy, cx + dx
                if 0 <= y < side and 0 <= x < side:
                    dist = max(abs(dy), abs(dx))
                    put(y, x, dist not in (2, 4))

    centers = tables.ALIGNMENT_CENTERS[version]
    last = len(centers) - 1
    for i, cy in enumerate(centers):
        for j, cx in enumerate(centers):
            # The three combinations sitting on finder corners are omitted.
            if (i == 0 and j == 0) or (i == 0 and j == last) or (i == last and j == 0):
                continue
            for dy in range(-2, 3):
                for dx in range(-2, 3):
                    put(cy + dy, cx + dx, max(abs(dy), abs(dx)) != 1)

    put(side - 8, 8, True)  # dark module

    for coords in format_coords(side):
        for y, x in coords:
            reserved[y][x] = True

    if version >= 7:
        bits = version_bits(version)
        for i in range(18):
            dark = (bits >> i) & 1 == 1
            a = side - 11 + i % 3
            b = i // 3
            put(a, b, dark)
            put(b, a, dark)

    return modules, reserved


def data_positions(side: int, reserved: list[list[bool]]):
    """(row, col) of every data module in zig-zag placement order."""
    right = side - 1
    while right >= 1:
        if right == 6:  # vertical timing column is skipped entirely
            right = 5
        for vert in range(side):
            upward = ((right + 1) & 2) == 0
            y = side - 1 - vert if upward else vert
            for x in (right, right - 1):
                if not reserved[y][x]:
                    yield y, x
        right -= 2


def _place_data(modules: list[list[bool]], reserved: list[list[bool]], codewords: bytes) -> None:
    total_bits = len(codewords) * 8
    for i, (y, x) in enumerate(data_positions(len(modules), reserved)):
        if i >= total_bits:
            break  # remainder modules stay light
        modules[y][x] = (codewords[i >> 3] >> (7 - (i & 7))) & 1 == 1


def _draw_format(modules: list[list[bool]], ecc: str, mask_id: int) -> None:
    bits = format_bits(ecc, mask_id)
    for coords in format_coords(len(modules)):
        for i, (y, x) in enumerate(coords):
            modules[y][x] = (bits >> i) & 1 == 1


def apply_mask(modules: list[list[bool]], reserved: list[list[bool]], mask_id: int) -> None:
    predicate = _MASKS[mask_id]
    side = len(modules)
    for y in range(side):
        row = modules[y]
        skip = reserved[y]
        for x in range(side):
            if not skip[x] and predicate(x, y):
                row[x] = not row[x]


def penalty(modules: list[list[bool]]) -> int:
    side = len(modules)
    score = 0

    lines = [modules[y] for y in range(side)]
    lines += [[modules[y][x] for y in range(side)] for x in range(side)]

    for line in lines:
        # Rule 1: runs of 5+ equal modules.
        run = 1
        for i in range(1, side):
            if line[i] == line[i - 1]:
                run += 1
            else:
                if run >= 5:
                    score += run - 2
                run = 1
        if run >= 5:
            score += run - 2
        # Rule 3: finder-like 1:1:3:1:1 with a 4-module light flank.
        for i in range(side - 10):
            window = tuple(line[i:i + 11])
            if window == _FINDER_RUN or window == _FINDER_RUN_REV:
                score += 40

    # Rule 2: 2x2 blocks of one colour.
    for y in range(side - 1):
        for x in range(side - 1):
            if modules[y][x] == modules[y][x + 1] == modules[y + 1][x] == modules[y + 1][x + 1]:
                score += 3

    # Rule 4: dark-module balance, 10 points per 5% step away from 50%.
    dark = sum(row.count(True) for row in modules)
    total = side * side
    score += (abs(100 * dark - 50 * total) // total) // 5 * 10
    return score


def build_matrix(version: int, ecc: str, codewords: bytes) -> QrMatrix:
    """Assemble the final symbol, choosing the minimum-penalty mask.

    Ties on penalty go to the lowest mask id, keeping the output
    deterministic.
    """
    entry = tables.capacity(version, ecc)
    if len(codewords) != entry.total_codewords:
        raise CodewordCountMismatch(
            f"got {len(codewords)} codewords, version {version}-{ecc} needs {entry.total_codewords}"
        )
    modules, reserved = function_patterns(version)
    _place_data(modules, reserved, codewords)

    best: tuple[int, int, list[list[bool]]] | None = None
    for mask_id in range(8):
        candidate = [row[:] for row in modules]
        apply_mask(candidate, reserved, mask_id)
        _draw_format(candidate, ecc, mask_id)
        score = penalty(candidate)
        if best is None or score < best[0]:
            best = (score, mask_id, candidate)
    assert best is not None
    return QrMatrix(version=version, ecc=ecc, mask_id=best[1], modules=best[2])
