"""Symbol structure tables for QR versions 1..10.

Transcribed from the published QR symbology tables. The character
capacities are redundant with the codeword counts; the test suite
cross-checks them against the segment-overhead arithmetic so a
transcription slip cannot survive unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass

from wapcred.qr.errors import UnsupportedVersion

MIN_VERSION = 1
MAX_VERSION = 10

ECC_LEVELS = ("L", "M", "Q", "H")

# Fraction of the symbol the Reed-Solomon redundancy can restore.
ECC_RECOVERY_FRACTION = {"L": 0.07, "M": 0.15, "Q": 0.25, "H": 0.30}

# Two-bit field stored in the format information.
FORMAT_BITS = {"L": 1, "M": 0, "Q": 3, "H": 2}

ALPHANUMERIC_CHARSET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:"
ALPHANUMERIC_VALUES = {ch: i for i, ch in enumerate(ALPHANUMERIC_CHARSET)}

# Index 0 unused so the version number indexes directly.
_TOTAL_CODEWORDS = (0, 26, 44, 70, 100, 134, 172, 196, 242, 292, 346)

_ECC_PER_BLOCK = {
    "L": (0, 7, 10, 15, 20, 26, 18, 20, 24, 30, 18),
    "M": (0, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26),
    "Q": (0, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24),
    "H": (0, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28),
}

_NUM_BLOCKS = {
    "L": (0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4),
    "M": (0, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5),
    "Q": (0, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8),
    "H": (0, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8),
}

_ALPHANUMERIC_CAPACITY = {
    "L": (0, 25, 47, 77, 114, 154, 195, 224, 279, 335, 395),
    "M": (0, 20, 38, 61, 90, 122, 154, 178, 221, 262, 311),
    "Q": (0, 16, 29, 47, 67, 87, 108, 125, 157, 189, 221),
    "H": (0, 10, 20, 35, 50, 64, 84, 93, 122, 143, 174),
}

_BYTE_CAPACITY = {
    "L": (0, 17, 32, 53, 78, 106, 134, 154, 192, 230, 271),
    "M": (0, 14, 26, 42, 62, 84, 106, 122, 152, 180, 213),
    "Q": (0, 11, 20, 32, 46, 60, 74, 86, 108, 130, 151),
    "H": (0, 7, 14, 24, 34, 44, 58, 64, 84, 98, 119),
}

# Row/column coordinates of alignment pattern centres.
ALIGNMENT_CENTERS = (
    (),
    (),
    (6, 18),
    (6, 22),
    (6, 26),
    (6, 30),
    (6, 34),
    (6, 22, 38),
    (6, 24, 42),
    (6, 26, 46),
    (6, 28, 50),
)


@dataclass(frozen=True)
class CapacityEntry:
    version: int
    ecc: str
    total_codewords: int
    ecc_per_block: int
    num_blocks: int
    alphanumeric_capacity: int
    byte_capacity: int

    @property
    def data_codewords(self) -> int:
        return self.total_codewords - self.ecc_per_block * self.num_blocks

    def data_block_lengths(self) -> list[int]:
        """Per-block data codeword counts, shorter blocks first."""
        base, extra = divmod(self.data_codewords, self.num_blocks)
        return [base] * (self.num_blocks - extra) + [base + 1] * extra


def modules_per_side(version: int) -> int:
    return 17 + 4 * version


def check_version(version: int) -> None:
    if not MIN_VERSION <= version <= MAX_VERSION:
        raise UnsupportedVersion(f"version {version} outside {MIN_VERSION}..{MAX_VERSION}")


def capacity(version: int, ecc: str) -> CapacityEntry:
    check_version(version)
    if ecc not in ECC_LEVELS:
        raise ValueError(f"unknown ECC level {ecc!r}")
    return CapacityEntry(
        version=version,
        ecc=ecc,
        total_codewords=_TOTAL_CODEWORDS[version],
        ecc_per_block=_ECC_PER_BLOCK[ecc][version],
        num_blocks=_NUM_BLOCKS[ecc][version],
        alphanumeric_capacity=_ALPHANUMERIC_CAPACITY[ecc][version],
        byte_capacity=_BYTE_CAPACITY[ecc][version],
    )
