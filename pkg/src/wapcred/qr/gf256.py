"""GF(2^8) arithmetic and Reed-Solomon coding for QR codewords.

Field reduction polynomial 0x11D, generator element 2, generator
polynomial roots at consecutive powers starting from alpha^0 -- the
conventions every conforming QR encoder and scanner shares.
"""

from __future__ import annotations

from functools import lru_cache

from wapcred.qr.errors import EccFailure

_PRIMITIVE = 0x11D

_EXP = [0] * 512
_LOG = [0] * 256


def _init_tables() -> None:
    x = 1
    for i in range(255):
        _EXP[i] = x
        _LOG[x] = i
        x <<= 1
        if x & 0x100:
            x ^= _PRIMITIVE
    # Doubled so products of two log values never need a modulo.
    for i in range(255, 512):
        _EXP[i] = _EXP[i - 255]


_init_tables()


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return _EXP[255 - _LOG[a]]


def gf_pow(a: int, n: int) -> int:
    if a == 0:
        return 0
    return _EXP[(_LOG[a] * n) % 255]


def poly_eval(poly, x: int) -> int:
    """Horner evaluation; poly[0] is the highest-degree coefficient."""
    acc = 0
    for c in poly:
        acc = gf_mul(acc, x) ^ c
    return acc


@lru_cache(maxsize=None)
def generator_poly(ecc_count: int) -> tuple[int, ...]:
    """Product of (x - alpha^i) for i in 0..ecc_count-1, leading 1 first."""
    gen = [1]
    for i in range(ecc_count):
        nxt = [0] * (len(gen) + 1)
        for j, c in enumerate(gen):
            nxt[j] ^= c
            nxt[j + 1] ^= gf_mul(c, _EXP[i])
        gen = nxt
    return tuple(gen)


def rs_ecc(data: bytes, ecc_count: int) -> bytes:
    """Remainder of data * x^ecc_count divided by the generator polynomial."""
    if ecc_count < 1:
        raise ValueError("ecc_count must be >= 1")
    gen = generator_poly(ecc_count)
    rem = bytearray(data) + bytearray(ecc_count)
    for i in range(len(data)):
        c = rem[i]
        if c:
            for j in range(1, len(gen)):
                rem[i + j] ^= gf_mul(gen[j], c)
    return bytes(rem[len(data):])


def _syndromes(codeword, ecc_count: int) -> list[int]:
    return [poly_eval(codeword, _EXP[j]) for j in range(ecc_count)]


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error locator polynomial, ascending coefficients, lam[0] == 1."""
    lam = [1]
    prev = [1]
    errors = 0
    shift = 1
    denom = 1
    for r, s in enumerate(synd):
        delta = s
        for k in range(1, errors + 1):
            if k < len(lam):
                delta ^= gf_mul(lam[k], synd[r - k])
        if delta == 0:
            shift += 1
            continue
        coef = gf_mul(delta, gf_inv(denom))
        cand = list(lam) + [0] * max(0, len(prev) + shift - len(lam))
        for k, c in enumerate(prev):
            cand[k + shift] ^= gf_mul(coef, c)
        if 2 * errors <= r:
            prev = lam
            denom = delta
            errors = r + 1 - errors
            shift = 1
        else:
            shift += 1
        lam = cand
    while len(lam) > 1 and lam[-1] == 0:
        lam.pop()
    return lam


def _eval_ascending(poly: list[int], x: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = gf_mul(acc, x) ^ c
    return acc


def rs_correct(codeword: bytes, ecc_count: int) -> bytes:
    """Return the codeword with up to floor(ecc_count/2) byte errors fixed.

    Raises EccFailure when the corruption exceeds what the redundancy
    can locate, or when the "correction" fails to re-verify.
    """
    n = len(codeword)
    synd = _syndromes(codeword, ecc_count)
    if not any(synd):
        return bytes(codeword)

    lam = _berlekamp_massey(synd)
    n_errors = len(lam) - 1
    if n_errors == 0 or 2 * n_errors > ecc_count:
        raise EccFailure(f"{n_errors} errors exceed correction capacity of {ecc_count} ecc bytes")

    # Chien search: error at term x^p iff lam(alpha^-p) == 0.
    positions = [p for p in range(n) if _eval_ascending(lam, _EXP[(255 - p) % 255]) == 0]
    if len(positions) != n_errors:
        raise EccFailure("error locator roots do not match error count")

    # Forney: omega = (synd * lam) mod x^ecc_count, magnitudes from
    # X_p * omega(X_p^-1) / lam'(X_p^-1).
    omega = [0] * ecc_count
    for i, s in enumerate(synd):
        if s == 0:
            continue
        for j, c in enumerate(lam):
            if i + j < ecc_count:
                omega[i + j] ^= gf_mul(s, c)

    out = bytearray(codeword)
    for p in positions:
        x_inv = _EXP[(255 - p) % 255]
        deriv = 0
        for k in range(1, len(lam), 2):
            deriv ^= gf_mul(lam[k], gf_pow(x_inv, k - 1))
        if deriv == 0:
            raise EccFailure("degenerate error locator")
        magnitude = gf_mul(_EXP[p % 255], gf_mul(_eval_ascending(omega, x_inv), gf_inv(deriv)))
        out[n - 1 - p] ^= magnitude

    if any(_syndromes(out, ecc_count)):
        raise EccFailure("correction did not converge")
    return bytes(out)
