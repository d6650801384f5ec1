"""Bitcoin address validation, entropy screening, and vanity-cost math.

Two encodings appear on chain: Base58Check (prefixes 1 and 3) and Bech32
segwit (prefix bc1). Every character of either encoding maps into a joint
60-symbol alphabet, so downstream code can treat any address as a short
sequence of small integers regardless of scheme.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from hashlib import sha256

__all__ = [
    "BASE58_ALPHABET",
    "BASE60_ALPHABET",
    "BECH32_CHARSET",
    "ALPHABET_SIZE",
    "MAX_ADDRESS_LEN",
    "MIN_ADDRESS_LEN",
    "AddressError",
    "InvalidCharacter",
    "BadChecksum",
    "OverlongAddress",
    "Scheme",
    "Address",
    "VanityCostParams",
    "validate_address",
    "shannon_entropy",
    "vanity_cost",
    "non_vanity_threshold",
    "base58check_decode",
    "base58check_encode",
    "bech32_encode",
]

BASE58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
# The two characters Base58 bans but Bech32 uses, appended last so Base58
# code points keep their standard values.
BASE60_ALPHABET = BASE58_ALPHABET + "0l"
BECH32_CHARSET = "qpzry9x8gf2tvdw0s3jn54khce6mua7l"

ALPHABET_SIZE = 60
MAX_ADDRESS_LEN = 62
MIN_ADDRESS_LEN = 14
MAX_ENTROPY = math.log2(ALPHABET_SIZE)

_BASE58_INDEX = {c: i for i, c in enumerate(BASE58_ALPHABET)}
_BASE60_INDEX = {c: i for i, c in enumerate(BASE60_ALPHABET)}
_BECH32_INDEX = {c: i for i, c in enumerate(BECH32_CHARSET)}

_BECH32_CONST = 1
_BECH32M_CONST = 0x2BC830A3

# Julian year; close enough to the calendar that brute-force estimates agree
# within rounding either way.
SECONDS_PER_YEAR = 86400 * 365.25


class AddressError(ValueError):
    """A string that is not a valid address under any supported scheme."""


class InvalidCharacter(AddressError):
    pass


class BadChecksum(AddressError):
    pass


class OverlongAddress(AddressError):
    pass


class Scheme(str, Enum):
    BASE58 = "base58"
    BECH32 = "bech32"


@dataclass(frozen=True)
class Address:
    """A checksum-verified address with its per-character Base60 code points."""

    text: str
    scheme: Scheme
    codepoints: tuple

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class VanityCostParams:
    """Inputs to the brute-force cost model: s seconds per candidate drawn
    from an alphabet_size**n pattern space."""

    s: float
    n: int
    alphabet_size: int

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("s must be a positive number of seconds")
        if self.n < 0:
            raise ValueError("pattern length n must be non-negative")
        if self.alphabet_size not in (58, 32):
            raise ValueError("alphabet_size must be 58 (Base58) or 32 (Bech32)")


def _sha256d(data: bytes) -> bytes:
    return sha256(sha256(data).digest()).digest()


def base58check_decode(text: str) -> bytes:
    """Decode a Base58Check string into its 25-byte versioned payload.

    Raises InvalidCharacter for symbols outside the Base58 alphabet and
    BadChecksum when the payload is not 25 bytes or the trailing 4-byte
    double-sha256 checksum does not match.
    """
    num = 0
    for pos, ch in enumerate(text):
        digit = _BASE58_INDEX.get(ch)
        if digit is None:
            raise InvalidCharacter(f"char {ch!r} at position {pos} is not Base58")
        num = num * 58 + digit
    # leading '1' characters are literal zero bytes
    pad = len(text) - len(text.lstrip("1"))
    body = num.to_bytes((num.bit_length() + 7) // 8, "big") if num else b""
    raw = b"\x00" * pad + body
    if len(raw) != 25:
        raise BadChecksum(f"decoded payload is {len(raw)} bytes, expected 25")
    if _sha256d(raw[:21])[:4] != raw[21:]:
        raise BadChecksum("double-sha256 checksum mismatch")
    return raw


def base58check_encode(payload: bytes) -> str:
    """Encode a 21-byte versioned payload, appending its 4-byte checksum."""
    if len(payload) != 21:
        raise ValueError(f"versioned payload must be 21 bytes, got {len(payload)}")
    raw = payload + _sha256d(payload)[:4]
    num = int.from_bytes(raw, "big")
    digits = []
    while num:
        num, rem = divmod(num, 58)
        digits.append(BASE58_ALPHABET[rem])
    pad = len(raw) - len(raw.lstrip(b"\x00"))
    return "1" * pad + "".join(reversed(digits))


def _bech32_polymod(values) -> int:
    generator = (0x3B6A57B2, 0x26508E6D, 0x1EA119FA, 0x3D4233DD, 0x2A1462B3)
    chk = 1
    for value in values:
        top = chk >> 25
        chk = (chk & 0x1FFFFFF) << 5 ^ value
        for i in range(5):
            chk ^= generator[i] if ((top >> i) & 1) else 0
    return chk


def _bech32_hrp_expand(hrp: str):
    return [ord(x) >> 5 for x in hrp] + [0] + [ord(x) & 31 for x in hrp]


def bech32_encode(data, hrp: str = "bc") -> str:
    """Assemble hrp + 5-bit data symbols into a checksummed Bech32 string."""
    values = _bech32_hrp_expand(hrp) + list(data)
    polymod = _bech32_polymod(values + [0] * 6) ^ _BECH32_CONST
    checksum = [(polymod >> 5 * (5 - i)) & 31 for i in range(6)]
    return hrp + "1" + "".join(BECH32_CHARSET[d] for d in list(data) + checksum)


def _validate_bech32(text: str) -> None:
    # The separator is the fixed '1' after the "bc" prefix. '1' is not in the
    # data charset, so any later '1' fails the character check below.
    data_part = text[3:]
    if len(data_part) < 6:
        raise BadChecksum("bech32 data part shorter than its own checksum")
    data = []
    for pos, ch in enumerate(data_part, start=3):
        idx = _BECH32_INDEX.get(ch)
        if idx is None:
            raise InvalidCharacter(f"char {ch!r} at position {pos} is not Bech32")
        data.append(idx)
    # Accept both checksum constants in use on chain (classic and the v1+
    # variant); they differ only in the final xor constant.
    const = _bech32_polymod(_bech32_hrp_expand("bc") + data)
    if const not in (_BECH32_CONST, _BECH32M_CONST):
        raise BadChecksum("bech32 polymod checksum mismatch")


def validate_address(text: str) -> Address:
    """Parse and checksum-verify an address, producing its Base60 code points.

    Scheme detection is by prefix: "bc1" means Bech32, a leading '1' or '3'
    means Base58Check. Bech32 strings must be entirely lower case.
    """
    if not text:
        raise InvalidCharacter("empty address")
    if len(text) > MAX_ADDRESS_LEN:
        raise OverlongAddress(f"{len(text)} chars, maximum is {MAX_ADDRESS_LEN}")
    if len(text) < MIN_ADDRESS_LEN:
        raise BadChecksum(f"{len(text)} chars is shorter than any address form")
    if text[:3].lower() == "bc1":
        if not text.islower():
            raise InvalidCharacter("upper case in a bech32 address")
        _validate_bech32(text)
        scheme = Scheme.BECH32
    elif text[0] in "13":
        base58check_decode(text)
        scheme = Scheme.BASE58
    else:
        raise InvalidCharacter(f"unrecognized address prefix {text[0]!r}")
    return Address(text, scheme, tuple(_BASE60_INDEX[c] for c in text))


def shannon_entropy(addr) -> float:
    """Entropy in bits per character of the address text's char distribution.

    Accepts an Address or a raw string. The screen runs over the full text,
    version prefix and checksum characters included, and returns a value in
    [0, log2(60)].
    """
    text = addr.text if isinstance(addr, Address) else addr
    if not text:
        return 0.0
    n = len(text)
    h = 0.0
    for count in Counter(text).values():
        p = count / n
        h -= p * math.log2(p)
    return h


def vanity_cost(s, n=None, alphabet_size=None) -> float:
    """Expected wall time, in years, to brute-force an n-character pattern.

    Testing one candidate costs s seconds and each pattern character
    multiplies the search space by the alphabet size, so the total is
    s * alphabet_size**n seconds. Accepts a VanityCostParams or the three
    scalars. Values beyond float range come back as +infinity.
    """
    params = s if isinstance(s, VanityCostParams) else VanityCostParams(s, n, alphabet_size)
    try:
        seconds = params.s * float(params.alphabet_size ** params.n)
    except OverflowError:
        return math.inf
    return seconds / SECONDS_PER_YEAR


_NON_VANITY_THRESHOLD = {Scheme.BASE58: 11, Scheme.BECH32: 13}


def non_vanity_threshold(scheme) -> int:
    """Minimum forged-pattern length considered beyond vanity-forging reach."""
    return _NON_VANITY_THRESHOLD[Scheme(scheme)]
