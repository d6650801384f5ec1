"""Positional feature encoding of addresses.

An address becomes 3,780 small non-negative integers: 60 per-symbol
frequencies followed by a row-major flattened 62x60 one-hot matrix whose
row i marks which symbol sits at position i. Features stay unsigned bytes
until the model boundary widens them to reals, which halves memory during
pool sweeps.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .addrcodec import (
    ALPHABET_SIZE,
    BASE60_ALPHABET,
    MAX_ADDRESS_LEN,
    Address,
    AddressError,
    InvalidCharacter,
    OverlongAddress,
    validate_address,
)

FEATURE_WIDTH = ALPHABET_SIZE + MAX_ADDRESS_LEN * ALPHABET_SIZE  # 3,780

_BASE60_INDEX = {c: i for i, c in enumerate(BASE60_ALPHABET)}

_DUMP_MAGIC = b"BSFM0001"


@dataclass(frozen=True)
class FeatureVector:
    """One encoded address; v and m are views into the combined vector."""

    combined: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.combined[:ALPHABET_SIZE]

    @property
    def m(self) -> np.ndarray:
        return self.combined[ALPHABET_SIZE:].reshape(MAX_ADDRESS_LEN, ALPHABET_SIZE)


def _codepoints(item) -> tuple:
    if isinstance(item, Address):
        return item.codepoints
    if isinstance(item, str):
        return validate_address(item).codepoints
    raise TypeError(f"expected Address or str, got {type(item).__name__}")


def _text_codepoints(item) -> tuple:
    # Entropy screening does not need a checksum pass, only the symbol map.
    if isinstance(item, Address):
        return item.codepoints
    try:
        return tuple(_BASE60_INDEX[c] for c in item)
    except KeyError as exc:
        raise InvalidCharacter(f"char {exc.args[0]!r} has no Base60 code") from None


def encode(addr) -> FeatureVector:
    """Encode one validated address (or address string)."""
    cps = _codepoints(addr)
    if len(cps) > MAX_ADDRESS_LEN:
        raise OverlongAddress(f"{len(cps)} chars, maximum is {MAX_ADDRESS_LEN}")
    combined = np.zeros(FEATURE_WIDTH, np.uint8)
    for i, c in enumerate(cps):
        combined[c] += 1
        combined[ALPHABET_SIZE + i * ALPHABET_SIZE + c] = 1
    return FeatureVector(combined)


def codes_matrix(addresses: Sequence, *, validate: bool = True) -> np.ndarray:
    """Pack Base60 code points into a right-padded int16 matrix (pad -1).

    Per-address failures carry the offending batch index in their message.
    """
    out = np.full((len(addresses), MAX_ADDRESS_LEN), -1, np.int16)
    pick = _codepoints if validate else _text_codepoints
    for i, item in enumerate(addresses):
        try:
            cps = pick(item)
            if len(cps) > MAX_ADDRESS_LEN:
                raise OverlongAddress(f"{len(cps)} chars, maximum is {MAX_ADDRESS_LEN}")
        except AddressError as exc:
            raise type(exc)(f"address [{i}]: {exc}") from None
        out[i, : len(cps)] = cps
    return out


def encode_batch(addresses: Sequence) -> np.ndarray:
    """Encode many addresses; row i equals encode(addresses[i]).combined."""
    out = np.zeros((len(addresses), FEATURE_WIDTH), np.uint8)
    if len(addresses) == 0:
        return out
    codes = codes_matrix(addresses)
    _kernels.fill_feature_rows(codes, out)
    return out


def batch_entropy(addresses: Sequence) -> np.ndarray:
    """Shannon entropy per address, over the full text, in bits per char.

    Accepts Address objects or raw strings; strings are mapped through the
    symbol table without a checksum pass, so this is safe to run on texts
    loaded from an already-validated stats table.
    """
    if len(addresses) == 0:
        return np.zeros(0, np.float64)
    codes = codes_matrix(addresses, validate=False)
    return _kernels.entropy_rows(codes)


def dump_matrix(path, matrix: np.ndarray) -> None:
    """Write a feature matrix as magic, row count, width, then uint16 LE values."""
    arr = np.ascontiguousarray(matrix, dtype="<u2")
    if arr.ndim != 2:
        raise ValueError("feature matrix must be 2-dimensional")
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<QQ", arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes())


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _DUMP_MAGIC:
            raise ValueError(f"not a feature-matrix dump: bad magic {magic!r}")
        rows, width = struct.unpack("<QQ", fh.read(16))
        raw = fh.read()
    if len(raw) % 2:
        raise ValueError(f"truncated dump: {len(raw)} data bytes, not a whole value count")
    data = np.frombuffer(raw, dtype="<u2")
    if data.size != rows * width:
        raise ValueError(f"truncated dump: {data.size} values for {rows}x{width}")
    return data.reshape(rows, width)
