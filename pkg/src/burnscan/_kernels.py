"""Hot numeric kernels with a compiled fast path and a numpy fallback.

The candidate-pool sweep encodes and screens millions of addresses per
round, so the per-address inner loops live here. When numba is importable
the loops are compiled; setting BURNSCAN_DISABLE_NUMBA=1 forces the
vectorized numpy implementations instead. Both paths produce identical
integer output and entropy values equal within float rounding; the
benchmark under benchmarks/ times and cross-checks them.

Code-point matrices use the convention: int16, one row per address, right
padded with -1 past the end of the text.
"""

import os

import numpy as np

ALPHABET_SIZE = 60
MAX_ADDRESS_LEN = 62
FEATURE_WIDTH = ALPHABET_SIZE + MAX_ADDRESS_LEN * ALPHABET_SIZE

DISABLE_ENV = "BURNSCAN_DISABLE_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


try:
    if _numba_disabled():
        raise ImportError(f"compiled kernels disabled via {DISABLE_ENV}")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    njit = None
    NUMBA_AVAILABLE = False


def fill_feature_rows_numpy(codes, out):
    """Scatter counts and positional one-hots for all rows at once.

    out[r, c] accumulates how often symbol c occurs in row r; the slot at
    60 + i*60 + c is set when position i holds symbol c.
    """
    n, max_len = codes.shape
    valid = codes >= 0
    rows = np.broadcast_to(np.arange(n)[:, None], codes.shape)[valid]
    pos = np.broadcast_to(np.arange(max_len)[None, :], codes.shape)[valid]
    cols = codes[valid].astype(np.int64)
    np.add.at(out, (rows, cols), 1)
    out[rows, ALPHABET_SIZE + pos * ALPHABET_SIZE + cols] = 1
    return out


def entropy_rows_numpy(codes):
    """Per-row Shannon entropy in bits per character."""
    n, _ = codes.shape
    valid = codes >= 0
    lengths = valid.sum(axis=1)
    counts = np.zeros((n, ALPHABET_SIZE), np.int64)
    rows = np.broadcast_to(np.arange(n)[:, None], codes.shape)[valid]
    np.add.at(counts, (rows, codes[valid].astype(np.int64)), 1)
    safe_len = np.maximum(lengths, 1)
    p = counts / safe_len[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, p * np.log2(np.where(counts > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=1)


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def fill_feature_rows_numba(codes, out):  # pragma: no cover - compiled
        n = codes.shape[0]
        max_len = codes.shape[1]
        for r in range(n):
            for i in range(max_len):
                c = codes[r, i]
                if c < 0:
                    break
                out[r, c] += 1
                out[r, ALPHABET_SIZE + i * ALPHABET_SIZE + c] = 1
        return out

    @njit(cache=True)
    def entropy_rows_numba(codes):  # pragma: no cover - compiled
        n = codes.shape[0]
        max_len = codes.shape[1]
        out = np.zeros(n, np.float64)
        counts = np.zeros(ALPHABET_SIZE, np.int64)
        for r in range(n):
            length = 0
            for i in range(max_len):
                c = codes[r, i]
                if c < 0:
                    break
                counts[c] += 1
                length += 1
            h = 0.0
            if length > 0:
                for j in range(ALPHABET_SIZE):
                    cj = counts[j]
                    if cj > 0:
                        p = cj / length
                        h -= p * np.log2(p)
                        counts[j] = 0
            out[r] = h
        return out

    fill_feature_rows = fill_feature_rows_numba
    entropy_rows = entropy_rows_numba
else:
    fill_feature_rows_numba = None
    entropy_rows_numba = None
    fill_feature_rows = fill_feature_rows_numpy
    entropy_rows = entropy_rows_numpy


def warmup():
    """Trigger compilation once so first real use is not billed for it."""
    codes = np.full((2, MAX_ADDRESS_LEN), -1, np.int16)
    codes[0, :3] = (0, 1, 0)
    fill_feature_rows(codes, np.zeros((2, FEATURE_WIDTH), np.uint8))
    entropy_rows(codes)


def kernel_status() -> dict:
    """Which implementation is active and why; handy for logs and the CLI."""
    return {
        "numba_available": NUMBA_AVAILABLE,
        "disabled_by_env": _numba_disabled(),
        "active": "numba" if NUMBA_AVAILABLE else "numpy",
    }
