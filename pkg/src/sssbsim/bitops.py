"""Packed GF(2) bit-vector helpers shared by the Pauli and tableau code.

Bit layout convention: qubit (or row) index ``i`` lives in word ``i >> 6``
at bit position ``i & 63`` (LSB first).  All packing helpers below preserve
this convention, which matches ``np.unpackbits(..., bitorder="little")`` on
a little-endian uint8 view.
"""

from __future__ import annotations

import numpy as np

WORD_BITS = 64


def n_words(nbits: int) -> int:
    """Number of uint64 words needed for `nbits` logical bits."""
    return (nbits + WORD_BITS - 1) >> 6


def zeros(nbits: int) -> np.ndarray:
    return np.zeros(n_words(nbits), dtype=np.uint64)


def get_bit(words: np.ndarray, i: int) -> int:
    return int((words[..., i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

def set_bit(words: np.ndarray, i: int) -> None:
    words[..., i >> 6] |= np.uint64(1) << np.uint64(i & 63)


def flip_bit(words: np.ndarray, i: int) -> None:
    words[..., i >> 6] ^= np.uint64(1) << np.uint64(i & 63)


def popcount(words: np.ndarray) -> int:
    """Total number of set bits."""
    return int(np.bitwise_count(words).sum())


def parity(words: np.ndarray) -> int:
    return popcount(words) & 1


def to_bool(words: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack the first `nbits` logical bits to a boolean array.

    Works on a single vector or on a 2-D matrix of packed rows (last axis
    is the word axis).
    """
    raw = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return raw[..., :nbits].astype(bool)


def from_bool(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean array (last axis = bit index) into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    nbits = bits.shape[-1]
    nw = n_words(nbits)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    out_shape = bits.shape[:-1] + (nw * 8,)
    out = np.zeros(out_shape, dtype=np.uint8)
    out[..., : packed.shape[-1]] = packed
    return out.view(np.uint64)


def indices(words: np.ndarray, nbits: int) -> np.ndarray:
    """Sorted indices of the set bits among the first `nbits` positions."""
    return np.flatnonzero(to_bool(words, nbits))
