"""Text <-> bit-vector conversion and the character error metric.

Messages are Latin-1 strings; every character occupies 8 bits, most
significant bit first, so a length-L string maps to a 0/1 vector of
length 8*L.
"""

from __future__ import annotations

import numpy as np

from .errors import CharacterOutOfRange, LengthNotMultipleOfEight

BITS_PER_CHAR = 8


def string_to_bits(text: str) -> np.ndarray:
    """Return the binary vector encoding ``text``, 8 bits per character.

    Raises CharacterOutOfRange if any character's code exceeds 255.
    """
    try:
        raw = text.encode("latin-1")
    except UnicodeEncodeError as exc:
        raise CharacterOutOfRange(
            f"character {exc.object[exc.start]!r} has no single-byte code"
        ) from exc
    if not raw:
        return np.zeros(0, dtype=np.float64)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    return bits.astype(np.float64)


def bits_to_string(bits) -> str:
    """Inverse of :func:`string_to_bits`.

    Accepts any sequence of 0/1 values whose length is a multiple of 8.
    """
    arr = np.asarray(bits)
    if arr.size % BITS_PER_CHAR != 0:
        raise LengthNotMultipleOfEight(
            f"bit vector of length {arr.size} is not a multiple of 8"
        )
    if arr.size == 0:
        return ""
    codes = np.packbits(arr.astype(np.uint8))
    return codes.tobytes().decode("latin-1")


def char_distance(a: str, b: str) -> int:
    """Number of positional character mismatches plus the length difference."""
    mismatches = sum(1 for x, y in zip(a, b) if x != y)
    return mismatches + abs(len(a) - len(b))
