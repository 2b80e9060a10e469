"""Small numeric helpers shared across modules."""

import math


def round_half_away(x: float) -> int:
    """Round to the nearest integer, ties away from zero (312.5 -> 313).

    Python's built-in round() ties to even, which disagrees with the
    firmware-style rounding the counter arithmetic and bin indexing rely on.
    """
    if x >= 0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (n >= 1)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return 1 << (int(n) - 1).bit_length()
