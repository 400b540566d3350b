"""Bit strings and seeded random streams.

A ``BitString`` packs its bits into a Python ``int``: position ``i`` (1-based,
left to right in the textual form) is stored at bit ``i - 1`` of ``value``.

Random streams
--------------
``RngStream(seed, stream_id)`` derives a 64-bit state by running both inputs
through the SplitMix64 finalizer::

    state = splitmix64(seed ^ splitmix64(stream_id + 0x9E3779B97F4A7C15))

That state seeds a ``random.Random`` (cheap scalar draws used by the bit-level
operators) and, lazily, a ``numpy.random.Generator`` on ``PCG64`` (vectorised
batch draws).  The same ``(seed, stream_id)`` always yields the same sequence
within this implementation.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word."""
    z = (z + GOLDEN64) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, stream_id: int) -> int:
    return splitmix64((seed & MASK64) ^ splitmix64((stream_id + GOLDEN64) & MASK64))


class RngStream:
    """Deterministic random source owned by a single run."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = seed & MASK64
        self.stream_id = stream_id
        self.state = mix_seed(seed, stream_id)
        self.py = random.Random(self.state)
        self._np: np.random.Generator | None = None

    @property
    def np(self) -> np.random.Generator:
        if self._np is None:
            self._np = np.random.Generator(np.random.PCG64(self.state))
        return self._np

    def spawn(self, stream_id: int) -> "RngStream":
        return RngStream(self.state, stream_id)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True, slots=True)
class BitString:
    n: int
    value: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("bit string length must be positive")
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        value = 0
        for i, c in enumerate(text):
            if c == "1":
                value |= 1 << i
        return cls(len(text), value)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b:
                value |= 1 << i
        return cls(len(bits), value)

    def to_str(self) -> str:
        return "".join("1" if self.value >> i & 1 else "0" for i in range(self.n))

    def bits(self) -> list[int]:
        return [self.value >> i & 1 for i in range(self.n)]

    def __str__(self) -> str:
        return self.to_str()

    def __len__(self) -> int:
        return self.n


def full_mask(n: int) -> int:
    return (1 << n) - 1


def set_positions(mask: int) -> list[int]:
    """0-based indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _check_lengths(x: BitString, y: BitString) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")


def weight(x: BitString) -> int:
    """Number of one-bits (the OneMax value)."""
    return x.value.bit_count()


def distance(x: BitString, y: BitString) -> int:
    """Hamming distance."""
    _check_lengths(x, y)
    return (x.value ^ y.value).bit_count()


def xor_combine(x: BitString, y: BitString) -> BitString:
    _check_lengths(x, y)
    return BitString(x.n, x.value ^ y.value)


def complement_bits(x: BitString) -> BitString:
    return BitString(x.n, x.value ^ full_mask(x.n))


def random_bits(rng: RngStream, n: int) -> BitString:
    if n < 1:
        raise ValueError("n must be positive")
    return BitString(n, rng.py.getrandbits(n))
