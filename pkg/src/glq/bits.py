"""Fixed-length packed bit strings.

Bit 0 is the leftmost symbol of the written string and the most significant
bit of the integer value, so ``BitString.from_str("10")`` has integer value 2.
The same convention orders qubits and statevector indices (see statevector).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True, order=True)
class BitString:
    """An immutable string of ``n`` bits packed into an integer."""

    n: int
    value: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"bit string length must be >= 1, got {self.n}")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(
                f"value {self.value} does not fit in {self.n} bits"
            )

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {s!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        bits = list(bits)
        v = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {b}")
            v = (v << 1) | b
        return cls(len(bits), v)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, j: int) -> "BitString":
        """e_j: the string with a single 1 at position j."""
        if not 0 <= j < n:
            raise ValueError(f"position {j} out of range for {n} bits")
        return cls(n, 1 << (n - 1 - j))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitString":
        if n < 1:
            raise ValueError(f"bit string length must be >= 1, got {n}")
        v = 0
        for _ in range(0, n, 32):
            v = (v << 32) | int(rng.integers(0, 1 << 32))
        return cls(n, v & ((1 << n) - 1))

    @classmethod
    def from_hex(cls, n: int, h: str) -> "BitString":
        v = int(h, 16)
        return cls(n, v)

    def hex(self) -> str:
        """Most-significant-first hex, zero padded to ceil(n/4) digits."""
        return format(self.value, f"0{(self.n + 3) // 4}x")

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"bit index {i} out of range for {self.n} bits")
        return (self.value >> (self.n - 1 - i)) & 1

    def __iter__(self) -> Iterator[int]:
        return (self[i] for i in range(self.n))

    def __xor__(self, other: "BitString") -> "BitString":
        self._check_len(other)
        return BitString(self.n, self.value ^ other.value)

    def dot(self, other: "BitString") -> int:
        """Inner product modulo two."""
        self._check_len(other)
        return (self.value & other.value).bit_count() & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def __repr__(self) -> str:
        return f"BitString({str(self)!r})"

    def _check_len(self, other: "BitString") -> None:
        if not isinstance(other, BitString):
            raise TypeError(f"expected BitString, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
