"""SplitMix64, the seeded generator behind every sampled mode.

state += 0x9E3779B97F4A7C15; z = state
z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
z = (z ^ (z >> 27)) * 0x94D049BB133111EB
return z ^ (z >> 31)
all arithmetic mod 2^64.  ``below(n)`` draws ceil(bitlen(n)/64)+1 words,
concatenates them little-endian and reduces mod n.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n < 1:
            raise ValueError("n must be positive")
        words = (n.bit_length() + 63) // 64 + 1
        acc = 0
        for i in range(words):
            acc |= self.next64() << (64 * i)
        return acc % n

    def choice_digits(self, k: int, p: int) -> list[int]:
        x = self.below(p**k)
        out = []
        for _ in range(k):
            x, d = divmod(x, p)
            out.append(d)
        return out
