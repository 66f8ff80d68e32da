"""Portable seeded random streams (SplitMix64).

Every stochastic step in the package (fold shuffling, bootstrap draws,
per-node feature sampling) draws from this generator, so a seed gives the
same folds and the same forests on any platform. The tree builder carries a
jit-compiled copy of the same recurrences; ``tests/test_rng.py`` checks they
agree.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection of the short tail."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates, high index first."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def permutation(self, n: int) -> list[int]:
        return self.shuffle(list(range(n)))


def derive_seeds(master: int, count: int) -> list[int]:
    """Independent child seeds, one per ensemble member, in member order."""
    gen = SplitMix64(master)
    return [gen.next_u64() for _ in range(count)]
