"""splitmix64, so sampled inputs depend on the seed alone."""
from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def __iter__(self):
        while True:
            yield self.next()

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise ValueError("upper bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct integers from ``[0, n)`` (partial Fisher-Yates), in draw order."""
        if not 0 <= k <= n:
            raise ValueError("sample size out of range")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(n - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out


def seeded_generator(seed: int):
    """Infinite stream of splitmix64 outputs for ``seed``."""
    return iter(SplitMix64(seed))
