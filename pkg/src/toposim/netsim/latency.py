from __future__ import annotations

import hashlib
import random


class LatencyModel:
    """Per-directed-link delays, fixed (lo == hi) or uniform on [lo, hi] seconds.

    Each link owns a generator seeded from (seed, a, b), so the n-th sample on
    a link depends only on those three values and n.
    """

    def __init__(self, lo: float = 0.010, hi: float = 0.200, seed: int = 0):
        if lo <= 0 or hi < lo:
            raise ValueError(f"need 0 < lo <= hi, got lo={lo} hi={hi}")
        self.lo, self.hi, self.seed = lo, hi, seed
        self._rngs: dict[tuple[str, str], random.Random] = {}

    @classmethod
    def fixed(cls, delay: float, seed: int = 0) -> "LatencyModel":
        return cls(delay, delay, seed)

    @property
    def is_fixed(self) -> bool:
        return self.lo == self.hi

    def link_rng(self, a: str, b: str) -> random.Random:
        key = (a, b)
        rng = self._rngs.get(key)
        if rng is None:
            digest = hashlib.blake2b(f"{self.seed}|{a}|{b}".encode(), digest_size=8).digest()
            rng = self._rngs[key] = random.Random(int.from_bytes(digest, "big"))
        return rng

    def sample(self, a: str, b: str) -> float:
        if self.lo == self.hi:
            return self.lo
        return self.link_rng(a, b).uniform(self.lo, self.hi)
