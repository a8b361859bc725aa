"""Deterministic sampling built on splitmix64.

splitmix64 is a published, portable 64-bit generator; the implementation here
is frozen by test vectors (seed 0 -> e220a8397b1dcdaf, ...) so that seeded
sampling is identical across platforms and Python versions. The stdlib
Mersenne generator is deliberately avoided to keep the byte-level outputs
pinned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, TypeVar

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """splitmix64 PRNG; state advances by the golden-gamma constant."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            value = self.next_u64()
            if value <= limit:
                return value % n

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)


def fnv1a64(text: str) -> int:
    """FNV-1a hash; stable string-to-seed mapping independent of PYTHONHASHSEED."""
    value = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        value ^= byte
        value = (value * 0x100000001B3) & _MASK64
    return value


def derive_seed(base: int, *labels: str) -> int:
    """Mix a base seed with string labels into an independent stream seed."""
    value = base & _MASK64
    for label in labels:
        value = SplitMix64(value ^ fnv1a64(label)).next_u64()
    return value


def sample_instances(items: Sequence[T], cap: int, rng: SplitMix64) -> list[T]:
    """At most ``cap`` items, sampled without replacement, original order kept."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    n = len(items)
    if n <= cap:
        return list(items)
    indices = list(range(n))
    for i in range(cap):
        j = i + rng.randrange(n - i)
        indices[i], indices[j] = indices[j], indices[i]
    return [items[k] for k in sorted(indices[:cap])]


@dataclass(frozen=True)
class SuiteManifest:
    """Category name -> ordered instance identifiers."""

    categories: Mapping[str, tuple[str, ...]]

    @classmethod
    def from_dict(cls, data: Mapping) -> "SuiteManifest":
        """Accepts either explicit id lists or bare instance counts per category."""
        raw = data.get("categories", data)
        categories: dict[str, tuple[str, ...]] = {}
        for name, value in raw.items():
            if isinstance(value, int):
                width = max(4, len(str(value)))
                categories[name] = tuple(f"{name}/{i:0{width}d}" for i in range(1, value + 1))
            else:
                categories[name] = tuple(str(v) for v in value)
        return cls(categories)


def sample_suite(manifest: SuiteManifest, cap: int = 50, seed: int = 42) -> list[str]:
    """Per-category seeded sample: everything if the category fits the cap.

    Each category draws from its own derived stream, so adding a category
    never disturbs the sample of another.
    """
    if not manifest.categories:
        raise ValueError("manifest has no categories")
    out: list[str] = []
    for category, ids in manifest.categories.items():
        if not ids:
            logger.warning("category %r is empty", category)
            continue
        rng = SplitMix64(derive_seed(seed, category))
        out.extend(sample_instances(ids, cap, rng))
    return out
