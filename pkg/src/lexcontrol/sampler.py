"""Novel character-sequence sampling.

Two factors are crossed: a length bucket (shorter [7,15) or longer [15,30)
characters) and a character distribution (uniform over a-z, or strict
consonant/vowel alternation starting with a consonant). Outputs are distinct
within a batch, deterministic under the seed, and never collide with the
blocklist (the dataset vocabulary).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LexControlError

__all__ = ["SamplerConfig", "sample_sequences", "LENGTH_BUCKETS", "VOWELS", "CONSONANTS"]

LENGTH_BUCKETS = {"shorter": (7, 15), "longer": (15, 30)}

VOWELS = "aeiou"
CONSONANTS = "bcdfghjklmnpqrstvwxyz"  # 21 letters; y counts as a consonant
ALPHABET = "abcdefghijklmnopqrstuvwxyz"

# Blocklist entries shorter than this only have to match exactly; longer
# entries are also rejected on substring containment in either direction.
_CONTAINMENT_MIN_LEN = 4


@dataclass(frozen=True)
class SamplerConfig:
    length_bucket: str = "shorter"
    distribution: str = "cvcv"
    seed: int = 0
    count: int = 1
    blocklist: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.length_bucket not in LENGTH_BUCKETS:
            raise ValueError(f"unknown length bucket {self.length_bucket!r}")
        if self.distribution not in ("random", "cvcv"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")


def _blocked(candidate: str, exact: set[str], containment: list[str]) -> bool:
    if candidate in exact:
        return True
    for entry in containment:
        if entry in candidate or candidate in entry:
            return True
    return False


def sample_sequences(config: SamplerConfig) -> list[str]:
    """Draw ``config.count`` distinct sequences; deterministic under the seed."""
    lo, hi = LENGTH_BUCKETS[config.length_bucket]
    rng = np.random.default_rng(config.seed)
    exact = {w.lower() for w in config.blocklist}
    containment = sorted(w for w in exact if len(w) >= _CONTAINMENT_MIN_LEN)

    out: list[str] = []
    seen: set[str] = set()
    # Collisions are vanishingly rare at these lengths; the cap guards
    # against a degenerate blocklist rather than normal operation.
    max_attempts = 1000 * config.count + 10_000
    attempts = 0
    while len(out) < config.count:
        attempts += 1
        if attempts > max_attempts:
            raise LexControlError(
                f"could not draw {config.count} distinct sequences "
                f"after {attempts - 1} attempts"
            )
        length = int(rng.integers(lo, hi))
        if config.distribution == "random":
            idx = rng.integers(0, len(ALPHABET), size=length)
            candidate = "".join(ALPHABET[i] for i in idx)
        else:
            chars = []
            for i in range(length):
                pool = CONSONANTS if i % 2 == 0 else VOWELS
                chars.append(pool[int(rng.integers(0, len(pool)))])
            candidate = "".join(chars)
        if candidate in seen or _blocked(candidate, exact, containment):
            continue
        seen.add(candidate)
        out.append(candidate)
    return out
