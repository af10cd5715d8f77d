"""Deterministic RNG derivation from composite keys.

random.Random seeded with a str hashes it with sha512, which is stable
across processes and interpreter versions, unlike tuple seeding (hash
based, deprecated).  Benchmark and validation runs must derive identical
generators for the same key, so every composite-seed construction goes
through here.
"""

from __future__ import annotations

import random


def derive_rng(*parts) -> random.Random:
    """A Random whose stream depends only on the given parts."""
    return random.Random(repr(parts))
