"""Seeded edge identifiers and the pairwise-independent sampling family."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import IndexOutOfRange

PRIME = (1 << 61) - 1


@dataclass(frozen=True)
class SeedPair:
    seed_id: int
    seed_h: int


def ceil_log2(x: int) -> int:
    return max(0, (x - 1).bit_length())


def floor_log2(x: int) -> int:
    return max(0, x.bit_length() - 1)


def uid_bits(n: int) -> int:
    return 4 * ceil_log2(max(n, 2)) + 32


def default_units(n: int) -> int:
    return max(32, 2 * ceil_log2(max(n, 2)))


def derive_uid(seed_id: int, id_u: int, id_v: int, bits: int) -> int:
    """Keyed pseudo-random ``bits``-bit identifier of the edge {id_u, id_v}."""
    if id_u > id_v:
        id_u, id_v = id_v, id_u
    if not 1 <= bits <= 512:
        raise ValueError("uid width must be in 1..512 bits")
    h = hashlib.blake2b(
        id_u.to_bytes(8, "little") + id_v.to_bytes(8, "little"),
        key=(seed_id % (1 << 128)).to_bytes(16, "little"),
        digest_size=(bits + 7) // 8,
    )
    return int.from_bytes(h.digest(), "little") & ((1 << bits) - 1)


def digest_tag(*parts) -> int:
    """Short digest binding labels to one scheme instance."""
    h = hashlib.blake2b(repr(parts).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def edge_key(id_u: int, id_v: int, n: int) -> int:
    if id_u > id_v:
        id_u, id_v = id_v, id_u
    return id_u * (n + 1) + id_v


class HashFamily:
    """``L`` affine hashes ``x -> ((a x + b) mod p) mod 2**r`` with ``r = ceil(log m)``.

    Edge ``e`` belongs to level ``j`` of unit ``i`` iff ``h_i(e) < 2**(r - j)``,
    for ``j`` in ``0..floor(log m)``.  Levels are nested, so membership is
    summarised by the top level ``J_i(e)``.
    """

    def __init__(self, seed_h: int, units: int, m: int):
        self.seed_h = seed_h
        self.units = units
        self.m = m
        self.r = ceil_log2(max(m, 1))
        self.levels = floor_log2(max(m, 1)) + 1
        rng = random.Random(seed_h)
        self.coeffs = [(rng.randrange(1, PRIME), rng.randrange(PRIME)) for _ in range(units)]
        self._mask = (1 << self.r) - 1

    def h(self, i: int, key: int) -> int:
        a, b = self.coeffs[i]
        return ((a * key + b) % PRIME) & self._mask

    def top_level(self, i: int, key: int) -> int:
        """Largest level containing the key in unit ``i`` (0-based unit)."""
        return min(self.levels - 1, self.r - self.h(i, key).bit_length())

    def top_levels(self, key: int) -> list[int]:
        top = self.levels - 1
        r = self.r
        mask = self._mask
        out = []
        for a, b in self.coeffs:
            t = r - (((a * key + b) % PRIME) & mask).bit_length()
            out.append(t if t < top else top)
        return out

    def member(self, i: int, j: int, key: int) -> bool:
        return self.h(i, key) < (1 << (self.r - j))


@lru_cache(maxsize=256)
def hash_family(seed_h: int, units: int, m: int) -> HashFamily:
    return HashFamily(seed_h, units, m)


def edge_membership(family: HashFamily, i: int, j: int, id_u: int, id_v: int, n: int) -> bool:
    """Whether edge {id_u, id_v} is sampled into level ``j`` of unit ``i`` (1-based)."""
    if not 1 <= i <= family.units:
        raise IndexOutOfRange(f"unit {i} outside 1..{family.units}")
    if not 0 <= j < family.levels:
        raise IndexOutOfRange(f"level {j} outside 0..{family.levels - 1}")
    return family.member(i - 1, j, edge_key(id_u, id_v, n))
