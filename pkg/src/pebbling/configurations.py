"""Pebbling configurations: pebble counts per vertex, moves, and the weight bound."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .graphs import Arc, DistanceTable, Graph

MAX_SIZE = 1 << 16  # configurations beyond this are outside the artifact's scope


class Configuration:
    """Immutable map vertex -> non-negative pebble count, stored densely."""

    __slots__ = ("counts",)

    def __init__(self, counts: Iterable[int]):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError("negative pebble count")
        if sum(counts) > MAX_SIZE:
            raise ValueError(f"configuration size exceeds {MAX_SIZE}")
        object.__setattr__(self, "counts", counts)

    def __setattr__(self, *_):
        raise AttributeError("Configuration is immutable")

    @classmethod
    def from_map(cls, n: int, placed: Mapping[int, int]) -> "Configuration":
        counts = [0] * n
        for v, c in placed.items():
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} out of range")
            counts[v] = c
        return cls(counts)

    def __getitem__(self, v: int) -> int:
        return self.counts[v]

    def __len__(self):
        return len(self.counts)

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.counts == other.counts

    def __hash__(self):
        return hash(self.counts)

    def size(self) -> int:
        return sum(self.counts)

    def support(self) -> frozenset[int]:
        return frozenset(v for v, c in enumerate(self.counts) if c > 0)

    def to_map(self) -> dict[int, int]:
        return {v: c for v, c in enumerate(self.counts) if c > 0}

    def __repr__(self):
        return f"Configuration({self.to_map()})"


def apply_move(p: Configuration, a: Arc) -> Configuration:
    """Remove two pebbles at a.tail, place one at a.head; size drops by exactly 1."""
    if p[a.tail] < 2:
        raise ValueError(f"need 2 pebbles at vertex {a.tail}, have {p[a.tail]}")
    counts = list(p.counts)
    counts[a.tail] -= 2
    counts[a.head] += 1
    return Configuration(counts)


def scaled_weight(p: Configuration, r: int, d: DistanceTable) -> tuple[int, int]:
    """Return (sum_v p(v) * 2^(ecc - dist(v,r)), 2^ecc): exact integers, no rounding."""
    row = d[r]
    ecc = max(row)
    scaled = sum(c << (ecc - row[v]) for v, c in enumerate(p.counts) if c)
    return scaled, 1 << ecc


def weight(p: Configuration, r: int, d: DistanceTable) -> Fraction:
    """Exact Σ_v p(v) * 2^(-dist(v,r)); values below 1 certify r-unsolvability."""
    scaled, scale = scaled_weight(p, r, d)
    return Fraction(scaled, scale)


def parse_config_literal(text: str, g: Graph) -> Configuration:
    """Parse `v:k[,v:k]*`, e.g. `0:4,3:2`; repeated vertices are an error."""
    placed: dict[int, int] = {}
    for field in text.split(","):
        field = field.strip()
        if not field:
            continue
        v_raw, sep, k_raw = field.partition(":")
        if not sep:
            raise ValueError(f"bad configuration field {field!r}, want v:k")
        v, k = int(v_raw), int(k_raw)
        if v in placed:
            raise ValueError(f"vertex {v} repeated in configuration literal")
        if k < 0:
            raise ValueError(f"negative count for vertex {v}")
        placed[v] = k
    return Configuration.from_map(g.n, placed)


def format_config(p: Configuration) -> str:
    return ",".join(f"{v}:{c}" for v, c in sorted(p.to_map().items())) or "empty"
