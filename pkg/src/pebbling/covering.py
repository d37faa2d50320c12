"""Greedy covering designs over support-class families.

greedy_cover grows each cover set by absorbing family members in the given
iteration order while the union stays within capacity, then drops every
covered member.  A packed-bitmask fast path handles product-scale families;
it computes the identical design (growth can only shrink the set of
absorbable members, so a forward scan reproduces the plain pass).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class CoveringDesign:
    root: int
    capacity: int
    sets: list[tuple[int, ...]]


def greedy_cover(family, c: int, root: int = -1) -> CoveringDesign:
    """Cover all members of `family` (k-subsets, fixed order) by sets of size <= c."""
    members = [tuple(sorted(t)) for t in family]
    if not members:
        return CoveringDesign(root=root, capacity=c, sets=[])
    k = len(members[0])
    if any(len(t) != k for t in members):
        raise ValueError("family members must share one size k")
    if c < k:
        raise ValueError(f"capacity {c} below member size {k}")
    top = max(v for t in members for v in t)
    if top < 64 and len(members) > 2000:
        sets = _greedy_masks(members, c)
    else:
        sets = _greedy_plain(members, c)
    return CoveringDesign(root=root, capacity=c, sets=sets)


def _greedy_plain(members, c) -> list[tuple[int, ...]]:
    live = [frozenset(t) for t in members]
    out = []
    while live:
        grown: frozenset = frozenset()
        for t in live:
            if len(grown | t) <= c:
                grown = grown | t
        live = [t for t in live if not t <= grown]
        out.append(tuple(sorted(grown)))
    return out


def _greedy_masks(members, c) -> list[tuple[int, ...]]:
    masks = np.array(
        [np.uint64(sum(1 << v for v in t)) for t in members], dtype=np.uint64
    )
    cap = np.uint64(c)
    out = []
    while masks.size:
        grown = np.uint64(0)
        cursor = 0
        while cursor < masks.size:
            gain = np.bitwise_count(masks[cursor:] & ~grown)
            fits = (gain >= 1) & (
                np.bitwise_count(masks[cursor:] | grown) <= cap
            )
            hits = np.flatnonzero(fits)
            if hits.size == 0:
                break
            index = cursor + int(hits[0])
            grown |= masks[index]
            cursor = index + 1
        out.append(grown)
        masks = masks[np.bitwise_count(masks & ~grown) != 0]
    return [_mask_to_tuple(m) for m in out]


def _mask_to_tuple(mask) -> tuple[int, ...]:
    mask = int(mask)
    vs = []
    while mask:
        low = mask & -mask
        vs.append(low.bit_length() - 1)
        mask ^= low
    return tuple(vs)


def validate_cover(design: CoveringDesign, family) -> bool:
    """Check sizes <= capacity, root exclusion, and that every member is covered."""
    sets = [frozenset(s) for s in design.sets]
    for s in sets:
        if len(s) > design.capacity:
            return False
        if design.root >= 0 and design.root in s:
            return False
    family = list(family)
    top = max((v for t in family for v in t), default=0)
    if top < 64 and len(family) * len(sets) > 1_000_000:
        return _validate_masks(sets, family)
    for t in family:
        member = frozenset(t)
        if not any(member <= s for s in sets):
            return False
    return True


def _validate_masks(sets, family) -> bool:
    members = np.array(
        [np.uint64(sum(1 << v for v in t)) for t in family], dtype=np.uint64
    )
    uncovered = np.ones(members.size, dtype=bool)
    for s in sets:
        mask = ~np.uint64(sum(1 << v for v in s))
        idx = np.flatnonzero(uncovered)
        if idx.size == 0:
            return True
        uncovered[idx] = (members[idx] & mask) != 0
    return not uncovered.any()
