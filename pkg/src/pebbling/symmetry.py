"""Automorphism groups, vertex orbits, and support-class representatives.

The group is found by backtracking over a color-refinement partition, so
product graphs are handled directly without assuming anything about how
their groups factor.  Subset classes under the root stabilizer use a
canonical form (lexicographically minimal image) computed either plainly
or via a packed-integer vectorized sweep when the subset space is large.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphs import Graph

MATERIALIZE_LIMIT = 1_000_000
_HASH_MIX = np.uint64(0x9E3779B97F4A7C15)


@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.image[v]

    def apply_set(self, vs) -> tuple[int, ...]:
        return tuple(sorted(self.image[v] for v in vs))


@dataclass
class AutGroup:
    generators: list[Permutation]
    order: int
    elements: list[Permutation]


@dataclass
class SupportClasses:
    root: int
    k: int
    reps: list[tuple[int, ...]]
    class_count: int


def _refine_colors(g: Graph, colors: list[int]) -> list[int]:
    """Iterate (color, sorted neighbor-color multiset) until stable."""
    while True:
        sig = [
            (colors[v], tuple(sorted(colors[w] for w in g.adjacency[v])))
            for v in range(g.n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        fresh = [rank[s] for s in sig]
        if fresh == colors:
            return colors
        colors = fresh


def automorphisms(g: Graph) -> AutGroup:
    """All adjacency-preserving vertex bijections, with exact order."""
    n = g.n
    colors = _refine_colors(g, [g.degree(v) for v in range(n)])
    cells: dict[int, list[int]] = {}
    for v in range(n):
        cells.setdefault(colors[v], []).append(v)
    # map vertices in BFS order from the tightest cell so edges constrain early
    start = min(cells.values(), key=len)[0]
    order_of_visit = []
    seen = [False] * n
    queue = [start]
    seen[start] = True
    while queue:
        u = queue.pop(0)
        order_of_visit.append(u)
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    for v in range(n):  # disconnected never happens, but stay total
        if not seen[v]:
            order_of_visit.append(v)

    adjacency_sets = [set(ns) for ns in g.adjacency]
    found: list[Permutation] = []
    image = [-1] * n
    used = [False] * n

    def extend(pos: int):
        if pos == n:
            found.append(Permutation(tuple(image)))
            if len(found) > MATERIALIZE_LIMIT:
                raise ValueError("automorphism group exceeds materialization limit")
            return
        u = order_of_visit[pos]
        for w in cells[colors[u]]:
            if used[w]:
                continue
            ok = True
            for prev in order_of_visit[:pos]:
                if (prev in adjacency_sets[u]) != (image[prev] in adjacency_sets[w]):
                    ok = False
                    break
            if ok:
                image[u] = w
                used[w] = True
                extend(pos + 1)
                used[w] = False
                image[u] = -1

    extend(0)
    generators = _reduce_generators(found) if len(found) <= 5000 else list(found)
    return AutGroup(generators=generators, order=len(found), elements=found)


def _reduce_generators(elements: list[Permutation]) -> list[Permutation]:
    n = len(elements[0].image)
    identity = tuple(range(n))
    closure = {identity}
    generators: list[Permutation] = []
    for p in elements:
        if p.image in closure:
            continue
        generators.append(p)
        frontier = list(closure) + [p.image]
        closure.add(p.image)
        while frontier:
            a = frontier.pop()
            for q in generators:
                composed = tuple(a[q.image[i]] for i in range(n))
                if composed not in closure:
                    closure.add(composed)
                    frontier.append(composed)
    return generators or [Permutation(identity)]


def vertex_orbits(g: Graph, group: AutGroup | None = None) -> list[tuple[int, ...]]:
    """Orbits of the automorphism action, each sorted, listed by minimum member."""
    group = group or automorphisms(g)
    parent = list(range(g.n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for p in group.generators:
        for v in range(g.n):
            a, b = find(v), find(p.image[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    buckets: dict[int, list[int]] = {}
    for v in range(g.n):
        buckets.setdefault(find(v), []).append(v)
    return [tuple(sorted(vs)) for _, vs in sorted(buckets.items())]


def orbit_representatives(g: Graph, group: AutGroup | None = None) -> list[int]:
    return [orbit[0] for orbit in vertex_orbits(g, group)]


def stabilizer(group: AutGroup, r: int) -> list[Permutation]:
    return [p for p in group.elements if p.image[r] == r]


def _scrambled_order(masks: np.ndarray) -> np.ndarray:
    """Deterministic decorrelated ordering of subset bitmasks."""
    return np.argsort(masks * _HASH_MIX, kind="stable")


def support_class_reps(
    g: Graph, r: int, k: int, group: AutGroup | None = None
) -> SupportClasses:
    """Representatives of k-subsets of V minus the root, up to the root stabilizer.

    The canonical form of a subset is the lexicographically minimal sorted
    image over the stabilizer; representatives are those forms.  They are
    emitted in a fixed pseudorandom order, which keeps downstream greedy
    covering close to arbitrary-order behavior.
    """
    if not 1 <= k <= g.n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}")
    group = group or automorphisms(g)
    stab = stabilizer(group, r)
    others = [v for v in range(g.n) if v != r]
    total = _comb(len(others), k)
    if g.n <= 64 and k <= 10 and total * len(stab) > 2_000_000:
        reps = _class_reps_vectorized(g.n, stab, others, k)
    else:
        reps = _class_reps_plain(stab, others, k)
    if g.n <= 64:
        masks = np.array(
            [np.uint64(sum(1 << v for v in rep)) for rep in reps], dtype=np.uint64
        )
        reps = [reps[i] for i in _scrambled_order(masks)]
    return SupportClasses(root=r, k=k, reps=reps, class_count=len(reps))


def subset_orbit_reps(g: Graph, k: int, group: AutGroup | None = None) -> list[tuple[int, ...]]:
    """Representatives of k-subsets of V under the full automorphism group."""
    group = group or automorphisms(g)
    reps = []
    for sub in combinations(range(g.n), k):
        canon = min(p.apply_set(sub) for p in group.elements)
        if canon == sub:
            reps.append(sub)
    return reps


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def _class_reps_plain(stab, others, k) -> list[tuple[int, ...]]:
    reps = []
    for sub in combinations(others, k):
        canon = min(p.apply_set(sub) for p in stab)
        if canon == sub:
            reps.append(sub)
    return reps


def _class_reps_vectorized(n, stab, others, k) -> list[tuple[int, ...]]:
    """Packed-integer minimum over stabilizer images, chunked over subsets."""
    shifts = np.array([6 * (k - 1 - i) for i in range(k)], dtype=np.uint64)
    subs = np.fromiter(
        (v for sub in combinations(others, k) for v in sub), dtype=np.int64
    ).reshape(-1, k)
    canon = None
    for p in stab:
        img = np.array(p.image, dtype=np.int64)
        rows = np.sort(img[subs], axis=1).astype(np.uint64)
        packed = (rows << shifts).sum(axis=1)
        canon = packed if canon is None else np.minimum(canon, packed)
    unique = np.unique(canon)
    out = []
    mask = np.uint64(0x3F)
    for value in unique:
        vs = tuple(int((value >> np.uint64(6 * (k - 1 - i))) & mask) for i in range(k))
        out.append(vs)
    return out
