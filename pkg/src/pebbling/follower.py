"""Lower-level engine: maximum pebbles deliverable to a root, with certificates.

The engine answers "can this configuration move t pebbles onto r" exactly.
Moves out of r are never taken and delivered counts are arrivals at r only,
matching the root-sink constraint of the flow formulation it implements.

Layered decision procedure, sound at every layer:
  1. arithmetic accepts (single-source floors and their sums),
  2. greedy collapse and stack-merge accepts (constructive move witnesses),
  3. node-capped search over distance-decreasing moves,
  4. exhaustive depth-first search over all weight-feasible moves, with
     memoization on residual configurations.
Layers 1-3 only ever claim "solvable"; layer 4 is complete.
"""

from __future__ import annotations

import sys
import time
from collections import Counter, deque
from dataclasses import dataclass, field

from .configurations import Configuration, scaled_weight
from .graphs import Arc, Graph

DEAD_SET_LIMIT = 2_000_000  # memo entries per engine before reset; bounds memory
RESTRICTED_DFS_BUDGET = 20_000


class OracleBudgetError(RuntimeError):
    """bfs_oracle exceeded its configuration budget (test-only signal)."""


@dataclass
class FlowVector:
    """Non-negative integer flow per arc; the z variables of the program."""

    z: dict[Arc, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(v < 0 for v in self.z.values()):
            raise ValueError("negative arc flow")
        self.z = {a: v for a, v in self.z.items() if v > 0}

    def inflow(self, v: int) -> int:
        return sum(val for a, val in self.z.items() if a.head == v)

    def outflow(self, v: int) -> int:
        return sum(val for a, val in self.z.items() if a.tail == v)

    def total(self) -> int:
        return sum(self.z.values())


@dataclass
class MoveMultigraph:
    """Directed multigraph of moves; multiplicity of arc a equals z_a."""

    n: int
    multiplicity: Counter

    @classmethod
    def from_flow(cls, g: Graph, z: FlowVector) -> "MoveMultigraph":
        return cls(g.n, Counter(z.z))

    @classmethod
    def from_arcs(cls, n: int, arcs_seq) -> "MoveMultigraph":
        return cls(n, Counter(arcs_seq))

    def in_degree(self, v: int) -> int:
        return sum(m for a, m in self.multiplicity.items() if a.head == v)

    def out_degree(self, v: int) -> int:
        return sum(m for a, m in self.multiplicity.items() if a.tail == v)

    def is_acyclic(self) -> bool:
        adj: dict[int, set[int]] = {}
        for a, m in self.multiplicity.items():
            if m > 0:
                adj.setdefault(a.tail, set()).add(a.head)
        state: dict[int, int] = {}  # 0 visiting, 1 done
        for start in list(adj):
            if start in state:
                continue
            stack = [(start, iter(adj.get(start, ())))]
            state[start] = 0
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if nxt not in state:
                        state[nxt] = 0
                        stack.append((nxt, iter(adj.get(nxt, ()))))
                        advanced = True
                        break
                    if state[nxt] == 0:
                        return False
                if not advanced:
                    state[node] = 1
                    stack.pop()
        return True


@dataclass
class DeliveryResult:
    """Optimal delivered count with a realizing flow and move order."""

    delivered: int
    flow: FlowVector
    moves: list[Arc]


class FollowerEngine:
    """Exact solvability and delivery decisions for one (graph, root) pair."""

    def __init__(self, g: Graph, r: int):
        if not 0 <= r < g.n:
            raise ValueError(f"root {r} out of range")
        self.g = g
        self.r = r
        self.n = g.n
        self.D = g.distance_table.dist
        self.d = self.D[r]
        ecc = max(self.d)
        self.wt = [1 << (ecc - dv) for dv in self.d]
        self.scale = 1 << ecc
        # branching order: heads closer to r first, index ascending on ties
        self.moves = [
            sorted(g.adjacency[u], key=lambda w: (self.d[w], w)) for u in range(self.n)
        ]
        self.down_moves = [
            [w for w in self.moves[u] if self.d[w] < self.d[u]] for u in range(self.n)
        ]
        self.calls = 0
        self.dfs_nodes = 0
        self.deadline: float | None = None
        self._dead: dict[int, set] = {}
        self._cache: dict[tuple, bool] = {}

    # ----- cheap sound accepts (True => solvable; False => unknown) -----

    def _accept_floors(self, q, goal) -> bool:
        d = self.d
        return q[self.r] + sum((c >> d[v]) for v, c in enumerate(q) if c and v != self.r) >= goal

    def _accept_collapse(self, q0, goal) -> bool:
        q = list(q0)
        d, r = self.d, self.r
        order = sorted((v for v in range(self.n) if v != r), key=lambda v: -d[v])
        for _ in range(3):
            moved = False
            for v in order:
                if q[v] < 2:
                    continue
                best = None
                for w in self.down_moves[v]:
                    if best is None or q[w] > q[best]:
                        best = w
                if best is None:
                    continue
                k = q[v] // 2
                q[v] -= 2 * k
                q[best] += k
                moved = True
            if q[r] >= goal:
                return True
            if not moved:
                break
        return False

    def _accept_merge(self, q, goal) -> bool:
        """Greedy chain of pairwise stack merges at best meeting vertices."""
        D, r, n = self.D, self.r, self.n
        stacks = [[v, c] for v, c in enumerate(q) if c and v != self.r]
        base = q[self.r]
        while True:
            if base + sum(c >> D[v][r] for v, c in stacks) >= goal:
                return True
            if len(stacks) < 2:
                return False
            best = None
            for i in range(len(stacks)):
                u, a = stacks[i]
                for j in range(i + 1, len(stacks)):
                    v, b = stacks[j]
                    for w in range(n):
                        m = (a >> D[u][w]) + (b >> D[v][w])
                        if m == 0:
                            continue
                        key = (m >> D[w][r], m)
                        if best is None or key > best[0]:
                            best = (key, i, j, w, m)
            if best is None:
                return False
            _, i, j, w, m = best
            stacks = [stacks[k] for k in range(len(stacks)) if k not in (i, j)]
            stacks.append([w, m])

    def _accept_down_dfs(self, q0, goal, budget=RESTRICTED_DFS_BUDGET) -> bool:
        """Search distance-decreasing moves only, node-capped; finds most witnesses."""
        r = self.r
        q = list(q0)
        seen = set()
        count = 0

        def rec() -> bool:
            nonlocal count
            if count > budget:
                return False
            key = bytes(q) if max(q) < 256 else tuple(q)
            if key in seen:
                return False
            seen.add(key)
            count += 1
            for u in range(self.n):
                if q[u] < 2 or u == r:
                    continue
                for w in self.down_moves[u]:
                    q[u] -= 2
                    q[w] += 1
                    ok = q[r] >= goal or rec()
                    q[u] += 2
                    q[w] -= 1
                    if ok:
                        return True
            return False

        return q[r] >= goal or rec()

    # ----- exact layer -----

    def _key(self, q):
        return bytes(q) if max(q) < 256 else tuple(q)

    def _dfs(self, q, W, goal, dead) -> bool:
        """Complete search over weight-feasible moves; q mutated in place."""
        key = self._key(q)
        if key in dead:
            return False
        self.dfs_nodes += 1
        if self.deadline is not None and self.dfs_nodes % 4096 == 0:
            if time.monotonic() > self.deadline:
                raise TimeoutError("follower deadline elapsed")
        r, wt, target = self.r, self.wt, goal * self.scale
        for u in range(self.n):
            if q[u] < 2 or u == r:
                continue
            wu2 = 2 * wt[u]
            for w in self.moves[u]:
                nW = W - wu2 + wt[w]
                if nW < target:
                    continue
                if w == r and q[r] + 1 >= goal:
                    return True
                q[u] -= 2
                q[w] += 1
                ok = self._dfs(q, nW, goal, dead)
                q[u] += 2
                q[w] -= 1
                if ok:
                    return True
        if len(dead) > DEAD_SET_LIMIT:
            dead.clear()
        dead.add(key)
        return False

    def decide(self, counts, t: int = 1) -> bool:
        """Exact: can t pebbles arrive at r (on top of any already there)?"""
        self.calls += 1
        if t <= 0:
            return True
        q = list(counts)
        goal = q[self.r] + t
        if q[self.r] >= goal:
            return True
        W = sum(c * self.wt[v] for v, c in enumerate(q) if c)
        if W < goal * self.scale:
            return False
        if self._accept_floors(q, goal):
            return True
        key = (self._key(q), goal)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = (
            self._accept_collapse(q, goal)
            or self._accept_merge(q, goal)
            or self._accept_down_dfs(q, goal)
        )
        if not res:
            dead = self._dead.setdefault(goal, set())
            _raise_recursion_limit(sum(q))
            res = self._dfs(q, W, goal, dead)
        if len(self._cache) > DEAD_SET_LIMIT:
            self._cache.clear()
        self._cache[key] = res
        return res

    def decide_cheap(self, counts, t: int = 1) -> bool:
        """Sound accept-only check: True means solvable, False means unknown."""
        self.calls += 1
        if t <= 0:
            return True
        q = list(counts)
        goal = q[self.r] + t
        W = sum(c * self.wt[v] for v, c in enumerate(q) if c)
        if W < goal * self.scale:
            return False
        return (
            self._accept_floors(q, goal)
            or self._accept_collapse(q, goal)
            or self._accept_merge(q, goal)
        )

    def trace(self, counts, t: int = 1) -> list[Arc] | None:
        """Exact search returning a legal move sequence with t arrivals, or None."""
        if t <= 0:
            return []
        q = list(counts)
        goal = q[self.r] + t
        W = sum(c * self.wt[v] for v, c in enumerate(q) if c)
        if W < goal * self.scale:
            return None
        _raise_recursion_limit(sum(q))
        moves: list[Arc] = []
        dead: set = set()
        r, wt, target = self.r, self.wt, goal * self.scale

        def rec(W) -> bool:
            if q[r] >= goal:
                return True
            key = self._key(q)
            if key in dead:
                return False
            self.dfs_nodes += 1
            if self.deadline is not None and self.dfs_nodes % 4096 == 0:
                if time.monotonic() > self.deadline:
                    raise TimeoutError("follower deadline elapsed")
            for u in range(self.n):
                if q[u] < 2 or u == r:
                    continue
                wu2 = 2 * wt[u]
                for w in self.moves[u]:
                    nW = W - wu2 + wt[w]
                    if nW < target:
                        continue
                    q[u] -= 2
                    q[w] += 1
                    moves.append(Arc(u, w))
                    if rec(nW):
                        return True
                    moves.pop()
                    q[u] += 2
                    q[w] -= 1
            if len(dead) > DEAD_SET_LIMIT:
                dead.clear()
            dead.add(key)
            return False

        return list(moves) if rec(W) else None


def _raise_recursion_limit(size: int):
    need = 2 * size + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


_ENGINES: dict[tuple[int, int], FollowerEngine] = {}


def engine_for(g: Graph, r: int) -> FollowerEngine:
    """Shared per-(graph, root) engine so memo tables persist across calls."""
    key = (id(g), r)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = _ENGINES[key] = FollowerEngine(g, r)
        if len(_ENGINES) > 512:
            stale = next(iter(_ENGINES))
            if stale != key:
                del _ENGINES[stale]
    return eng


def is_solvable(g: Graph, p: Configuration, r: int) -> bool:
    """True iff some pebbling move sequence places a pebble on r."""
    if p[r] >= 1:
        return True
    return engine_for(g, r).decide(p.counts, 1)


def max_deliverable(g: Graph, p: Configuration, r: int) -> DeliveryResult:
    """Optimal number of pebbles movable into r, with flow and move certificate."""
    eng = engine_for(g, r)
    best = 0
    scaled, scale = scaled_weight(p, r, g.distance_table)
    limit = (scaled - p[r] * scale) // scale  # arrivals can never exceed this
    while best < limit and eng.decide(p.counts, best + 1):
        best += 1
    moves = eng.trace(p.counts, best)
    if moves is None:
        raise AssertionError("trace failed for a decided delivery, engine bug")
    flow = FlowVector(dict(Counter(moves)))
    return DeliveryResult(delivered=best, flow=flow, moves=moves)


def balance_check(d: MoveMultigraph, p: Configuration) -> bool:
    """p(v) + indeg(v) - 2 outdeg(v) >= 0 at every vertex."""
    indeg = [0] * d.n
    outdeg = [0] * d.n
    for a, m in d.multiplicity.items():
        outdeg[a.tail] += m
        indeg[a.head] += m
    return all(p[v] + indeg[v] - 2 * outdeg[v] >= 0 for v in range(d.n))


def order_moves(d: MoveMultigraph, p: Configuration) -> list[Arc] | None:
    """Greedy legal ordering of ALL arcs of an acyclic d, or None if none exists.

    Repeatedly executes the lowest-indexed remaining arc whose tail holds
    two pebbles; on an acyclic multigraph this succeeds exactly when the
    balance condition holds.
    """
    if not d.is_acyclic():
        raise ValueError("order_moves requires an acyclic move multigraph")
    remaining = Counter({a: m for a, m in d.multiplicity.items() if m > 0})
    counts = list(p.counts)
    order: list[Arc] = []
    arcs_sorted = sorted(remaining)
    total = sum(remaining.values())
    while total:
        progressed = False
        for a in arcs_sorted:
            if remaining[a] > 0 and counts[a.tail] >= 2:
                counts[a.tail] -= 2
                counts[a.head] += 1
                remaining[a] -= 1
                order.append(a)
                total -= 1
                progressed = True
                break
        if not progressed:
            return None
    return order


def purify_flow(g: Graph, z: FlowVector, p: Configuration, r: int) -> FlowVector:
    """Cancel directed cycles until the move multigraph is acyclic.

    Feasibility is preserved (cancelling a cycle only adds slack at each
    vertex on it) and arcs into r are never touched, since r has no
    outgoing flow and thus lies on no cycle.
    """
    flow = dict(z.z)

    def find_cycle() -> list[Arc] | None:
        adj: dict[int, list[int]] = {}
        for a, m in flow.items():
            if m > 0:
                adj.setdefault(a.tail, []).append(a.head)
        color: dict[int, int] = {}
        parent: dict[int, int] = {}

        def walk(s) -> list[Arc] | None:
            stack = [(s, iter(adj.get(s, ())))]
            color[s] = 0
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if nxt not in color:
                        color[nxt] = 0
                        parent[nxt] = node
                        stack.append((nxt, iter(adj.get(nxt, ()))))
                        advanced = True
                        break
                    if color[nxt] == 0:
                        cyc = [nxt]
                        cur = node
                        while cur != nxt:
                            cyc.append(cur)
                            cur = parent[cur]
                        cyc.reverse()
                        return [
                            Arc(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))
                        ]
                if not advanced:
                    color[node] = 1
                    stack.pop()
            return None

        for s in list(adj):
            if s not in color:
                cyc = walk(s)
                if cyc is not None:
                    return cyc
        return None

    while True:
        cycle = find_cycle()
        if cycle is None:
            return FlowVector(flow)
        delta = min(flow[a] for a in cycle)
        for a in cycle:
            flow[a] -= delta
            if flow[a] == 0:
                del flow[a]


def flow_is_feasible(g: Graph, z: FlowVector, p: Configuration, r: int) -> bool:
    """Balance at every vertex plus zero outflow at the root."""
    if z.outflow(r) != 0:
        return False
    return balance_check(MoveMultigraph.from_flow(g, z), p)


def bfs_oracle(g: Graph, p: Configuration, r: int, budget: int = 5_000_000) -> int:
    """Independent exhaustive maximum of pebbles movable into r.

    Explores the whole reachable configuration space (moves out of r
    excluded, matching the root-sink rule) with memoization; used as the
    testing oracle for the engine.  Raises OracleBudgetError beyond budget.
    """
    n = g.n
    start = tuple(p.counts)
    memo: dict[tuple, int] = {}
    _raise_recursion_limit(sum(start))
    adjacency = g.adjacency

    def best(q: tuple) -> int:
        got = memo.get(q)
        if got is not None:
            return got
        if len(memo) > budget:
            raise OracleBudgetError(f"bfs_oracle exceeded {budget} configurations")
        top = q[r]
        lst = list(q)
        for u in range(n):
            if lst[u] < 2 or u == r:
                continue
            for w in adjacency[u]:
                lst[u] -= 2
                lst[w] += 1
                val = best(tuple(lst))
                lst[u] += 2
                lst[w] -= 1
                if val > top:
                    top = val
        memo[q] = top
        return top

    return best(start) - p[r]
