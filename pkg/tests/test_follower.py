from __future__ import annotations

import random

import pytest

from pebbling.configurations import Configuration, apply_move
from pebbling.follower import (
    FlowVector,
    FollowerEngine,
    MoveMultigraph,
    OracleBudgetError,
    balance_check,
    bfs_oracle,
    engine_for,
    flow_is_feasible,
    is_solvable,
    max_deliverable,
    order_moves,
    purify_flow,
)
from pebbling.graphs import Arc, Graph, catalog


def test_solvable_basics():
    g = catalog("path:3")
    assert is_solvable(g, Configuration([0, 0, 4]), 0)
    assert not is_solvable(g, Configuration([0, 0, 3]), 0)
    assert is_solvable(g, Configuration([1, 0, 0]), 0)
    assert is_solvable(g, Configuration([0, 2, 0]), 0)


def test_max_deliverable_path():
    g = catalog("path:3")
    res = max_deliverable(g, Configuration([0, 0, 9]), 0)
    assert res.delivered == 2
    assert res.flow.inflow(0) == 2
    assert len(res.moves) == res.flow.total()


def test_max_deliverable_counts_arrivals_not_root_stock():
    g = catalog("path:2")
    res = max_deliverable(g, Configuration([3, 5], ), 0)
    assert res.delivered == 2  # arrivals only; the 3 already on r do not count
    assert res.flow.outflow(0) == 0


def test_max_deliverable_never_moves_out_of_root():
    g = catalog("path:3")
    res = max_deliverable(g, Configuration([4, 0, 0]), 0)
    assert res.delivered == 0
    assert res.moves == []


def test_lemke1_has_unsolvable_size7():
    # a maximum unsolvable configuration for root 0: adding any pebble solves it
    g = catalog("lemke1")
    p = Configuration([0, 0, 3, 1, 1, 1, 0, 1])
    assert not is_solvable(g, p, 0)
    assert max_deliverable(g, p, 0).delivered == 0
    for u in range(g.n):
        q = list(p)
        q[u] += 1
        assert is_solvable(g, Configuration(q), 0)


def test_delivery_result_replays_legally():
    g = catalog("cube:3")
    p = Configuration([0, 3, 2, 0, 5, 0, 1, 6])
    res = max_deliverable(g, p, 0)
    cur = p
    for a in res.moves:
        cur = apply_move(cur, a)  # raises if any move is illegal
    assert cur[0] - p[0] == res.delivered
    assert res.flow.total() == len(res.moves)
    assert res.flow.total() <= p.size()
    assert flow_is_feasible(g, res.flow, p, 0)


def test_decide_monotone_in_pebbles():
    g = catalog("cycle:5")
    eng = engine_for(g, 0)
    base = [0, 0, 3, 1, 0]
    assert not eng.decide(base)
    more = [0, 0, 4, 1, 0]
    assert eng.decide(more)


def test_engine_rejects_bad_root():
    with pytest.raises(ValueError):
        FollowerEngine(catalog("path:3"), 5)


def test_balance_check_examples():
    g = catalog("path:3")
    p = Configuration([0, 0, 4])
    d = MoveMultigraph.from_arcs(3, [Arc(2, 1), Arc(2, 1), Arc(1, 0)])
    assert balance_check(d, p)
    short = Configuration([0, 0, 3])
    assert not balance_check(d, short)


def test_order_moves_requires_acyclic():
    d = MoveMultigraph.from_arcs(2, [Arc(0, 1), Arc(1, 0)])
    with pytest.raises(ValueError, match="acyclic"):
        order_moves(d, Configuration([4, 4]))


def test_order_moves_success_and_stick():
    g = catalog("path:3")
    d = MoveMultigraph.from_arcs(3, [Arc(2, 1), Arc(2, 1), Arc(1, 0)])
    order = order_moves(d, Configuration([0, 0, 4]))
    assert order is not None and len(order) == 3
    cur = Configuration([0, 0, 4])
    for a in order:
        cur = apply_move(cur, a)
    assert cur[0] == 1
    assert order_moves(d, Configuration([0, 0, 3])) is None


def test_acyclic_detection():
    assert MoveMultigraph.from_arcs(3, [Arc(0, 1), Arc(1, 2)]).is_acyclic()
    assert not MoveMultigraph.from_arcs(3, [Arc(0, 1), Arc(1, 2), Arc(2, 0)]).is_acyclic()


def test_flow_vector_validation_and_views():
    z = FlowVector({Arc(2, 1): 2, Arc(1, 0): 1, Arc(0, 2): 0})
    assert z.total() == 3
    assert z.inflow(1) == 2 and z.outflow(1) == 1
    assert Arc(0, 2) not in z.z  # zero entries dropped
    with pytest.raises(ValueError):
        FlowVector({Arc(0, 1): -1})


def test_purify_flow_cancels_cycles():
    g = catalog("cycle:4")
    p = Configuration([0, 2, 4, 2])
    cyc = FlowVector({Arc(1, 2): 1, Arc(2, 3): 1, Arc(3, 0): 1, Arc(2, 1): 1, Arc(1, 2): 1})
    z = FlowVector({Arc(1, 2): 2, Arc(2, 1): 1, Arc(2, 3): 1, Arc(3, 0): 1})
    pure = purify_flow(g, z, p, 0)
    assert MoveMultigraph.from_flow(g, pure).is_acyclic()
    assert pure.inflow(0) >= z.inflow(0) - z.outflow(0)


def test_balance_iff_orderable_on_random_acyclic_multigraphs():
    rng = random.Random(11)
    g = catalog("cube:3")
    all_arcs = [Arc(u, w) for u in range(g.n) for w in g.adjacency[u]]
    for _ in range(600):
        picks = [rng.choice(all_arcs) for _ in range(rng.randint(1, 5))]
        d = MoveMultigraph.from_arcs(g.n, picks)
        if not d.is_acyclic():
            continue
        p = Configuration([rng.randint(0, 4) for _ in range(g.n)])
        assert (order_moves(d, p) is not None) == balance_check(d, p)


def test_bfs_oracle_examples():
    g = catalog("path:3")
    assert bfs_oracle(g, Configuration([0, 0, 9]), 0) == 2
    assert bfs_oracle(g, Configuration([0, 0, 3]), 0) == 0
    assert bfs_oracle(g, Configuration([2, 0, 4]), 0) == 1  # root stock never moves


def test_bfs_oracle_budget_error():
    g = catalog("cube:3")
    with pytest.raises(OracleBudgetError):
        bfs_oracle(g, Configuration([0, 9, 9, 9, 9, 9, 9, 9]), 0, budget=50)


def test_engine_matches_oracle_on_random_configs():
    rng = random.Random(5)
    for spec in ["path:4", "cycle:5", "lemke1"]:
        g = catalog(spec)
        for _ in range(40):
            counts = [0] * g.n
            for _ in range(rng.randint(0, 7)):
                counts[rng.randrange(g.n)] += 1
            p = Configuration(counts)
            r = rng.randrange(g.n)
            assert max_deliverable(g, p, r).delivered == bfs_oracle(g, p, r)


def test_engine_for_caches_per_graph_and_root():
    g = catalog("path:3")
    assert engine_for(g, 0) is engine_for(g, 0)
    assert engine_for(g, 0) is not engine_for(g, 1)


def test_decide_multi_target():
    g = catalog("path:2")
    eng = engine_for(g, 0)
    assert eng.decide([0, 8], 4)
    assert not eng.decide([0, 8], 5)
    assert eng.decide([0, 8], 0)
