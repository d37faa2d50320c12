from __future__ import annotations

import pytest

from pebbling.configurations import Configuration
from pebbling.follower import engine_for, max_deliverable
from pebbling.graphs import Graph, catalog
from pebbling.pipeline import (
    GrahamReport,
    PebblingReport,
    graham_support_check,
    pi,
    pi_k_upper,
    pi_rooted,
    two_pebbling_witness,
)


def test_pi_rooted_examples():
    assert pi_rooted(catalog("path:4"), 0) == 8
    assert pi_rooted(catalog("path:4"), 1) == 5
    assert pi_rooted(catalog("complete:4"), 2) == 4
    assert pi_rooted(catalog("cube:3"), 0) == 8


def test_pi_known_values():
    assert pi(catalog("path:2")) == 2
    assert pi(catalog("path:5")) == 16
    assert pi(catalog("complete:3")) == 3
    assert pi(catalog("cycle:4")) == 4
    assert pi(catalog("cycle:5")) == 5
    assert pi(catalog("cycle:6")) == 8
    assert pi(catalog("cube:3")) == 8
    assert pi(catalog("lemke1")) == 8


def test_pi_invariant_under_relabeling():
    g = catalog("lemke1")
    relabel = {v: (v * 3) % 8 for v in range(8)}
    h = Graph(8, [(relabel[u], relabel[v]) for u, v in g.edges])
    assert pi(h) == pi(g)


def test_pi_k_upper_cube_class0_exact():
    report = pi_k_upper(catalog("cube:3"), 4, 7, class0=True)
    assert isinstance(report, PebblingReport)
    assert report.value == 8
    assert report.complete
    assert all(i.status == "Infeasible" for i in report.instances)


def test_pi_k_upper_lemke_full_support():
    report = pi_k_upper(catalog("lemke1"), 7, 7, lower=1)
    assert report.value == 8
    assert report.complete
    assert report.certificate is not None
    assert report.certificate.size() == 7
    eng = engine_for(catalog("lemke1"), [r for r, b in report.per_root.items() if b == 8][0])


def test_pi_k_upper_equals_direct_enumeration_when_c_is_k():
    g = catalog("cycle:5")
    from itertools import combinations

    from pebbling.leader import BilevelInstance, max_unsolvable
    from pebbling.symmetry import automorphisms, orbit_representatives

    k = 2
    report = pi_k_upper(g, k, k, lower=1)
    best = 1
    for r in orbit_representatives(g):
        for support in combinations([v for v in range(g.n) if v != r], k):
            out = max_unsolvable(BilevelInstance(g, r, support))
            if out.status == "Optimal":
                best = max(best, out.value + 1)
    assert report.value == best


def test_pi_k_monotone_in_k():
    g = catalog("cube:3")
    values = [pi_k_upper(g, k, k, lower=1).value for k in (1, 2, 3)]
    assert values == sorted(values)


def test_pi_k_upper_sampling_flags_incomplete():
    g = catalog("cube:3")
    report = pi_k_upper(g, 2, 4, lower=1, sample=1, seed=5)
    assert not report.complete
    assert len(report.instances) == 1


def test_pi_k_upper_validates_arguments():
    with pytest.raises(ValueError):
        pi_k_upper(catalog("cube:3"), 3, 2)
    with pytest.raises(ValueError):
        pi_k_upper(catalog("cube:3"), 0, 2)


def test_two_pebbling_holds_on_small_graphs():
    assert two_pebbling_witness(catalog("complete:4")) is None
    assert two_pebbling_witness(catalog("path:3")) is None
    assert two_pebbling_witness(catalog("cycle:5")) is None


def test_two_pebbling_witness_on_lemke():
    got = two_pebbling_witness(catalog("lemke1"))
    assert got is not None
    p, r = got
    g = catalog("lemke1")
    s = len(p.support())
    assert p.size() == 2 * pi(g) - s + 1
    res = max_deliverable(g, p, r)
    assert res.delivered + p[r] < 2


def test_graham_product_of_edges():
    report = graham_support_check(catalog("path:2"), catalog("path:2"), 3, 3)
    assert isinstance(report, GrahamReport)
    assert report.pi_g == report.pi_h == 2
    assert report.threshold == 4
    assert report.consistent
    assert report.complete


def test_graham_path_by_path3():
    report = graham_support_check(catalog("path:2"), catalog("path:3"), 2, 3)
    assert report.threshold == 8
    assert report.consistent
