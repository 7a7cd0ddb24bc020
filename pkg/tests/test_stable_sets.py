import random
from fractions import Fraction

import pytest

from choicegames.core import Alternative, DominanceRelation, PairwiseMatrix
from choicegames.stable_sets import (
    InstanceTooLarge,
    dominance_from_pairwise,
    enumerate_stable_sets,
    is_externally_stable,
    is_internally_stable,
)

from oracles import stable_sets_brute_force


def relation(ids, edges):
    return DominanceRelation(tuple(Alternative(i) for i in ids), frozenset(edges))


def random_relation(rng, n, density=0.5):
    ids = [f"v{i}" for i in range(n)]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            r = rng.random()
            if r < density / 2:
                edges.add((ids[i], ids[j]))
            elif r < density:
                edges.add((ids[j], ids[i]))
    return relation(ids, edges)


@pytest.fixture(scope="module")
def rel(table2):
    return dominance_from_pairwise(table2)


def test_table2_edges(rel):
    assert rel.edges == {("M1", "A1"), ("A1", "A2"), ("A1", "M2"), ("A2", "M1"), ("M2", "A2")}


def test_threshold_is_strict():
    alts = (Alternative("x"), Alternative("y"))
    m = PairwiseMatrix(alts, {("x", "y"): 50, ("y", "x"): 50})
    assert dominance_from_pairwise(m).edges == frozenset()
    assert dominance_from_pairwise(m, 49).edges == {("x", "y"), ("y", "x")}
    with pytest.raises(ValueError):
        dominance_from_pairwise(m, 100)


def test_unanimous_is_transitive_tournament():
    order = ["c", "a", "b", "d"]
    support = {}
    for i, x in enumerate(order):
        for y in order[i + 1:]:
            support[(x, y)], support[(y, x)] = Fraction(100), Fraction(0)
    r = dominance_from_pairwise(PairwiseMatrix(tuple(Alternative(a) for a in "abcd"), support))
    assert r.edges == {(order[i], order[j]) for i in range(4) for j in range(i + 1, 4)}


def test_internal_stability(rel):
    assert is_internally_stable({"M1", "M2"}, rel)
    assert not is_internally_stable({"A1", "A2"}, rel)
    assert is_internally_stable(set(), rel)
    with pytest.raises(KeyError):
        is_internally_stable({"Z"}, rel)


def test_external_stability(rel):
    assert is_externally_stable({"M1", "M2"}, rel) == (True, {"A1": "M1", "A2": "M2"})
    ok, witnesses = is_externally_stable({"A1"}, rel)
    assert not ok and "M1" not in witnesses
    assert is_externally_stable(set(rel.ids), rel) == (True, {})


def test_table2_unique_stable_set(rel):
    res = enumerate_stable_sets(rel)
    assert res.stable_sets == [("M1", "M2")]
    assert res.certificates == [{"A1": "M1", "A2": "M2"}]
    assert {frozenset(s) for s in res.stable_sets} == set(stable_sets_brute_force(rel.ids, rel.edges))


def test_empty_relation_gives_full_set():
    res = enumerate_stable_sets(relation("abcd", set()))
    assert res.stable_sets == [tuple("abcd")]


def test_three_cycle_has_none():
    assert enumerate_stable_sets(relation("abc", {("a", "b"), ("b", "c"), ("c", "a")})).stable_sets == []


def test_size_cap():
    with pytest.raises(InstanceTooLarge):
        enumerate_stable_sets(relation([f"v{i}" for i in range(6)], set()), max_alternatives=5)


def test_matches_brute_force_on_random_relations():
    rng = random.Random(11)
    for _ in range(400):
        rel = random_relation(rng, rng.randint(1, 8), rng.choice([0.2, 0.5, 0.8, 1.0]))
        res = enumerate_stable_sets(rel)
        assert {frozenset(s) for s in res.stable_sets} == set(stable_sets_brute_force(rel.ids, rel.edges))
        for s, cert in zip(res.stable_sets, res.certificates):
            assert is_internally_stable(s, rel)
            assert is_externally_stable(s, rel) == (True, cert)
            assert set(cert.values()) <= set(s)


def test_permutation_invariance():
    rng = random.Random(5)
    for _ in range(100):
        rel = random_relation(rng, rng.randint(2, 7))
        ids = list(rel.ids)
        rng.shuffle(ids)
        shuffled = DominanceRelation(tuple(Alternative(i) for i in ids), rel.edges)
        assert {frozenset(s) for s in enumerate_stable_sets(rel).stable_sets} == {
            frozenset(s) for s in enumerate_stable_sets(shuffled).stable_sets
        }


def test_transitive_tournament_has_top_element_only():
    rng = random.Random(3)
    for _ in range(100):
        order = [f"v{i}" for i in range(rng.randint(1, 8))]
        rng.shuffle(order)
        edges = {(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))}
        assert enumerate_stable_sets(relation(sorted(order), edges)).stable_sets == [(order[0],)]


def test_large_instance_within_cap_runs():
    rng = random.Random(1)
    rel = random_relation(rng, 20, 0.3)
    res = enumerate_stable_sets(rel)
    for s in res.stable_sets:
        assert is_internally_stable(s, rel) and is_externally_stable(s, rel)[0]
