"""Exit criteria for the package, one test per criterion.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
Randomized checks use fixed seeds and at least 1000 cases each.
"""

import itertools
import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from choicegames.core import Alternative, DominanceRelation, MatrixGame, WeightedPreferenceProfile
from choicegames.games import (
    expand_one_sided_information,
    payoff_envelope,
    pure_analysis,
    solve,
    solve_2x2_mixed,
    solve_fictitious_play,
)
from choicegames.stable_sets import dominance_from_pairwise, enumerate_stable_sets
from choicegames.voting import (
    agenda_elimination,
    compare_pairwise,
    condorcet_analysis,
    derive_pairwise,
    iterated_league_elimination,
    league_scores,
    plurality,
)

from oracles import all_response_functions, pairwise_by_count, stable_sets_brute_force

CASES = 1000
PAIRS = [("A1", "M1"), ("A1", "A2"), ("A1", "M2"), ("A2", "M1"), ("M2", "A2"), ("M1", "M2")]


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@criterion(1, "Pairwise table reproduced from the reconciled profile; printed profile differs in five cells")
def test_table2_reproduction(reconciled, printed, table2):
    rec = derive_pairwise(reconciled)
    assert [rec[p] for p in PAIRS] == [45, 80, 95, 65, 85, 50]
    for x, y in PAIRS:
        assert rec[(y, x)] == 100 - rec[(x, y)]
        assert rec[(x, y)] == table2[(x, y)]
    pr = derive_pairwise(printed)
    assert [pr[p] for p in PAIRS] == [50, 85, 100, 65, 80, 55]
    assert len(compare_pairwise(pr, table2)) == 5


@criterion(2, "Plurality on the reconciled profile: A1 45, M1 35, A2 15, M2 5, winner A1")
def test_plurality(reconciled):
    r = plurality(reconciled)
    assert r.scores == {"A1": 45, "M1": 35, "A2": 15, "M2": 5}
    assert r.winners == ("A1",)


@criterion(3, "No Condorcet winner on the pairwise table and a verifiable majority cycle")
def test_cycle_witness(table2):
    winner, cycle = condorcet_analysis(table2)
    assert winner is None
    assert cycle is not None and len(cycle) >= 3
    for x, y in zip(cycle, cycle[1:] + cycle[:1]):
        assert table2[(x, y)] > 50


@criterion(4, "Agendas [M1,A2,A1,M2] and [A2,A1,M2,M1] elect A1 and M1")
def test_agenda_dependence(table2):
    assert agenda_elimination(table2, ["M1", "A2", "A1", "M2"]).winner == "A1"
    assert agenda_elimination(table2, ["A2", "A1", "M2", "M1"]).winner == "M1"


@criterion(5, "League tables 220/140/140/100 then 140/105/55; final A1 vs M1 won by M1")
def test_league_tables(table2):
    assert league_scores(table2).scores == {"A1": 220, "M1": 140, "M2": 140, "A2": 100}
    assert league_scores(table2, ["A1", "M1", "M2"]).scores == {"A1": 140, "M1": 105, "M2": 55}
    r = iterated_league_elimination(table2)
    final = r.rounds[-1].matches[0]
    assert {final.left, final.right} == {"A1", "M1"}
    assert r.winner == "M1"


@criterion(6, "Unique stable set {M1, M2} on the pairwise table, confirmed by brute-force subsets")
def test_nm_uniqueness(table2):
    rel = dominance_from_pairwise(table2)
    res = enumerate_stable_sets(rel)
    assert [set(s) for s in res.stable_sets] == [{"M1", "M2"}]
    assert stable_sets_brute_force(rel.ids, rel.edges) == [frozenset({"M1", "M2"})]


@criterion(7, "Column-informed expansion of matrix2 equals matrix1 cell for cell, columns in order")
def test_information_expansion(matrix2, matrix1):
    e = expand_one_sided_information(matrix2, "column")
    assert e.expanded.payoffs == matrix1.payoffs
    assert [[int(v) for v in r] for r in e.expanded.payoffs] == [[45, 45, 95, 95], [65, 15, 65, 15]]
    assert [tuple(m.values()) for m in e.strategy_maps] == [
        ("M1", "M1"), ("M1", "M2"), ("M2", "M1"), ("M2", "M2"),
    ]


@criterion(8, "Pure analysis: matrix1 saddle at 45; matrix2 maximin 45, minimax 65, no saddle")
def test_pure_analysis(matrix1, matrix2):
    a = pure_analysis(matrix1)
    assert a.maximin == a.minimax == 45
    assert [(matrix1.row_labels[i], matrix1.col_labels[j]) for i, j in a.saddle_points] == [("A1", "A1→M1, A2→M2")]
    b = pure_analysis(matrix2)
    assert (b.maximin, b.minimax, b.saddle_points) == (45, 65, ())


@criterion(9, "matrix2 mixed solution (1/2,1/2), (4/5,1/5), value 55, column share 45")
def test_mixed_closed_form(matrix2):
    s = solve_2x2_mixed(matrix2)
    assert s.row_strategy.probabilities == (Fraction(1, 2), Fraction(1, 2))
    assert s.col_strategy.probabilities == (Fraction(4, 5), Fraction(1, 5))
    assert s.value == 55 and s.column_value == 45 and s.epsilon == 0


@criterion(10, "Envelope breakpoints: row at p=1/2, column at q=4/5, both value 55")
def test_envelope_breakpoints(matrix2):
    row = [(p.parameter, p.best_response_value) for p in payoff_envelope(matrix2, "row") if p.is_breakpoint]
    col = [(p.parameter, p.best_response_value) for p in payoff_envelope(matrix2, "column") if p.is_breakpoint]
    assert row == [(Fraction(1, 2), 55)]
    assert col == [(Fraction(4, 5), 55)]


def _random_game(rng, m, n, lo=-20, hi=20):
    return MatrixGame(
        [f"r{i}" for i in range(m)],
        [f"c{j}" for j in range(n)],
        [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)],
    )


@criterion(11, "Randomized property suite (>=1000 cases per property)")
def test_property_suite():
    rng = random.Random(20240601)

    # Weak duality.
    for _ in range(CASES):
        a = pure_analysis(_random_game(rng, rng.randint(1, 5), rng.randint(1, 5)))
        assert a.maximin <= a.minimax

    # Complement invariant of derived matrices, against the counting oracle.
    for _ in range(CASES):
        ids = [f"c{i}" for i in range(rng.randint(2, 5))]
        groups = []
        for _ in range(rng.randint(1, 5)):
            ranking = ids[:]
            rng.shuffle(ranking)
            groups.append((rng.randint(1, 50), ranking))
        m = derive_pairwise(WeightedPreferenceProfile(tuple(Alternative(i) for i in ids), groups))
        for x, y in itertools.permutations(ids, 2):
            assert m[(x, y)] + m[(y, x)] == 100
        assert dict(m.support) == pairwise_by_count(groups, ids)

    # 2x2 indifference certificate on saddle-free games, and fictitious-play agreement.
    checked = 0
    while checked < CASES:
        g = _random_game(rng, 2, 2)
        if pure_analysis(g).has_saddle:
            continue
        checked += 1
        s = solve_2x2_mixed(g)
        (p, _), (q, _) = s.row_strategy.probabilities, s.col_strategy.probabilities
        a = g.payoffs
        assert p * a[0][0] + (1 - p) * a[1][0] == s.value
        assert p * a[0][1] + (1 - p) * a[1][1] == s.value
        assert q * a[0][0] + (1 - q) * a[0][1] == s.value
        assert q * a[1][0] + (1 - q) * a[1][1] == s.value
        pa = pure_analysis(g)
        assert pa.maximin <= s.value <= pa.minimax
        fp = solve_fictitious_play(g, Fraction(1, 2), 10_000)
        assert abs(fp.value - s.value) <= fp.epsilon <= Fraction(1, 4)

    # Expansion cells against function enumeration, both informed sides.
    for _ in range(CASES):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        g = _random_game(rng, m, n)
        rows = [list(r) for r in g.payoffs]
        col = expand_one_sided_information(g, "column").expanded
        assert [list(r) for r in col.payoffs] == [
            [rows[i][f[i]] for f in all_response_functions(m, n)] for i in range(m)
        ]
        row = expand_one_sided_information(g, "row").expanded
        assert [list(r) for r in row.payoffs] == [
            [rows[f[j]][j] for j in range(n)] for f in all_response_functions(n, m)
        ]

    # Stable sets are never nested, and match brute force.
    for _ in range(CASES):
        n = rng.randint(1, 7)
        ids = [f"v{i}" for i in range(n)]
        edges = set()
        for i, j in itertools.combinations(range(n), 2):
            r = rng.random()
            if r < 0.15:
                edges.add((ids[i], ids[j]))
            elif r < 0.3:
                edges.add((ids[j], ids[i]))
        rel = DominanceRelation(tuple(Alternative(i) for i in ids), frozenset(edges))
        sets = [frozenset(s) for s in enumerate_stable_sets(rel).stable_sets]
        assert set(sets) == set(stable_sets_brute_force(ids, edges))
        for s, t in itertools.permutations(sets, 2):
            assert not s < t


COMMANDS = [
    ["derive-pairwise", "-i", "@table1_reconciled"],
    ["derive-pairwise", "-i", "@table1_printed", "--format", "markdown"],
    ["vote", "plurality", "-i", "@table1_reconciled"],
    ["vote", "condorcet", "-i", "@table2"],
    ["vote", "agenda", "-i", "@table2", "--agenda", "M1,A2,A1,M2"],
    ["vote", "bracket", "-i", "@table2", "--bracket", "((A1,A2),(M1,M2))"],
    ["vote", "league-eliminate", "-i", "@table2"],
    ["stable-sets", "-i", "@table2"],
    ["game", "solve", "-i", "@matrix1"],
    ["game", "solve", "-i", "@matrix2", "--mode", "iterative"],
    ["game", "expand", "-i", "@matrix2"],
    ["game", "envelope", "-i", "@matrix2", "--format", "csv"],
]


@criterion(12, "Repeated CLI runs on the shipped fixtures are byte-identical")
def test_determinism():
    for argv in COMMANDS:
        runs = [
            subprocess.run([sys.executable, "-m", "choicegames", *argv, "--no-meta"], capture_output=True)
            for _ in range(2)
        ]
        assert runs[0].stdout == runs[1].stdout and runs[0].stdout
        assert runs[0].returncode == runs[1].returncode
    # With the environment block too: it carries no timestamps.
    a, b = (subprocess.run([sys.executable, "-m", "choicegames", "game", "solve", "-i", "@matrix2"],
                           capture_output=True) for _ in range(2))
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["result"]["solution"]["value"] == "55"
