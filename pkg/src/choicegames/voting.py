"""Pairwise aggregation of weighted rankings and the selection procedures
built on it: plurality, Condorcet checks, knockouts and league tables."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import (
    HALF,
    HUNDRED,
    PairwiseMatrix,
    ValidationError,
    WeightedPreferenceProfile,
    ensure_valid,
)

TIE_ERROR = "error"
TIE_INCUMBENT = "incumbent-stays"
TIE_CHALLENGER = "challenger-advances"
TIE_RULES = (TIE_ERROR, TIE_INCUMBENT, TIE_CHALLENGER)

LEFT, RIGHT, TIE = "left", "right", "tie"

# A bracket is either a leaf id or a pair of sub-brackets.
Bracket = Union[str, Sequence["Bracket"]]


class TieError(RuntimeError):
    """A knockout hit a 50:50 match while the tie rule is ``error``."""

    def __init__(self, match: "MatchRecord", report: "EliminationReport"):
        self.match = match
        self.report = report
        super().__init__(
            f"tied match {match.left} vs {match.right} "
            f"({match.left_support}:{match.right_support}) under tie rule 'error'"
        )


@dataclass(frozen=True)
class TallyResult:
    scores: dict[str, Fraction]
    winners: tuple[str, ...]


@dataclass(frozen=True)
class MatchRecord:
    left: str
    right: str
    left_support: Fraction
    right_support: Fraction
    outcome: str

    @property
    def winner(self) -> Optional[str]:
        return {LEFT: self.left, RIGHT: self.right}.get(self.outcome)


@dataclass
class Round:
    field: list[str]
    eliminated: list[str]
    matches: list[MatchRecord] = field(default_factory=list)
    scores: Optional[dict[str, Fraction]] = None


@dataclass
class EliminationReport:
    """Round-by-round log of an elimination procedure.

    ``winner`` is None when the procedure ends in a tie; ``tied`` then
    lists the alternatives still level.
    """

    rounds: list[Round] = field(default_factory=list)
    winner: Optional[str] = None
    tied: list[str] = field(default_factory=list)

    @property
    def matches(self) -> list[MatchRecord]:
        return [m for r in self.rounds for m in r.matches]


def _require_ids(matrix: PairwiseMatrix, ids: Sequence[str]) -> None:
    known = set(matrix.ids)
    unknown = [i for i in ids if i not in known]
    if unknown:
        raise KeyError(f"unknown alternative(s): {', '.join(unknown)}")
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate alternatives in {list(ids)}")


def _argmax(scores: dict[str, Fraction]) -> tuple[str, ...]:
    best = max(scores.values())
    return tuple(k for k, v in scores.items() if v == best)


def derive_pairwise(profile: WeightedPreferenceProfile) -> PairwiseMatrix:
    """Percentage of listed weight ranking x above y, for every ordered pair."""
    ensure_valid(profile)
    total = profile.total_weight
    ids = profile.ids
    above = {(x, y): Fraction(0) for x in ids for y in ids if x != y}
    for group in profile.groups:
        pos = {a: i for i, a in enumerate(group.ranking)}
        for x, y in above:
            if pos[x] < pos[y]:
                above[(x, y)] += group.weight
    support = {pair: HUNDRED * w / total for pair, w in above.items()}
    return PairwiseMatrix(profile.alternatives, support)


def compare_pairwise(
    derived: PairwiseMatrix, reference: PairwiseMatrix
) -> list[tuple[str, str, Fraction, Fraction]]:
    """Cells where two matrices over the same alternatives disagree.

    Each unordered pair is reported once, oriented as in ``derived``'s
    alternative order: ``(x, y, derived[x, y], reference[x, y])``.
    """
    if set(derived.ids) != set(reference.ids):
        raise ValueError("matrices cover different alternatives")
    ids = derived.ids
    out = []
    for i, x in enumerate(ids):
        for y in ids[i + 1:]:
            if derived[(x, y)] != reference[(x, y)]:
                out.append((x, y, derived[(x, y)], reference[(x, y)]))
    return out


def plurality(profile: WeightedPreferenceProfile) -> TallyResult:
    ensure_valid(profile)
    total = profile.total_weight
    scores = {a: Fraction(0) for a in profile.ids}
    for group in profile.groups:
        scores[group.ranking[0]] += group.weight
    scores = {a: HUNDRED * w / total for a, w in scores.items()}
    return TallyResult(scores, _argmax(scores))


def head_to_head(matrix: PairwiseMatrix, x: str, y: str) -> MatchRecord:
    if x == y:
        raise ValueError(f"cannot match {x} against itself")
    _require_ids(matrix, [x, y])
    sx, sy = matrix[(x, y)], matrix[(y, x)]
    outcome = LEFT if sx > HALF else RIGHT if sx < HALF else TIE
    return MatchRecord(x, y, sx, sy, outcome)


def majority_edges(matrix: PairwiseMatrix) -> dict[str, list[str]]:
    """Strict-majority successors of each alternative, in alternative order."""
    return {x: [y for y in matrix.ids if y != x and matrix[(x, y)] > HALF] for x in matrix.ids}


def _shortest_cycle(ids: Sequence[str], succ: dict[str, list[str]]) -> Optional[list[str]]:
    best = None
    for start in ids:
        parent = {start: None}
        queue = deque([start])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for v in succ[u]:
                if v == start:
                    found = u
                    break
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        if found is None:
            continue
        path = []
        node = found
        while node is not None:
            path.append(node)
            node = parent[node]
        cycle = path[::-1]
        if best is None or len(cycle) < len(best):
            best = cycle
    return best


def condorcet_analysis(matrix: PairwiseMatrix) -> tuple[Optional[str], Optional[list[str]]]:
    """Return ``(condorcet_winner, majority_cycle)``; either may be None.

    The cycle is a shortest directed cycle of the strict-majority relation,
    listed from its earliest alternative; the closing edge back to the
    first element is implied.
    """
    ensure_valid(matrix)
    succ = majority_edges(matrix)
    winner = next((x for x in matrix.ids if len(succ[x]) == len(matrix.ids) - 1), None)
    return winner, _shortest_cycle(matrix.ids, succ)


def _decide(match: MatchRecord, tie_rule: str, report: EliminationReport) -> str:
    """Winner of ``match`` where ``left`` is the incumbent."""
    if match.outcome != TIE:
        return match.winner
    if tie_rule == TIE_INCUMBENT:
        return match.left
    if tie_rule == TIE_CHALLENGER:
        return match.right
    raise TieError(match, report)


def _check_tie_rule(tie_rule: str) -> None:
    if tie_rule not in TIE_RULES:
        raise ValueError(f"unknown tie rule {tie_rule!r}; expected one of {', '.join(TIE_RULES)}")


def agenda_elimination(
    matrix: PairwiseMatrix, agenda: Sequence[str], tie_rule: str = TIE_ERROR
) -> EliminationReport:
    """Sequential knockout: the reigning champion meets each agenda entry in turn.

    Raises :class:`TieError` on a 50:50 match when ``tie_rule`` is ``error``;
    the partial report is attached to the exception.
    """
    _check_tie_rule(tie_rule)
    ensure_valid(matrix)
    agenda = list(agenda)
    _require_ids(matrix, agenda)
    if len(agenda) < 2:
        raise ValueError("agenda needs at least two alternatives")
    report = EliminationReport()
    remaining = list(agenda)
    champion = agenda[0]
    for challenger in agenda[1:]:
        match = head_to_head(matrix, champion, challenger)
        rnd = Round(field=list(remaining), eliminated=[], matches=[match])
        report.rounds.append(rnd)
        winner = _decide(match, tie_rule, report)
        loser = challenger if winner == champion else champion
        rnd.eliminated.append(loser)
        remaining.remove(loser)
        champion = winner
    report.winner = champion
    return report


def bracket_leaves(bracket: Bracket) -> list[str]:
    if isinstance(bracket, str):
        return [bracket]
    if len(bracket) != 2:
        raise ValueError(f"bracket node must have exactly two children, got {len(bracket)}")
    return bracket_leaves(bracket[0]) + bracket_leaves(bracket[1])


def bracket_elimination(
    matrix: PairwiseMatrix, bracket: Bracket, tie_rule: str = TIE_ERROR
) -> EliminationReport:
    """Olympic-system knockout over an explicit binary bracket.

    Matches are played in post-order; at each node the left child's winner
    counts as the incumbent for tie resolution.
    """
    _check_tie_rule(tie_rule)
    ensure_valid(matrix)
    leaves = bracket_leaves(bracket)
    _require_ids(matrix, leaves)
    report = EliminationReport()
    remaining = list(leaves)

    def play(node: Bracket) -> str:
        if isinstance(node, str):
            return node
        left, right = play(node[0]), play(node[1])
        match = head_to_head(matrix, left, right)
        rnd = Round(field=list(remaining), eliminated=[], matches=[match])
        report.rounds.append(rnd)
        winner = _decide(match, tie_rule, report)
        loser = right if winner == left else left
        rnd.eliminated.append(loser)
        remaining.remove(loser)
        return winner

    report.winner = play(bracket)
    return report


def league_scores(matrix: PairwiseMatrix, field: Optional[Sequence[str]] = None) -> TallyResult:
    """Each alternative's summed pairwise support against the rest of ``field``."""
    ensure_valid(matrix)
    field = list(matrix.ids if field is None else field)
    _require_ids(matrix, field)
    if len(field) < 2:
        raise ValueError("a league needs at least two alternatives")
    scores = {x: sum((matrix[(x, y)] for y in field if y != x), Fraction(0)) for x in field}
    return TallyResult(scores, _argmax(scores))


def iterated_league_elimination(matrix: PairwiseMatrix) -> EliminationReport:
    """Drop every last-placed alternative until two remain, then play them off.

    If a round leaves everyone tied for last, the procedure stops and
    reports that tie instead of emptying the field.
    """
    ensure_valid(matrix)
    if len(matrix.ids) < 2:
        raise ValidationError(["alternatives: need at least two"])
    report = EliminationReport()
    remaining = list(matrix.ids)
    while len(remaining) > 2:
        scores = league_scores(matrix, remaining).scores
        low = min(scores.values())
        last = [x for x in remaining if scores[x] == low]
        if len(last) == len(remaining):
            report.rounds.append(Round(field=list(remaining), eliminated=[], scores=scores))
            report.tied = list(remaining)
            return report
        report.rounds.append(Round(field=list(remaining), eliminated=last, scores=scores))
        remaining = [x for x in remaining if x not in last]
    if len(remaining) == 1:
        report.winner = remaining[0]
        return report
    match = head_to_head(matrix, *remaining)
    loser = [] if match.outcome == TIE else [match.right if match.outcome == LEFT else match.left]
    report.rounds.append(Round(field=list(remaining), eliminated=loser, matches=[match]))
    if match.outcome == TIE:
        report.tied = list(remaining)
    else:
        report.winner = match.winner
    return report
