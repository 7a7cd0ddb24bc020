"""Shared value types for preference, dominance and matrix-game analysis.

Every number is a :class:`fractions.Fraction`.  Objects are frozen after
construction and are never checked on the way in: call :func:`validate` to
list invariant violations, or :func:`ensure_valid` to raise on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Sequence

HUNDRED = Fraction(100)
HALF = Fraction(50)


class ValidationError(ValueError):
    """Raised when an object breaks one or more type invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def as_fraction(value: Any) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and strings such as ``"45"``, ``"4/5"`` or
    ``"0.8"``.  Floats and bools are rejected because they would silently
    carry binary rounding into exact results.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"expected an exact rational, got {type(value).__name__} {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational number: {value!r}") from None
    raise TypeError(f"expected an exact rational, got {type(value).__name__} {value!r}")


def format_fraction(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Alternative:
    id: str
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.id


def _ids(alternatives: Iterable[Alternative]) -> tuple[str, ...]:
    return tuple(a.id for a in alternatives)


def _alternative_violations(where: str, alternatives: Sequence[Alternative]) -> list[str]:
    out = []
    seen = set()
    if not alternatives:
        out.append(f"{where}: no alternatives")
    for i, alt in enumerate(alternatives):
        if not alt.id:
            out.append(f"{where}[{i}].id: empty id")
        elif any(ch.isspace() for ch in alt.id):
            out.append(f"{where}[{i}].id: id {alt.id!r} contains whitespace")
        if alt.id in seen:
            out.append(f"{where}[{i}].id: duplicate id {alt.id!r}")
        seen.add(alt.id)
    return out


@dataclass(frozen=True)
class PreferenceGroup:
    weight: Fraction
    ranking: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "ranking", tuple(self.ranking))


@dataclass(frozen=True)
class WeightedPreferenceProfile:
    """Weighted strict rankings over a fixed list of alternatives.

    Weights are percentages of the electorate.  They need not sum to 100;
    shares are always taken relative to the listed total.
    """

    alternatives: tuple[Alternative, ...]
    groups: tuple[PreferenceGroup, ...]

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        groups = tuple(
            g if isinstance(g, PreferenceGroup) else PreferenceGroup(*g) for g in self.groups
        )
        object.__setattr__(self, "groups", groups)

    @property
    def ids(self) -> tuple[str, ...]:
        return _ids(self.alternatives)

    @property
    def total_weight(self) -> Fraction:
        return sum((g.weight for g in self.groups), Fraction(0))


@dataclass(frozen=True)
class PairwiseMatrix:
    """Percent support ``support[(x, y)]`` for x over y, for every ordered pair."""

    alternatives: tuple[Alternative, ...]
    support: Mapping[tuple[str, str], Fraction]

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        frozen = {tuple(k): as_fraction(v) for k, v in dict(self.support).items()}
        object.__setattr__(self, "support", MappingProxyType(frozen))

    @property
    def ids(self) -> tuple[str, ...]:
        return _ids(self.alternatives)

    def __getitem__(self, pair: tuple[str, str]) -> Fraction:
        return self.support[pair]

    def alternative(self, id_: str) -> Alternative:
        for alt in self.alternatives:
            if alt.id == id_:
                return alt
        raise KeyError(id_)

    def restrict(self, ids: Sequence[str]) -> "PairwiseMatrix":
        keep = [self.alternative(i) for i in ids]
        support = {(x, y): self.support[(x, y)] for x in ids for y in ids if x != y}
        return PairwiseMatrix(tuple(keep), support)


@dataclass(frozen=True)
class DominanceRelation:
    alternatives: tuple[Alternative, ...]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))

    @property
    def ids(self) -> tuple[str, ...]:
        return _ids(self.alternatives)

    def dominates(self, x: str, y: str) -> bool:
        return (x, y) in self.edges

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = {a: i for i, a in enumerate(self.ids)}
        return sorted(self.edges, key=lambda e: (pos.get(e[0], -1), pos.get(e[1], -1)))


@dataclass(frozen=True)
class MatrixGame:
    """Row player's payoffs; the column player gets ``constant_sum - payoff``
    (or ``-payoff`` when no constant sum is given)."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]
    constant_sum: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        object.__setattr__(
            self, "payoffs", tuple(tuple(as_fraction(v) for v in row) for row in self.payoffs)
        )
        if self.constant_sum is not None:
            object.__setattr__(self, "constant_sum", as_fraction(self.constant_sum))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.payoffs), len(self.payoffs[0]) if self.payoffs else 0

    def column_payoff(self, value: Fraction) -> Fraction:
        total = self.constant_sum if self.constant_sum is not None else Fraction(0)
        return total - value

    def transposed(self) -> "MatrixGame":
        """The same game seen from the column player's side."""
        m, n = self.shape
        payoffs = [[self.column_payoff(self.payoffs[i][j]) for i in range(m)] for j in range(n)]
        return MatrixGame(self.col_labels, self.row_labels, payoffs, self.constant_sum)


@dataclass(frozen=True)
class MixedStrategy:
    labels: tuple[str, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probabilities", tuple(as_fraction(p) for p in self.probabilities))

    @classmethod
    def pure(cls, labels: Sequence[str], index: int) -> "MixedStrategy":
        return cls(tuple(labels), tuple(Fraction(int(i == index)) for i in range(len(labels))))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.labels, self.probabilities))


PURE_SADDLE = "pure-saddle"
MIXED_EXACT = "mixed-exact"
MIXED_APPROXIMATE = "mixed-approximate"
SOLUTION_KINDS = (PURE_SADDLE, MIXED_EXACT, MIXED_APPROXIMATE)


@dataclass(frozen=True)
class GameSolution:
    """Optimal or near-optimal strategies for a matrix game.

    ``epsilon`` bounds the distance between ``value`` and the true game
    value; it is zero for exact solutions.  ``lower`` and ``upper`` are the
    payoffs guaranteed by ``row_strategy`` and capped by ``col_strategy``.
    """

    kind: str
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    value: Fraction
    epsilon: Fraction = Fraction(0)
    column_value: Optional[Fraction] = None
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    iterations: Optional[int] = None


def _profile_violations(p: WeightedPreferenceProfile) -> list[str]:
    out = _alternative_violations("alternatives", p.alternatives)
    ids = set(p.ids)
    if not p.groups:
        out.append("groups: no groups")
    for i, g in enumerate(p.groups):
        if g.weight < 0:
            out.append(f"groups[{i}].weight: negative weight {g.weight}")
        if len(g.ranking) != len(set(g.ranking)) or set(g.ranking) != ids:
            missing = sorted(ids - set(g.ranking))
            extra = sorted(set(g.ranking) - ids)
            detail = []
            if missing:
                detail.append(f"missing {', '.join(missing)}")
            if extra:
                detail.append(f"unknown {', '.join(extra)}")
            if len(g.ranking) != len(set(g.ranking)):
                detail.append("repeated ids")
            out.append(f"groups[{i}].ranking: not a permutation of the alternatives ({'; '.join(detail)})")
    if p.groups and not any(g.weight > 0 for g in p.groups):
        out.append("groups: total weight is zero")
    return out


def _pairwise_violations(m: PairwiseMatrix) -> list[str]:
    out = _alternative_violations("alternatives", m.alternatives)
    ids = m.ids
    known = set(ids)
    for (x, y), v in m.support.items():
        if x == y:
            out.append(f"support[{x}][{y}]: diagonal entry")
        elif x not in known or y not in known:
            out.append(f"support[{x}][{y}]: unknown alternative")
        elif not 0 <= v <= HUNDRED:
            out.append(f"support[{x}][{y}]: {v} outside [0, 100]")
    for i, x in enumerate(ids):
        for y in ids[i + 1:]:
            a, b = m.support.get((x, y)), m.support.get((y, x))
            if a is None or b is None:
                mx, my = (x, y) if a is None else (y, x)
                out.append(f"support[{mx}][{my}]: missing entry")
            elif a + b != HUNDRED:
                out.append(f"support[{x}][{y}]: complement violated, {a} + {b} != 100")
    return out


def _dominance_violations(r: DominanceRelation) -> list[str]:
    out = _alternative_violations("alternatives", r.alternatives)
    known = set(r.ids)
    for x, y in r.sorted_edges():
        if x == y:
            out.append(f"edges: reflexive edge {x}->{x}")
        elif x not in known or y not in known:
            out.append(f"edges: unknown alternative in {x}->{y}")
        elif (y, x) in r.edges and r.ids.index(x) < r.ids.index(y):
            out.append(f"edges: both {x}->{y} and {y}->{x} present")
    return out


def _game_violations(g: MatrixGame) -> list[str]:
    out = []
    if not g.payoffs or not g.payoffs[0]:
        out.append("payoffs: empty matrix")
        return out
    if len(g.payoffs) != len(g.row_labels):
        out.append(f"payoffs: {len(g.payoffs)} rows but {len(g.row_labels)} row labels")
    for i, row in enumerate(g.payoffs):
        if len(row) != len(g.col_labels):
            out.append(f"payoffs[{i}]: {len(row)} entries but {len(g.col_labels)} column labels")
    for name, labels in (("row_labels", g.row_labels), ("col_labels", g.col_labels)):
        if len(set(labels)) != len(labels):
            out.append(f"{name}: duplicate labels")
    return out


def _strategy_violations(s: MixedStrategy, where: str = "strategy") -> list[str]:
    out = []
    if len(s.labels) != len(s.probabilities):
        out.append(f"{where}: {len(s.probabilities)} probabilities for {len(s.labels)} labels")
    for label, p in zip(s.labels, s.probabilities):
        if p < 0:
            out.append(f"{where}[{label}]: negative probability {p}")
    total = sum(s.probabilities, Fraction(0))
    if total != 1:
        out.append(f"{where}: probabilities sum to {total}, not 1")
    return out


def _solution_violations(s: GameSolution, game: Optional[MatrixGame]) -> list[str]:
    out = []
    if s.kind not in SOLUTION_KINDS:
        out.append(f"kind: unknown kind {s.kind!r}")
    out += _strategy_violations(s.row_strategy, "row_strategy")
    out += _strategy_violations(s.col_strategy, "col_strategy")
    if s.epsilon < 0:
        out.append(f"epsilon: negative {s.epsilon}")
    if s.kind in (PURE_SADDLE, MIXED_EXACT) and s.epsilon != 0:
        out.append(f"epsilon: exact solution with epsilon {s.epsilon}")
    if game is not None and not _game_violations(game):
        lo = max(min(row) for row in game.payoffs)
        hi = min(max(col) for col in zip(*game.payoffs))
        if not lo <= s.value <= hi:
            out.append(f"value: {s.value} outside [maximin {lo}, minimax {hi}]")
    return out


def validate(obj: Any, game: Optional[MatrixGame] = None) -> list[str]:
    """Return a list of invariant violations; empty when ``obj`` is valid.

    ``game`` is only consulted for a :class:`GameSolution`, whose value must
    lie between the game's pure maximin and minimax.
    """
    if isinstance(obj, WeightedPreferenceProfile):
        return _profile_violations(obj)
    if isinstance(obj, PairwiseMatrix):
        return _pairwise_violations(obj)
    if isinstance(obj, DominanceRelation):
        return _dominance_violations(obj)
    if isinstance(obj, MatrixGame):
        return _game_violations(obj)
    if isinstance(obj, MixedStrategy):
        return _strategy_violations(obj)
    if isinstance(obj, GameSolution):
        return _solution_violations(obj, game)
    if isinstance(obj, Alternative):
        return _alternative_violations("alternative", [obj])
    raise TypeError(f"cannot validate {type(obj).__name__}")


def ensure_valid(obj: Any) -> None:
    violations = validate(obj)
    if violations:
        raise ValidationError(violations)
