"""Two-player zero-sum (constant-sum) matrix games.

Pure maximin/minimax analysis, expansion of a game in which one player
observes the other's move, exact solution of 2x2 games with payoff
envelopes, and fictitious play for larger games.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    MIXED_APPROXIMATE,
    MIXED_EXACT,
    PURE_SADDLE,
    GameSolution,
    MatrixGame,
    MixedStrategy,
    as_fraction,
    ensure_valid,
)

ROW, COLUMN = "row", "column"
ARROW = "→"

DEFAULT_EXPANSION_CAP = 4096
DEFAULT_TOLERANCE = Fraction(1, 10)
DEFAULT_MAX_ITERATIONS = 100_000


class ExpansionTooLarge(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """Fictitious play did not reach the tolerance within the iteration budget."""

    def __init__(self, lower: Fraction, upper: Fraction, iterations: int, tolerance: Fraction):
        self.lower, self.upper = lower, upper
        self.iterations, self.tolerance = iterations, tolerance
        super().__init__(
            f"no convergence after {iterations} iterations: value in [{lower}, {upper}], "
            f"gap {upper - lower} > tolerance {tolerance}"
        )


@dataclass(frozen=True)
class PureAnalysis:
    row_minima: tuple[Fraction, ...]
    col_maxima: tuple[Fraction, ...]
    maximin: Fraction
    maximin_rows: tuple[int, ...]
    minimax: Fraction
    minimax_cols: tuple[int, ...]
    saddle_points: tuple[tuple[int, int], ...]

    @property
    def has_saddle(self) -> bool:
        return bool(self.saddle_points)


@dataclass(frozen=True)
class InformationExpansion:
    base: MatrixGame
    informed: str
    expanded: MatrixGame
    # One dict per expanded strategy of the informed player: observed label -> response label.
    strategy_maps: tuple[dict[str, str], ...]


@dataclass(frozen=True)
class EnvelopePoint:
    parameter: Fraction
    best_response_value: Fraction
    active_pure_response: str
    is_breakpoint: bool = False


@dataclass(frozen=True)
class SolverConfig:
    tolerance: Fraction = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    expansion_cap: int = DEFAULT_EXPANSION_CAP

    def __post_init__(self):
        object.__setattr__(self, "tolerance", as_fraction(self.tolerance))


def pure_analysis(game: MatrixGame) -> PureAnalysis:
    ensure_valid(game)
    a = game.payoffs
    row_minima = tuple(min(row) for row in a)
    col_maxima = tuple(max(col) for col in zip(*a))
    maximin = max(row_minima)
    minimax = min(col_maxima)
    saddles = tuple(
        (i, j)
        for i, row in enumerate(a)
        for j, v in enumerate(row)
        if v == row_minima[i] and v == col_maxima[j]
    )
    return PureAnalysis(
        row_minima,
        col_maxima,
        maximin,
        tuple(i for i, v in enumerate(row_minima) if v == maximin),
        minimax,
        tuple(j for j, v in enumerate(col_maxima) if v == minimax),
        saddles,
    )


def strategy_label(observed: Sequence[str], responses: Sequence[str]) -> str:
    return ", ".join(f"{o}{ARROW}{r}" for o, r in zip(observed, responses))


def expand_one_sided_information(
    game: MatrixGame, informed: str = COLUMN, cap: int = DEFAULT_EXPANSION_CAP
) -> InformationExpansion:
    """Turn the informed player's moves into response rules.

    The informed player sees the opponent's pure strategy before moving, so
    each of its strategies becomes a map from observed opponent strategy to
    own response.  Maps are enumerated lexicographically by the responses
    to the opponent's strategies in order.
    """
    ensure_valid(game)
    if informed not in (ROW, COLUMN):
        raise ValueError(f"informed must be 'row' or 'column', got {informed!r}")
    m, n = game.shape
    if informed == COLUMN:
        observed, own, count = game.row_labels, game.col_labels, n ** m
    else:
        observed, own, count = game.col_labels, game.row_labels, m ** n
    if count > cap:
        raise ExpansionTooLarge(f"expansion would have {count} strategies, cap is {cap}")

    maps = list(itertools.product(range(len(own)), repeat=len(observed)))
    labels = [strategy_label(observed, [own[r] for r in f]) for f in maps]
    strategy_maps = tuple({observed[k]: own[r] for k, r in enumerate(f)} for f in maps)
    if informed == COLUMN:
        payoffs = [[game.payoffs[i][f[i]] for f in maps] for i in range(m)]
        expanded = MatrixGame(game.row_labels, labels, payoffs, game.constant_sum)
    else:
        payoffs = [[game.payoffs[f[j]][j] for j in range(n)] for f in maps]
        expanded = MatrixGame(labels, game.col_labels, payoffs, game.constant_sum)
    return InformationExpansion(game, informed, expanded, strategy_maps)


def _require_2x2(game: MatrixGame) -> None:
    ensure_valid(game)
    if game.shape != (2, 2):
        raise ValueError(f"expected a 2x2 game, got {game.shape[0]}x{game.shape[1]}")


def _check_probability(name: str, value: Fraction) -> Fraction:
    value = as_fraction(value)
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def expected_payoff(game: MatrixGame, p, q) -> Fraction:
    """Row player's expected payoff when row 1 is played with probability
    ``p`` and column 1 with probability ``q``."""
    _require_2x2(game)
    p = _check_probability("p", p)
    q = _check_probability("q", q)
    (a11, a12), (a21, a22) = game.payoffs
    return p * q * a11 + p * (1 - q) * a12 + (1 - p) * q * a21 + (1 - p) * (1 - q) * a22


def _crossing(f0: tuple[Fraction, Fraction], f1: tuple[Fraction, Fraction]) -> Optional[Fraction]:
    """Parameter in [0, 1] where two lines ``a + b*t`` meet, if any."""
    (a0, b0), (a1, b1) = f0, f1
    if b0 == b1:
        return None
    t = (a1 - a0) / (b0 - b1)
    return t if 0 <= t <= 1 else None


def _envelope_lines(game: MatrixGame, player: str):
    """Opponent pure replies as (label, intercept, slope) in the player's parameter."""
    (a11, a12), (a21, a22) = game.payoffs
    if player == ROW:
        # Payoff against column j as a function of p: a2j + (a1j - a2j) p.
        return [
            (game.col_labels[0], a21, a11 - a21),
            (game.col_labels[1], a22, a12 - a22),
        ]
    return [
        (game.row_labels[0], a12, a11 - a12),
        (game.row_labels[1], a22, a21 - a22),
    ]


def envelope_breakpoints(game: MatrixGame, player: str = ROW) -> list[Fraction]:
    _require_2x2(game)
    if player not in (ROW, COLUMN):
        raise ValueError(f"player must be 'row' or 'column', got {player!r}")
    (_, a0, b0), (_, a1, b1) = _envelope_lines(game, player)
    t = _crossing((a0, b0), (a1, b1))
    return [] if t is None else [t]


def payoff_envelope(game: MatrixGame, player: str = ROW, samples: int = 10) -> list[EnvelopePoint]:
    """Worst-case payoff curve for ``player`` against the opponent's pure replies.

    For the row player this is the lower envelope over p (opponent minimizes);
    for the column player the upper envelope over q (opponent maximizes),
    in row-player payoff units.  Points are taken at ``k / samples`` plus the
    exact crossing of the two reply lines; tied replies are joined with ``|``.
    """
    _require_2x2(game)
    if player not in (ROW, COLUMN):
        raise ValueError(f"player must be 'row' or 'column', got {player!r}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    lines = _envelope_lines(game, player)
    pick = min if player == ROW else max
    breaks = set(envelope_breakpoints(game, player))
    grid = sorted({Fraction(k, samples) for k in range(samples + 1)} | breaks)
    points = []
    for t in grid:
        values = [(label, a + b * t) for label, a, b in lines]
        best = pick(v for _, v in values)
        active = "|".join(label for label, v in values if v == best)
        points.append(EnvelopePoint(t, best, active, t in breaks))
    return points


def _with_column_value(game: MatrixGame, **kw) -> GameSolution:
    return GameSolution(column_value=game.column_payoff(kw["value"]), **kw)


def _pure_solution(game: MatrixGame, analysis: PureAnalysis) -> GameSolution:
    i, j = analysis.saddle_points[0]
    return _with_column_value(
        game,
        kind=PURE_SADDLE,
        row_strategy=MixedStrategy.pure(game.row_labels, i),
        col_strategy=MixedStrategy.pure(game.col_labels, j),
        value=game.payoffs[i][j],
        lower=game.payoffs[i][j],
        upper=game.payoffs[i][j],
    )


def solve_pure(game: MatrixGame) -> GameSolution:
    analysis = pure_analysis(game)
    if not analysis.has_saddle:
        raise ValueError(
            f"no saddle point: maximin {analysis.maximin} < minimax {analysis.minimax}"
        )
    return _pure_solution(game, analysis)


def solve_2x2_mixed(game: MatrixGame) -> GameSolution:
    """Exact solution of a 2x2 game.

    A saddle point is looked for first; only saddle-free games use the
    closed form, where the denominator is guaranteed non-zero.
    """
    _require_2x2(game)
    analysis = pure_analysis(game)
    if analysis.has_saddle:
        return _pure_solution(game, analysis)
    (a11, a12), (a21, a22) = game.payoffs
    d = a11 + a22 - a12 - a21
    p = (a22 - a21) / d
    q = (a22 - a12) / d
    v = (a11 * a22 - a12 * a21) / d
    return _with_column_value(
        game,
        kind=MIXED_EXACT,
        row_strategy=MixedStrategy(game.row_labels, (p, 1 - p)),
        col_strategy=MixedStrategy(game.col_labels, (q, 1 - q)),
        value=v,
        lower=v,
        upper=v,
    )


def _integer_payoffs(game: MatrixGame) -> tuple[list[list[int]], int]:
    scale = 1
    for row in game.payoffs:
        for v in row:
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return [[int(v * scale) for v in row] for row in game.payoffs], scale


def solve_fictitious_play(
    game: MatrixGame, tolerance=DEFAULT_TOLERANCE, max_iterations: int = DEFAULT_MAX_ITERATIONS
) -> GameSolution:
    """Approximate solution by alternating fictitious play.

    Each iteration the row player best-responds to the column player's
    empirical mixture, then the column player to the row player's updated
    one; ties go to the lowest index.  The lower bound is the best payoff
    guaranteed so far by either an empirical row mixture or a pure maximin
    row, the upper bound symmetrically for columns.  Both bounds bracket the
    true value, so the midpoint is within ``epsilon = (upper - lower) / 2``.
    """
    ensure_valid(game)
    tolerance = as_fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    a, scale = _integer_payoffs(game)
    m, n = game.shape
    cols = [list(c) for c in zip(*a)]

    analysis = pure_analysis(game)
    best_lower = analysis.maximin
    best_row = MixedStrategy.pure(game.row_labels, analysis.maximin_rows[0])
    best_upper = analysis.minimax
    best_col = MixedStrategy.pure(game.col_labels, analysis.minimax_cols[0])

    row_payoff = [0] * m  # row i against the column history
    col_payoff = [0] * n  # column j against the row history
    row_count = [0] * m
    col_count = [0] * n
    t = 0
    while best_upper - best_lower > tolerance:
        if t >= max_iterations:
            raise ConvergenceError(best_lower, best_upper, t, tolerance)
        t += 1
        i = row_payoff.index(max(row_payoff))
        row_count[i] += 1
        ai = a[i]
        for j in range(n):
            col_payoff[j] += ai[j]
        j = col_payoff.index(min(col_payoff))
        col_count[j] += 1
        cj = cols[j]
        for k in range(m):
            row_payoff[k] += cj[k]

        lower = Fraction(min(col_payoff), t * scale)
        if lower > best_lower:
            best_lower = lower
            best_row = MixedStrategy(game.row_labels, [Fraction(c, t) for c in row_count])
        upper = Fraction(max(row_payoff), t * scale)
        if upper < best_upper:
            best_upper = upper
            best_col = MixedStrategy(game.col_labels, [Fraction(c, t) for c in col_count])

    return _with_column_value(
        game,
        kind=MIXED_APPROXIMATE,
        row_strategy=best_row,
        col_strategy=best_col,
        value=(best_lower + best_upper) / 2,
        epsilon=(best_upper - best_lower) / 2,
        lower=best_lower,
        upper=best_upper,
        iterations=t,
    )


SOLVE_MODES = ("auto", "pure", "exact2x2", "iterative")


def solve(game: MatrixGame, mode: str = "auto", config: Optional[SolverConfig] = None) -> GameSolution:
    """Dispatch to a solver: pure saddle, 2x2 closed form, or fictitious play.

    ``auto`` picks the first that applies, in that order.
    """
    config = config or SolverConfig()
    if mode not in SOLVE_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(SOLVE_MODES)}")
    if mode == "pure":
        return solve_pure(game)
    if mode == "exact2x2":
        return solve_2x2_mixed(game)
    if mode == "iterative":
        return solve_fictitious_play(game, config.tolerance, config.max_iterations)
    analysis = pure_analysis(game)
    if analysis.has_saddle:
        return _pure_solution(game, analysis)
    if game.shape == (2, 2):
        return solve_2x2_mixed(game)
    return solve_fictitious_play(game, config.tolerance, config.max_iterations)


def row_guarantee(game: MatrixGame, strategy: MixedStrategy) -> Fraction:
    """Worst payoff of a row mixture over the column player's pure replies."""
    return min(
        sum((p * game.payoffs[i][j] for i, p in enumerate(strategy.probabilities)), Fraction(0))
        for j in range(game.shape[1])
    )


def column_cap(game: MatrixGame, strategy: MixedStrategy) -> Fraction:
    """Best row payoff against a column mixture over the row player's pure replies."""
    return max(
        sum((q * row[j] for j, q in enumerate(strategy.probabilities)), Fraction(0))
        for row in game.payoffs
    )
