"""Von Neumann-Morgenstern stable sets of a majority dominance relation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import HALF, HUNDRED, DominanceRelation, PairwiseMatrix, as_fraction, ensure_valid

DEFAULT_MAX_ALTERNATIVES = 24


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class StableSetResult:
    """All stable sets, each as a tuple of ids in alternative order.

    ``certificates[k]`` maps every alternative outside ``stable_sets[k]`` to
    the first member (in alternative order) that dominates it.
    """

    stable_sets: list[tuple[str, ...]]
    relation: DominanceRelation
    certificates: list[dict[str, str]]


def dominance_from_pairwise(matrix: PairwiseMatrix, threshold=HALF) -> DominanceRelation:
    threshold = as_fraction(threshold)
    if not 0 <= threshold < HUNDRED:
        raise ValueError(f"threshold must lie in [0, 100), got {threshold}")
    ensure_valid(matrix)
    ids = matrix.ids
    edges = {(x, y) for x in ids for y in ids if x != y and matrix[(x, y)] > threshold}
    return DominanceRelation(matrix.alternatives, frozenset(edges))


def _members(s: Iterable[str], rel: DominanceRelation) -> list[str]:
    s = list(s)
    known = set(rel.ids)
    unknown = [x for x in s if x not in known]
    if unknown:
        raise KeyError(f"unknown alternative(s): {', '.join(unknown)}")
    return s


def is_internally_stable(s: Iterable[str], rel: DominanceRelation) -> bool:
    s = _members(s, rel)
    return not any(rel.dominates(x, y) for x in s for y in s)


def is_externally_stable(s: Iterable[str], rel: DominanceRelation) -> tuple[bool, dict[str, str]]:
    """Whether every outsider is dominated by a member, with one witness each.

    Witnesses cover only the outsiders that do have a dominating member.
    """
    inside = set(_members(s, rel))
    witnesses = {}
    ok = True
    for y in rel.ids:
        if y in inside:
            continue
        x = next((x for x in rel.ids if x in inside and rel.dominates(x, y)), None)
        if x is None:
            ok = False
        else:
            witnesses[y] = x
    return ok, witnesses


def enumerate_stable_sets(
    rel: DominanceRelation, max_alternatives: int = DEFAULT_MAX_ALTERNATIVES
) -> StableSetResult:
    """Every subset that is both internally and externally stable.

    Exact search over subsets as bitmasks.  Branches are cut when a member
    would dominate another member, or when an excluded alternative can no
    longer be dominated by anything still allowed into the set.
    """
    ids = rel.ids
    n = len(ids)
    if n > max_alternatives:
        raise InstanceTooLarge(f"{n} alternatives exceeds the cap of {max_alternatives}")
    idx = {a: i for i, a in enumerate(ids)}
    # beats[i]: bitmask of j with i -> j; beaten_by[j]: bitmask of i with i -> j.
    beats = [0] * n
    beaten_by = [0] * n
    for x, y in rel.edges:
        if x == y or x not in idx or y not in idx:
            continue
        beats[idx[x]] |= 1 << idx[y]
        beaten_by[idx[y]] |= 1 << idx[x]
    conflict = [beats[i] | beaten_by[i] for i in range(n)]
    full = (1 << n) - 1
    found: list[int] = []

    def search(k: int, chosen: int, banned: int, excluded: int) -> None:
        # banned: alternatives that can no longer join (conflict or excluded).
        allowed = full & ~banned
        for j in range(n):
            if excluded >> j & 1 and not (beaten_by[j] & (chosen | (allowed & ~((1 << k) - 1)))):
                return
        if k == n:
            found.append(chosen)
            return
        bit = 1 << k
        if not banned & bit and not beats[k] & bit:
            search(k + 1, chosen | bit, banned | conflict[k], excluded)
        search(k + 1, chosen, banned | bit, excluded | bit)

    search(0, 0, 0, 0)

    sets, certs = [], []
    for mask in sorted(found, key=lambda m: (bin(m).count("1"), [-(m >> i & 1) for i in range(n)])):
        members = tuple(ids[i] for i in range(n) if mask >> i & 1)
        sets.append(members)
        certs.append(is_externally_stable(members, rel)[1])
    return StableSetResult(sets, rel, certs)
