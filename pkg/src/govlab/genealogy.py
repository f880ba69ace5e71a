"""Preimage enumeration for qZ+1 dynamics and the odd-ancestor condition solver.

An odd a is an ancestor of odd x at i doublings when q*a + 1 = 2^i * x: the
orbit of a reaches x through one odd step and exactly i even steps.  The
condition solver reproduces, by bounded exhaustive search, the small solution
sets for which q*(2^mu - 1) + 1 collapses to one, two, or three adjacent
powers of two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .dynamics import Rule
from .numerics import governor_index


class AncestorEntry(NamedTuple):
    doublings: int
    ancestor: int


def even_ancestor(x: int, i: int) -> int:
    """The even ancestor 2^i * x (i >= 1)."""
    if i < 1:
        raise ValueError(f"doubling count must be >= 1, got {i}")
    return x << i


def odd_ancestors(x: int, rule: Rule, max_doublings: int) -> list[AncestorEntry]:
    """All (i, a) with q*a + 1 = 2^i * x and 1 <= i <= max_doublings, ascending in i.

    For i >= 1 the quotient (2^i * x - 1) / q is odd whenever it is integral
    (q*a + 1 even forces a odd), so divisibility is the whole test; the
    oddness is asserted rather than filtered.
    """
    if x % 2 == 0 or x < 1:
        raise ValueError(f"odd_ancestors requires a positive odd integer, got {x}")
    if max_doublings < 1:
        raise ValueError(f"max_doublings must be >= 1, got {max_doublings}")
    q = rule.multiplier
    out: list[AncestorEntry] = []
    for i in range(1, max_doublings + 1):
        t = (x << i) - 1
        if t % q == 0:
            a = t // q
            assert a % 2 == 1
            out.append(AncestorEntry(doublings=i, ancestor=a))
    return out


@dataclass(frozen=True)
class AncestorNode:
    """A node of the bounded ancestor tree.

    trivial_governor marks whether the node's governor index belongs to the
    rule's trivial index set.
    """

    value: int
    governor_index: int
    trivial_governor: bool
    children: tuple["AncestorNode", ...]


def ancestor_tree(x: int, rule: Rule, depth: int, max_doublings: int) -> AncestorNode:
    """Recursively enumerate odd ancestors to the given depth.

    Values are unique within a level (each odd value has a single odd
    descendant one odd step away, so two parents cannot share a child), but
    a value may legitimately recur at different depths; no cross-level
    pruning is applied.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")

    def build(value: int, level: int) -> AncestorNode:
        if level < depth:
            children = tuple(
                build(entry.ancestor, level + 1)
                for entry in odd_ancestors(value, rule, max_doublings)
            )
        else:
            children = ()
        m = governor_index(value)
        return AncestorNode(
            value=value,
            governor_index=m,
            trivial_governor=m in rule.trivial_indices,
            children=children,
        )

    return build(x, 0)


@dataclass(frozen=True)
class ConditionSolution:
    """A solution of q*(2^mu - 1) + 1 = (2^2 + 2^1 + 2^0 | 2^1 + 2^0 | 2^0) * 2^i."""

    term_count: int
    mu: int
    i: int


_RHS_ODD_PART = {3: 7, 2: 3, 1: 1}


def condition_equation_sides(rule: Rule, sol: ConditionSolution) -> tuple[int, int]:
    """Left and right side values of a solution's defining equation."""
    lhs = rule.multiplier * ((1 << sol.mu) - 1) + 1
    rhs = _RHS_ODD_PART[sol.term_count] << sol.i
    return lhs, rhs


def solve_ancestor_conditions(
    rule: Rule, mu_max: int, i_max: int
) -> list[ConditionSolution]:
    """Exhaustive grid search for odd-ancestor existence conditions.

    For every 1 <= mu <= mu_max and 1 <= i <= i_max, tests whether
    q*(2^mu - 1) + 1 equals 2^(i+2) + 2^(i+1) + 2^i (three terms),
    2^(i+1) + 2^i (two terms), or 2^i (one term).  Both sides grow
    exponentially, so any solutions sit at tiny indices; the default bound
    of 64 in callers is a bounded verification, not a proof.
    """
    if mu_max < 1 or i_max < 1:
        raise ValueError("search bounds must both be >= 1")
    q = rule.multiplier
    out: list[ConditionSolution] = []
    for term_count in (1, 2, 3):
        odd_part = _RHS_ODD_PART[term_count]
        for mu in range(1, mu_max + 1):
            lhs = q * ((1 << mu) - 1) + 1
            for i in range(1, i_max + 1):
                if lhs == odd_part << i:
                    out.append(ConditionSolution(term_count=term_count, mu=mu, i=i))
    out.sort(key=lambda s: (s.term_count, s.mu, s.i))
    return out
