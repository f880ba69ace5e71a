"""Shared brute-force oracles for the test suite.

These deliberately avoid the fast paths under test: classification is read
off the full step-by-step orbit, and cycle replay applies the raw step
functions one value at a time.
"""

from __future__ import annotations

from govlab.cycles import canonical_cycle
from govlab.dynamics import OrbitLimits, Rule, TerminationKind, orbit


def classify_by_orbit(x: int, rule: Rule, limits: OrbitLimits):
    """Reference outcome tuple derived from the full orbit trace.

    Returns (tag, canonical_cycle_members_or_None, steps_taken, peak_bits)
    where tag is one of "converged_trivial", "cycle", "step_limit",
    "value_limit".
    """
    trace = orbit(x, rule, limits)
    steps_taken = len(trace.steps) - 1
    peak_bits = max(v.bit_length() for v, _ in trace.steps)
    kind = trace.termination.kind
    if kind is TerminationKind.REACHED_TRIVIAL_CYCLE:
        return ("converged_trivial", None, steps_taken, peak_bits)
    if kind is TerminationKind.ENTERED_CYCLE:
        record = canonical_cycle(trace.termination.cycle_members, rule)
        return ("cycle", record.all_members, steps_taken, peak_bits)
    return (kind.value, None, steps_taken, peak_bits)


def replay_cycle_closed(members, rule: Rule) -> bool:
    """Check closure of a member list by raw stepping, without canonical_cycle."""
    n = len(members)
    if n == 0:
        return False
    for i, v in enumerate(members):
        nxt = rule.multiplier * v + 1 if v % 2 else v // 2
        if nxt != members[(i + 1) % n]:
            return False
    return True
