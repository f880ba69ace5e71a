"""qZ+1 step functions, orbit generation, descent laws, and closed-form tables.

The two supported rules are 3Z+1 and 5Z+1.  An orbit alternates odd steps
(x -> q*x + 1) and even steps (x -> x / 2).  Tracking the governor index
(trailing-ones length) of each odd value exposes the exact descent law: above
the trivial range the index drops by v2(q - 1) per odd-to-odd transition,
with exactly v2(q - 1) even steps in between.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .numerics import governor_index, v2


class StepKind(enum.Enum):
    """Which step function applies to a value: O for odd, E for even."""

    O = "O"
    E = "E"


def step_kind_of(x: int) -> StepKind:
    return StepKind.O if x % 2 else StepKind.E


@dataclass(frozen=True)
class Rule:
    """A qZ+1 rule with its known repeating cycle.

    trivial_cycle is replayed at construction: odd members must take the odd
    step, even members the even step, and the last member must map to the
    first.  trivial_indices must equal the governor indices of the odd
    members.
    """

    multiplier: int
    trivial_indices: frozenset[int]
    trivial_cycle: tuple[int, ...]

    def __post_init__(self) -> None:
        q = self.multiplier
        if q % 2 == 0 or q < 3:
            raise ValueError(f"multiplier must be an odd integer >= 3, got {q}")
        cyc = self.trivial_cycle
        if not cyc:
            raise ValueError("trivial cycle must be nonempty")
        for i, x in enumerate(cyc):
            succ = cyc[(i + 1) % len(cyc)]
            expected = q * x + 1 if x % 2 else x // 2
            if succ != expected:
                raise ValueError(
                    f"trivial cycle not closed at position {i}: "
                    f"{x} steps to {expected}, cycle lists {succ}"
                )
        indices = frozenset(governor_index(x) for x in cyc if x % 2)
        if indices != self.trivial_indices:
            raise ValueError(
                f"trivial indices {set(self.trivial_indices)} disagree with "
                f"cycle odd members (indices {set(indices)})"
            )

    @property
    def descent_delta(self) -> int:
        """Exact per-transition index drop above the trivial range: v2(q - 1)."""
        return v2(self.multiplier - 1)

    @property
    def trivial_members(self) -> frozenset[int]:
        return frozenset(self.trivial_cycle)

    @property
    def trivial_odd_members(self) -> frozenset[int]:
        return frozenset(x for x in self.trivial_cycle if x % 2)

    @property
    def name(self) -> str:
        return f"{self.multiplier}Z+1"


RULE_3Z = Rule(multiplier=3, trivial_indices=frozenset({1}), trivial_cycle=(1, 4, 2))
RULE_5Z = Rule(
    multiplier=5,
    trivial_indices=frozenset({1, 2}),
    trivial_cycle=(1, 6, 3, 16, 8, 4, 2),
)

RULES = {3: RULE_3Z, 5: RULE_5Z}


def rule_for(multiplier: int) -> Rule:
    """Look up the rule for q in {3, 5}."""
    try:
        return RULES[multiplier]
    except KeyError:
        raise ValueError(f"unsupported multiplier {multiplier}; supported: 3, 5") from None


def odd_step(x: int, rule: Rule) -> int:
    """q*x + 1 for odd x; the result is always even."""
    if x % 2 == 0:
        raise ValueError(f"odd_step requires an odd value, got {x}")
    return rule.multiplier * x + 1


def even_step(x: int) -> int:
    """x / 2 for even x."""
    if x % 2:
        raise ValueError(f"even_step requires an even value, got {x}")
    return x // 2


def next_odd(x: int, rule: Rule) -> tuple[int, int]:
    """Accelerated odd-to-odd map: ((q*x + 1) / 2^k, k) with k = v2(q*x + 1)."""
    if x % 2 == 0:
        raise ValueError(f"next_odd requires an odd value, got {x}")
    t = rule.multiplier * x + 1
    k = (t & -t).bit_length() - 1
    return t >> k, k


@dataclass(frozen=True)
class OrbitLimits:
    """Bounds that turn an orbit into a finite computation.

    max_steps counts odd and even steps together; max_value_bits aborts the
    orbit when any produced value exceeds that bit length.
    """

    max_steps: int
    max_value_bits: int

    def __post_init__(self) -> None:
        if self.max_steps < 1 or self.max_value_bits < 1:
            raise ValueError("orbit limits must both be >= 1")


class TerminationKind(enum.Enum):
    REACHED_TRIVIAL_CYCLE = "reached_trivial_cycle"
    ENTERED_CYCLE = "entered_cycle"
    STEP_LIMIT = "step_limit"
    VALUE_LIMIT = "value_limit"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    # populated for ENTERED_CYCLE: the cycle members in orbit order,
    # starting from the first repeated value
    cycle_members: tuple[int, ...] | None = None


@dataclass(frozen=True)
class OrbitTrace:
    """Full record of an orbit under a rule.

    steps lists every value in order, starting with the seed, each tagged
    with the step kind that applies to it (so the kind string of the trace
    prefix reads as the orbit's O/E word).  odd_governors lists each odd
    value with its governor index in encounter order.
    """

    start: int
    rule_multiplier: int
    steps: tuple[tuple[int, StepKind], ...]
    odd_governors: tuple[tuple[int, int], ...]
    termination: Termination


def orbit(x: int, rule: Rule, limits: OrbitLimits) -> OrbitTrace:
    """Iterate the step functions from odd x, recording every value.

    Termination, checked in this order at each value: membership in the
    trivial cycle; the step budget; then after producing a value, the value
    bit cap and repetition of an earlier value.  Limit breaches terminate
    the trace; they are never errors.
    """
    if x % 2 == 0 or x < 1:
        raise ValueError(f"orbit requires a positive odd seed, got {x}")
    trivial = rule.trivial_members
    steps: list[tuple[int, StepKind]] = [(x, step_kind_of(x))]
    odd_governors: list[tuple[int, int]] = [(x, governor_index(x))]
    first_pos = {x: 0}
    cur = x
    taken = 0
    while True:
        if cur in trivial:
            term = Termination(TerminationKind.REACHED_TRIVIAL_CYCLE)
            break
        if taken == limits.max_steps:
            term = Termination(TerminationKind.STEP_LIMIT)
            break
        nxt = rule.multiplier * cur + 1 if cur % 2 else cur // 2
        taken += 1
        steps.append((nxt, step_kind_of(nxt)))
        if nxt % 2:
            odd_governors.append((nxt, governor_index(nxt)))
        if nxt.bit_length() > limits.max_value_bits:
            term = Termination(TerminationKind.VALUE_LIMIT)
            break
        if nxt in first_pos:
            members = tuple(v for v, _ in steps[first_pos[nxt] : len(steps) - 1])
            term = Termination(TerminationKind.ENTERED_CYCLE, cycle_members=members)
            break
        first_pos[nxt] = len(steps) - 1
        cur = nxt
    return OrbitTrace(
        start=x,
        rule_multiplier=rule.multiplier,
        steps=tuple(steps),
        odd_governors=tuple(odd_governors),
        termination=term,
    )


def governor_trace(x: int, rule: Rule, n_odd: int) -> list[int]:
    """Governor indices of the first n_odd odd values of the orbit, seed first.

    The odd-to-odd map is total, so the trace always has exactly n_odd
    entries for a valid odd seed.
    """
    if x % 2 == 0 or x < 1:
        raise ValueError(f"governor_trace requires a positive odd seed, got {x}")
    if n_odd < 1:
        raise ValueError(f"n_odd must be >= 1, got {n_odd}")
    out = [governor_index(x)]
    cur = x
    for _ in range(n_odd - 1):
        cur, _ = next_odd(cur, rule)
        out.append(governor_index(cur))
    return out


@dataclass(frozen=True)
class DescentCheck:
    """Result of auditing one odd-to-odd transition against the descent law."""

    start: int
    start_index: int
    expected_index: int
    observed_index: int
    expected_even_steps: int
    observed_even_steps: int
    passed: bool


def verify_descent(x: int, rule: Rule) -> DescentCheck:
    """Check the exact descent law at odd x with index above the trivial range.

    For 3Z+1 the next odd value must have index m - 1 after exactly one even
    step; for 5Z+1, index m - 2 after exactly two even steps.
    """
    m = governor_index(x)
    if m <= max(rule.trivial_indices):
        raise ValueError(
            f"descent law applies only above the trivial range: index {m} of {x} "
            f"is within {sorted(rule.trivial_indices)}"
        )
    delta = rule.descent_delta
    nxt, k = next_odd(x, rule)
    observed = governor_index(nxt)
    expected = m - delta
    return DescentCheck(
        start=x,
        start_index=m,
        expected_index=expected,
        observed_index=observed,
        expected_even_steps=delta,
        observed_even_steps=k,
        passed=(observed == expected and k == delta),
    )


# ---------------------------------------------------------------------------
# Closed-form families
# ---------------------------------------------------------------------------
#
# Each family gives the first rows of an orbit as exponent formulas in one
# parameter.  T1 families start from the all-ones value 2^m - 1 and exhibit
# pure descent; T2 families start from a trivial-governor value carrying one
# higher term 2^P and show how that term interacts.  The minimum parameter
# below is where the formulas stop colliding term-wise; smaller parameters
# are rejected rather than silently mis-verified.


@dataclass(frozen=True)
class ClosedFormRow:
    """One family row: the value predicted after applying `repeat` steps of
    `kind` to the previous row's value (kind is None for the X row)."""

    label: str
    value: int
    kind: StepKind | None = None
    repeat: int = 1


@dataclass(frozen=True)
class ClosedFormFamily:
    name: str
    rule_multiplier: int
    param_name: str
    param_min: int
    row_builder: object = field(repr=False)

    def start(self, param: int) -> int:
        return self.rows(param)[0].value

    def rows(self, param: int) -> list[ClosedFormRow]:
        if param < self.param_min:
            raise ValueError(
                f"{self.name} requires {self.param_name} >= {self.param_min}, got {param}"
            )
        return self.row_builder(param)  # type: ignore[operator]


_O = StepKind.O
_E = StepKind.E


def _t1_3z(m: int) -> list[ClosedFormRow]:
    return [
        ClosedFormRow("X", (1 << m) - 1),
        ClosedFormRow("O{1}", (1 << (m + 1)) + (1 << m) - 2, _O),
        ClosedFormRow("E{1}", (1 << m) + (1 << (m - 1)) - 1, _E),
        ClosedFormRow("O{2}", (1 << (m + 2)) + (1 << (m - 1)) - 2, _O),
        ClosedFormRow("E{2}", (1 << (m + 1)) + (1 << (m - 2)) - 1, _E),
        ClosedFormRow(
            "O{3}",
            (1 << (m + 2)) + (1 << (m + 1)) + (1 << (m - 1)) + (1 << (m - 2)) - 2,
            _O,
        ),
        ClosedFormRow(
            "E{3}",
            (1 << (m + 1)) + (1 << m) + (1 << (m - 2)) + (1 << (m - 3)) - 1,
            _E,
        ),
    ]


def _t1_5z(m: int) -> list[ClosedFormRow]:
    return [
        ClosedFormRow("X", (1 << m) - 1),
        ClosedFormRow("O{1}", (1 << (m + 2)) + (1 << m) - 4, _O),
        ClosedFormRow("E^(1){1}", (1 << (m + 1)) + (1 << (m - 1)) - 2, _E),
        ClosedFormRow("E^(2){1}", (1 << m) + (1 << (m - 2)) - 1, _E),
        ClosedFormRow("O{2}", (1 << (m + 2)) + (1 << (m + 1)) + (1 << (m - 2)) - 4, _O),
        ClosedFormRow("E^(1){2}", (1 << (m + 1)) + (1 << m) + (1 << (m - 3)) - 2, _E),
        ClosedFormRow("E^(2){2}", (1 << m) + (1 << (m - 1)) + (1 << (m - 4)) - 1, _E),
    ]


def _t2_3z(p: int) -> list[ClosedFormRow]:
    return [
        ClosedFormRow("X", (1 << p) + 1),
        ClosedFormRow("O{m}", (1 << (p + 1)) + (1 << p) + 4, _O),
        ClosedFormRow("E^(1){m}", (1 << p) + (1 << (p - 1)) + 2, _E),
        ClosedFormRow("E^(2){m}", (1 << (p - 1)) + (1 << (p - 2)) + 1, _E),
    ]


def _t2_5z_odd(p: int) -> list[ClosedFormRow]:
    return [
        ClosedFormRow("X", (1 << p) + 1),
        ClosedFormRow("O{(m+1)/2}", (1 << (p + 2)) + (1 << p) + 6, _O),
        ClosedFormRow("E{(m+1)/2}", (1 << (p + 1)) + (1 << (p - 1)) + 3, _E),
    ]


def _t2_5z_even(p: int) -> list[ClosedFormRow]:
    # only the fourth halving after the odd step is a listed row
    return [
        ClosedFormRow("X", (1 << p) + 3),
        ClosedFormRow("O{m/2}", (1 << (p + 2)) + (1 << p) + 16, _O),
        ClosedFormRow("E^(4){m/2}", (1 << (p - 2)) + (1 << (p - 4)) + 1, _E, repeat=4),
    ]


CLOSED_FORM_FAMILIES = {
    "T1_3Z": ClosedFormFamily("T1_3Z", 3, "m", 4, _t1_3z),
    "T1_5Z": ClosedFormFamily("T1_5Z", 5, "m", 5, _t1_5z),
    "T2_3Z": ClosedFormFamily("T2_3Z", 3, "P", 3, _t2_3z),
    "T2_5Z_ODD": ClosedFormFamily("T2_5Z_ODD", 5, "P", 3, _t2_5z_odd),
    "T2_5Z_EVEN": ClosedFormFamily("T2_5Z_EVEN", 5, "P", 5, _t2_5z_even),
}


def eval_closed_form(family: str, param: int) -> list[tuple[str, int]]:
    """Evaluate one family's rows at the given parameter.

    Returns (row label, predicted value) pairs, starting with the X row.
    Rejects parameters below the family's validity threshold.
    """
    try:
        fam = CLOSED_FORM_FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown closed-form family {family!r}; "
            f"known: {sorted(CLOSED_FORM_FAMILIES)}"
        ) from None
    return [(row.label, row.value) for row in fam.rows(param)]


@dataclass(frozen=True)
class ClosedFormMismatch:
    family: str
    param: int
    label: str
    predicted: int
    actual: int
    reason: str


def check_closed_form(
    family: str, param_lo: int, param_hi: int, rule: Rule
) -> list[ClosedFormMismatch]:
    """Replay each family row against the literal step functions.

    The oracle is direct iteration: starting from the X row, each successive
    row must be produced by the step dictated by the current value's parity,
    and that step's kind must agree with the row label.  Returns all
    mismatches over param_lo..param_hi inclusive (an empty list means the
    formulas are exact on that range).
    """
    fam = CLOSED_FORM_FAMILIES.get(family)
    if fam is None:
        raise ValueError(f"unknown closed-form family {family!r}")
    if fam.rule_multiplier != rule.multiplier:
        raise ValueError(
            f"{family} is a {fam.rule_multiplier}Z+1 family, got rule {rule.name}"
        )
    mismatches: list[ClosedFormMismatch] = []
    for param in range(param_lo, param_hi + 1):
        rows = fam.rows(param)
        cur = rows[0].value
        for row in rows[1:]:
            bad_kind = False
            for _ in range(row.repeat):
                if step_kind_of(cur) is not row.kind:
                    mismatches.append(
                        ClosedFormMismatch(
                            family, param, row.label, row.value, cur,
                            f"row expects an {row.kind.value} step but the value "
                            f"{cur} takes an {step_kind_of(cur).value} step",
                        )
                    )
                    bad_kind = True
                    break
                cur = odd_step(cur, rule) if cur % 2 else even_step(cur)
            if bad_kind:
                break
            if cur != row.value:
                mismatches.append(
                    ClosedFormMismatch(family, param, row.label, row.value, cur, "value")
                )
                break
    return mismatches


@dataclass(frozen=True)
class Promotion:
    """An odd-to-odd transition whose governor index strictly increases."""

    source: int
    target: int
    old_index: int
    new_index: int


def find_promotions(x: int, rule: Rule, horizon: int) -> list[Promotion]:
    """Scan up to horizon odd-to-odd transitions for index increases."""
    if x % 2 == 0 or x < 1:
        raise ValueError(f"find_promotions requires a positive odd seed, got {x}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    out: list[Promotion] = []
    cur = x
    m = governor_index(cur)
    for _ in range(horizon):
        nxt, _ = next_odd(cur, rule)
        m_next = governor_index(nxt)
        if m_next > m:
            out.append(Promotion(source=cur, target=nxt, old_index=m, new_index=m_next))
        cur, m = nxt, m_next
    return out
