import pytest
from hypothesis import given
from hypothesis import strategies as st

from govlab.dynamics import (
    CLOSED_FORM_FAMILIES,
    RULE_3Z,
    RULE_5Z,
    OrbitLimits,
    Rule,
    StepKind,
    TerminationKind,
    check_closed_form,
    eval_closed_form,
    even_step,
    find_promotions,
    governor_trace,
    next_odd,
    odd_step,
    orbit,
    rule_for,
    verify_descent,
)
from govlab.numerics import governor_index, v2

odd_values = st.integers(min_value=0, max_value=(1 << 256) - 1).map(lambda n: 2 * n + 1)
rules = st.sampled_from([RULE_3Z, RULE_5Z])

GENEROUS = OrbitLimits(max_steps=10**6, max_value_bits=4096)


class TestRule:
    def test_constants(self):
        assert RULE_3Z.trivial_cycle == (1, 4, 2)
        assert RULE_3Z.trivial_indices == frozenset({1})
        assert RULE_3Z.descent_delta == 1
        assert RULE_5Z.trivial_cycle == (1, 6, 3, 16, 8, 4, 2)
        assert RULE_5Z.trivial_indices == frozenset({1, 2})
        assert RULE_5Z.descent_delta == 2

    def test_lookup(self):
        assert rule_for(3) is RULE_3Z
        assert rule_for(5) is RULE_5Z
        with pytest.raises(ValueError):
            rule_for(7)

    def test_cycle_replay_validation(self):
        with pytest.raises(ValueError):
            Rule(3, frozenset({1}), (1, 4, 3))
        with pytest.raises(ValueError):
            Rule(3, frozenset({2}), (1, 4, 2))
        with pytest.raises(ValueError):
            Rule(4, frozenset({1}), (1, 4, 2))


class TestSteps:
    def test_odd_step_examples(self):
        assert odd_step(7, RULE_3Z) == 22
        assert odd_step(1, RULE_3Z) == 4
        assert odd_step(9, RULE_5Z) == 46

    def test_even_step_examples(self):
        assert even_step(22) == 11
        assert even_step(4) == 2
        assert even_step(46) == 23

    def test_parity_guards(self):
        with pytest.raises(ValueError):
            odd_step(4, RULE_3Z)
        with pytest.raises(ValueError):
            even_step(7)

    @given(odd_values, rules)
    def test_odd_step_result_even(self, x, rule):
        assert odd_step(x, rule) % 2 == 0


class TestNextOdd:
    def test_examples(self):
        assert next_odd(7, RULE_3Z) == (11, 1)
        assert next_odd(1, RULE_3Z) == (1, 2)
        assert next_odd(35, RULE_5Z) == (11, 4)

    @given(odd_values, rules)
    def test_consistent_with_single_steps(self, x, rule):
        u, k = next_odd(x, rule)
        cur = odd_step(x, rule)
        for _ in range(k):
            cur = even_step(cur)
        assert cur == u
        assert u % 2 == 1
        assert k == v2(odd_step(x, rule))


class TestOrbit:
    def test_reaches_trivial(self):
        trace = orbit(27, RULE_3Z, GENEROUS)
        assert trace.termination.kind is TerminationKind.REACHED_TRIVIAL_CYCLE
        assert trace.steps[-1][0] in RULE_3Z.trivial_members

    def test_trace_step_consistency(self):
        trace = orbit(27, RULE_3Z, GENEROUS)
        values = [v for v, _ in trace.steps]
        for a, b in zip(values, values[1:]):
            assert b == (3 * a + 1 if a % 2 else a // 2)
        for v, kind in trace.steps:
            assert kind is (StepKind.O if v % 2 else StepKind.E)
        odd_seen = [(v, governor_index(v)) for v, _ in trace.steps if v % 2]
        assert list(trace.odd_governors) == odd_seen

    def test_enters_cycle(self):
        trace = orbit(13, RULE_5Z, GENEROUS)
        assert trace.termination.kind is TerminationKind.ENTERED_CYCLE
        odds = {v for v in trace.termination.cycle_members if v % 2}
        assert odds == {13, 33, 83}

    def test_value_limit(self):
        trace = orbit(7, RULE_5Z, OrbitLimits(max_steps=10**6, max_value_bits=64))
        assert trace.termination.kind is TerminationKind.VALUE_LIMIT
        assert trace.steps[-1][0].bit_length() > 64

    def test_step_limit(self):
        trace = orbit(27, RULE_3Z, OrbitLimits(max_steps=5, max_value_bits=4096))
        assert trace.termination.kind is TerminationKind.STEP_LIMIT
        assert len(trace.steps) == 6

    def test_trivial_member_seed_stops_immediately(self):
        trace = orbit(1, RULE_3Z, GENEROUS)
        assert trace.termination.kind is TerminationKind.REACHED_TRIVIAL_CYCLE
        assert trace.steps == ((1, StepKind.O),)

    def test_determinism(self):
        a = orbit(97, RULE_5Z, OrbitLimits(max_steps=500, max_value_bits=80))
        b = orbit(97, RULE_5Z, OrbitLimits(max_steps=500, max_value_bits=80))
        assert a == b

    def test_even_seed_rejected(self):
        with pytest.raises(ValueError):
            orbit(28, RULE_3Z, GENEROUS)


class TestGovernorTrace:
    def test_examples(self):
        assert governor_trace(63, RULE_3Z, 6) == [6, 5, 4, 3, 2, 1]
        assert governor_trace((1 << 9) - 1, RULE_5Z, 4) == [9, 7, 5, 3]
        assert governor_trace(1, RULE_3Z, 3) == [1, 1, 1]

    def test_length(self):
        assert len(governor_trace(9, RULE_5Z, 25)) == 25


class TestDescent:
    def test_examples(self):
        chk = verify_descent(27, RULE_3Z)
        assert (chk.expected_index, chk.observed_index, chk.passed) == (1, 1, True)
        chk = verify_descent(7, RULE_3Z)
        assert (chk.expected_index, chk.observed_index, chk.passed) == (2, 2, True)
        chk = verify_descent(127, RULE_5Z)
        assert (chk.expected_index, chk.observed_index, chk.passed) == (5, 5, True)
        assert chk.observed_even_steps == 2

    def test_precondition(self):
        with pytest.raises(ValueError):
            verify_descent(1, RULE_3Z)  # index 1 is trivial for 3Z+1
        with pytest.raises(ValueError):
            verify_descent(3, RULE_5Z)  # index 2 is trivial for 5Z+1

    @given(odd_values)
    def test_exact_descent_3z(self, x):
        if governor_index(x) >= 2:
            assert verify_descent(x, RULE_3Z).passed

    @given(odd_values)
    def test_exact_descent_5z(self, x):
        if governor_index(x) >= 3:
            assert verify_descent(x, RULE_5Z).passed

    @given(st.integers(min_value=3, max_value=256))
    def test_two_even_steps_after_trivial_form_3z(self, p):
        # from 2^P + 1 the odd step is followed by exactly two even steps
        assert v2(odd_step((1 << p) + 1, RULE_3Z)) == 2


class TestClosedForms:
    def test_eval_examples(self):
        assert dict(eval_closed_form("T1_3Z", 7))["E{3}"] == 431
        assert dict(eval_closed_form("T2_3Z", 5))["E^(2){m}"] == 25
        assert dict(eval_closed_form("T2_5Z_EVEN", 5))["E^(4){m/2}"] == 11

    def test_x_row_matches_param(self):
        assert dict(eval_closed_form("T1_5Z", 9))["X"] == (1 << 9) - 1
        assert dict(eval_closed_form("T2_5Z_EVEN", 8))["X"] == (1 << 8) + 3

    def test_range_rejection(self):
        for name, fam in CLOSED_FORM_FAMILIES.items():
            with pytest.raises(ValueError):
                eval_closed_form(name, fam.param_min - 1)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            eval_closed_form("T9_7Z", 10)

    @pytest.mark.parametrize(
        "family,lo,hi,rule",
        [
            ("T1_3Z", 5, 64, RULE_3Z),
            ("T1_5Z", 5, 64, RULE_5Z),
            ("T2_3Z", 3, 64, RULE_3Z),
            ("T2_5Z_ODD", 3, 64, RULE_5Z),
            ("T2_5Z_EVEN", 5, 64, RULE_5Z),
        ],
    )
    def test_no_mismatches_on_validity_range(self, family, lo, hi, rule):
        assert check_closed_form(family, lo, hi, rule) == []

    def test_rule_pairing_enforced(self):
        with pytest.raises(ValueError):
            check_closed_form("T1_3Z", 5, 10, RULE_5Z)


class TestPromotions:
    def test_construction_witness(self):
        promos = find_promotions(27, RULE_3Z, 5)
        assert any(
            p.source == 41 and p.target == 31 and p.old_index == 1 and p.new_index == 5
            for p in promos
        )

    def test_pure_descent_has_none(self):
        assert find_promotions((1 << 20) - 1, RULE_3Z, 19) == []

    def test_trivial_cycle_has_none(self):
        assert find_promotions(1, RULE_3Z, 10) == []
