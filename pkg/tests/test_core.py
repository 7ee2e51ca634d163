"""Symbols, histories, distributions, specs."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlxlate.core import (
    AlternationViolation,
    Distribution,
    FrameworkSpec,
    History,
    NotDeterministic,
    OddLength,
    Orientation,
    OrientationMismatch,
    SchemaError,
    UnknownSymbol,
    Universe,
    empty_history,
    frac_from_str,
    frac_to_str,
    histories_of_length,
    histories_up_to,
    history_reward,
    local_reverse,
    validate_history,
)

# ==== universe ====


def test_universe_requires_two_actions():
    with pytest.raises(SchemaError):
        Universe.make(("a0",), ("n",), {"n": 0})


def test_universe_requires_disjoint_symbols():
    with pytest.raises(SchemaError):
        Universe.make(("a0", "n"), ("n",), {"n": 0})


def test_universe_rewards_must_cover_percepts():
    with pytest.raises(SchemaError):
        Universe.make(("a0", "a1"), ("n", "r"), {"n": 0})


def test_universe_reward_lookup(u3):
    assert u3.reward("r") == 1
    assert u3.reward("n0") == 0
    assert set(u3.zero_reward_percepts()) == {"n0", "n1"}
    assert u3.unit_reward_percepts() == ("r",)
    assert u3.percepts_with_reward(Fraction(1)) == ("r",)


def test_universe_json_round_trip(u3):
    assert Universe.from_json(u3.to_json()) == u3


# ==== fractions as strings ====


def test_frac_round_trip():
    for s in ("0", "1", "-3/4", "7/2"):
        assert frac_to_str(frac_from_str(s)) == s


def test_frac_rejects_garbage():
    with pytest.raises(SchemaError):
        frac_from_str("0.5x")


@given(st.fractions())
@settings(max_examples=60, deadline=None)
def test_frac_round_trip_property(q):
    assert frac_from_str(frac_to_str(q)) == q


# ==== histories ====


def test_turn_parity_agent_first(u3):
    h = empty_history(Orientation.AGENT_FIRST)
    assert h.is_agent_turn() and not h.is_env_turn()
    h1 = h.append("a0")
    assert h1.is_env_turn()
    assert h1.append("r").is_agent_turn()


def test_turn_parity_percept_first(u3):
    h = empty_history(Orientation.PERCEPT_FIRST)
    assert h.is_env_turn()
    assert h.append("n0").is_agent_turn()


def test_validate_history_catches_misplaced_symbols(u3):
    with pytest.raises(OrientationMismatch):
        validate_history(("n0",), u3, Orientation.AGENT_FIRST)
    with pytest.raises(AlternationViolation):
        validate_history(("a0", "a1"), u3, Orientation.AGENT_FIRST)
    with pytest.raises(UnknownSymbol):
        validate_history(("zz",), u3, Orientation.AGENT_FIRST)
    validate_history(("a0", "r", "a1"), u3, Orientation.AGENT_FIRST)


def test_prefix_relation():
    h = History(("a0", "r", "a1", "n0"), Orientation.AGENT_FIRST)
    assert h.prefix(2).is_prefix_of(h)
    assert h.prefix(2).is_prefix_of(h, proper=True)
    assert h.is_prefix_of(h)
    assert not h.is_prefix_of(h, proper=True)
    other = History(("a1",), Orientation.AGENT_FIRST)
    assert not other.is_prefix_of(h)


def test_history_string_round_trip():
    h = History(("a0", "r", "a1"), Orientation.AGENT_FIRST)
    assert History.from_str(h.to_str(), Orientation.AGENT_FIRST) == h
    assert History.from_str("", Orientation.PERCEPT_FIRST) == \
        empty_history(Orientation.PERCEPT_FIRST)


def test_history_reward_is_last_percept(u3):
    assert history_reward(History(("a0", "r"), Orientation.AGENT_FIRST), u3) == 1
    # ends with an action, or empty: reward zero
    assert history_reward(History(("a0",), Orientation.AGENT_FIRST), u3) == 0
    assert history_reward(empty_history(Orientation.AGENT_FIRST), u3) == 0


# ==== local reverse ====


def test_local_reverse_swaps_pairs():
    h = History(("a0", "r", "a1", "n0"), Orientation.AGENT_FIRST)
    rev = local_reverse(h)
    assert rev.symbols == ("r", "a0", "n0", "a1")
    assert rev.orientation is Orientation.PERCEPT_FIRST


def test_local_reverse_rejects_odd_length():
    with pytest.raises(OddLength):
        local_reverse(History(("a0",), Orientation.AGENT_FIRST))


@given(st.integers(0, 4))
@settings(max_examples=20, deadline=None)
def test_local_reverse_is_an_involution(pairs):
    syms = ()
    for i in range(pairs):
        syms += (f"a{i % 2}", "r" if i % 3 == 0 else "n0")
    h = History(syms, Orientation.AGENT_FIRST)
    assert local_reverse(local_reverse(h)) == h


# ==== distributions ====


def test_distribution_must_sum_to_one():
    with pytest.raises(SchemaError):
        Distribution.of({"a": Fraction(1, 2)})
    with pytest.raises(SchemaError):
        Distribution.of({"a": Fraction(3, 2), "b": Fraction(-1, 2)})


def test_distribution_drops_zero_mass():
    d = Distribution.of({"a": Fraction(1), "b": Fraction(0)})
    assert d.support() == ("a",)
    assert d.is_point() and d.point_value() == "a"


def test_distribution_point_value_requires_point():
    d = Distribution.uniform(("a", "b"))
    with pytest.raises(NotDeterministic):
        d.point_value()


def test_distribution_mix_is_exact():
    d1 = Distribution.point("a")
    d2 = Distribution.uniform(("a", "b"))
    m = Distribution.mix([(Fraction(1, 3), d1), (Fraction(2, 3), d2)])
    assert m.prob("a") == Fraction(2, 3)
    assert m.prob("b") == Fraction(1, 3)


def test_distribution_json_round_trip():
    d = Distribution.of({"x": Fraction(1, 3), "y": Fraction(2, 3)})
    assert Distribution.from_json(d.to_json()) == d


# ==== specs and history enumeration ====


def test_spec_json_round_trip(ap4):
    assert FrameworkSpec.from_json(ap4.to_json()) == ap4


def test_spec_key_ignores_name(ap4):
    assert ap4.key() == ap4.with_name("other").key()


def test_history_counts(ap4):
    # agent-first: length 1 has |A| = 2 histories, length 2 has |A||P| = 6
    assert len(list(histories_of_length(ap4, 1))) == 2
    assert len(list(histories_of_length(ap4, 2))) == 6
    agent_turns = histories_up_to(ap4, 2, turn="agent")
    assert [len(h) for h in agent_turns] == [0, 2, 2, 2, 2, 2, 2]
    env_turns = histories_up_to(ap4, 2, turn="env")
    assert [len(h) for h in env_turns] == [1, 1]
