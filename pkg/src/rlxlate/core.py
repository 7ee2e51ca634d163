"""Core vocabulary: universes, histories, distributions, framework specs.

All probabilities and rewards are exact `fractions.Fraction` values.  A
history is a flat tuple of symbol names together with an orientation stamp
saying which side moves at the empty history.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence, Tuple

Symbol = str


# ==== errors ====

class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(ToolkitError):
    """Malformed JSON input (missing key, wrong type, bad rational)."""


class AlternationViolation(ToolkitError):
    """Two symbols of the same kind appear adjacently in a history."""


class UnknownSymbol(ToolkitError):
    """A symbol is neither an action nor a percept of the universe."""


class OrientationMismatch(ToolkitError):
    """The first symbol of a history has the wrong kind for its orientation."""


class OddLength(ToolkitError):
    """local_reverse was asked to reverse an odd-length history."""


class WrongTurn(ToolkitError):
    """A policy was queried at a history where it is not the mover."""


class HorizonViolation(ToolkitError):
    """An environment emitted a rewarding percept beyond its reward horizon."""


class FrameworkMismatch(ToolkitError):
    """Two objects from incompatible framework specs were combined."""


class WeightOutOfRange(ToolkitError):
    """A mixture weight lies outside [0, 1]."""


class AlreadyRandomized(ToolkitError):
    """randomize() was asked to relax a component that is already random."""


class NoUnitRewardPercept(ToolkitError):
    """The universe has no percept with reward exactly 1."""


class NoZeroRewardPercept(ToolkitError):
    """The universe has no percept with reward exactly 0."""


class ActionUnavailable(ToolkitError):
    """A required action is outside the availability set at a history."""


class NotAnAntichain(ToolkitError):
    """A history in the list is a weak prefix of another."""


class InsufficientRewardAlphabet(ToolkitError):
    """The universe lacks percepts with the reward values a builder needs."""


class ConditionC1Violation(ToolkitError):
    """Probabilistic entries of a flexible environment are not prefix-free."""


class ConditionC2Violation(ToolkitError):
    """Probabilistic and pinned entries of a flexible environment overlap."""


class ConditionC3Violation(ToolkitError):
    """A pinned percept is unavailable or carries nonzero reward."""


class NoRewardHorizon(ToolkitError):
    """total_value needs a finite reward horizon on the environment spec."""


class NotDeterministic(ToolkitError):
    """A deterministic policy was required but a non-point mass appeared."""


class EmptyCorpus(ToolkitError):
    """A corpus-quantified check received an empty corpus."""


class MissingEnvMap(ToolkitError):
    """The translation has no environment map but one was required."""


class WrongFramework(ToolkitError):
    """A policy belongs to a different framework than the operation expects."""


class SpecMismatch(ToolkitError):
    """Source/destination framework specs do not line up for this operation."""


class WrongAgentMapKind(ToolkitError):
    """An audit was pointed at a translation kind it does not know how to falsify."""


class DegenerateRewards(ToolkitError):
    """A demonstration needs both zero- and nonzero-reward percepts."""


class ChainStalled(ToolkitError):
    """The chain-extension step found no disagreeing agent in its family."""


class RangeTooSmall(ToolkitError):
    """The declared value range cannot support the requested pigeonhole."""


class NoDisagreementFound(ToolkitError):
    """No single-point modification changed the image agent along the path."""


class PropertyPrerequisiteFailed(ToolkitError):
    """A base framework lacks a structural property an audit relies on."""


class NotWeak(ToolkitError):
    """Comparator induction requires a weak (injective env map) translation."""


class ConfigParseError(ToolkitError):
    """An experiment config file could not be parsed."""


class TaskFailure(ToolkitError):
    """A required experiment task did not pass."""


# ==== rationals and canonical JSON ====

def frac_from_str(s: str) -> Fraction:
    """Parse "p/q" (or "p") into an exact Fraction."""
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise SchemaError(f"expected rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {s!r}: {exc}") from None


def frac_to_str(x: Fraction) -> str:
    """Render a Fraction as "p/q" ("p" when the denominator is 1)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else f"{x.numerator}"


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ==== universe ====

@dataclass(frozen=True)
class Universe:
    """Finite action and percept alphabets plus a reward for each percept.

    Actions and percepts are disjoint symbol sets; at least two actions and
    one percept are required so that agents always have a real choice.
    """

    actions: Tuple[Symbol, ...]
    percepts: Tuple[Symbol, ...]
    reward_items: Tuple[Tuple[Symbol, Fraction], ...]

    @staticmethod
    def make(actions: Sequence[Symbol], percepts: Sequence[Symbol],
             rewards: Mapping[Symbol, Fraction | int | str]) -> "Universe":
        acts = tuple(actions)
        pers = tuple(percepts)
        if len(acts) < 2:
            raise SchemaError("a universe needs at least two actions")
        if len(pers) < 1:
            raise SchemaError("a universe needs at least one percept")
        if len(set(acts)) != len(acts) or len(set(pers)) != len(pers):
            raise SchemaError("duplicate symbol in universe")
        if set(acts) & set(pers):
            raise SchemaError("actions and percepts must be disjoint")
        items = []
        for p in pers:
            if p not in rewards:
                raise SchemaError(f"missing reward for percept {p!r}")
            items.append((p, Fraction(rewards[p])))
        extra = set(rewards) - set(pers)
        if extra:
            raise SchemaError(f"rewards given for non-percepts: {sorted(extra)}")
        return Universe(acts, pers, tuple(items))

    @cached_property
    def rewards(self) -> Mapping[Symbol, Fraction]:
        return dict(self.reward_items)

    def reward(self, percept: Symbol) -> Fraction:
        try:
            return self.rewards[percept]
        except KeyError:
            raise UnknownSymbol(f"{percept!r} is not a percept") from None

    def is_action(self, s: Symbol) -> bool:
        return s in self.actions

    def is_percept(self, s: Symbol) -> bool:
        return s in self.rewards

    def zero_reward_percepts(self) -> Tuple[Symbol, ...]:
        return tuple(p for p in self.percepts if self.rewards[p] == 0)

    def unit_reward_percepts(self) -> Tuple[Symbol, ...]:
        return tuple(p for p in self.percepts if self.rewards[p] == 1)

    def percepts_with_reward(self, r: Fraction | int) -> Tuple[Symbol, ...]:
        r = Fraction(r)
        return tuple(p for p in self.percepts if self.rewards[p] == r)

    def to_json(self) -> dict:
        return {
            "actions": list(self.actions),
            "percepts": list(self.percepts),
            "rewards": {p: frac_to_str(r) for p, r in self.reward_items},
        }

    @staticmethod
    def from_json(data: Mapping) -> "Universe":
        try:
            actions = list(data["actions"])
            percepts = list(data["percepts"])
            rewards = {p: frac_from_str(v) for p, v in data["rewards"].items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"bad universe JSON: {exc}") from None
        return Universe.make(actions, percepts, rewards)


# ==== orientation and histories ====

class Orientation(str, Enum):
    """Who moves at the empty history."""

    AGENT_FIRST = "agent-first"      # actions at even positions 0, 2, 4, ...
    PERCEPT_FIRST = "percept-first"  # percepts at even positions

    def flipped(self) -> "Orientation":
        return (Orientation.PERCEPT_FIRST if self is Orientation.AGENT_FIRST
                else Orientation.AGENT_FIRST)


@dataclass(frozen=True)
class History:
    """A finite alternating interaction record with an orientation stamp."""

    symbols: Tuple[Symbol, ...]
    orientation: Orientation

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def is_agent_turn(self) -> bool:
        """True when the agent is the next mover (the history awaits an action)."""
        even = len(self.symbols) % 2 == 0
        return even == (self.orientation is Orientation.AGENT_FIRST)

    def is_env_turn(self) -> bool:
        return not self.is_agent_turn()

    def append(self, symbol: Symbol) -> "History":
        return History(self.symbols + (symbol,), self.orientation)

    def prefix(self, n: int) -> "History":
        return History(self.symbols[:n], self.orientation)

    def parent(self) -> "History":
        assert self.symbols, "the empty history has no parent"
        return History(self.symbols[:-1], self.orientation)

    def last(self) -> Symbol:
        assert self.symbols, "the empty history has no last symbol"
        return self.symbols[-1]

    def is_prefix_of(self, other: "History", proper: bool = False) -> bool:
        """Weak prefix test (set proper=True to exclude equality)."""
        if self.orientation is not other.orientation:
            return False
        n = len(self.symbols)
        if n > len(other.symbols) or other.symbols[:n] != self.symbols:
            return False
        return not (proper and n == len(other.symbols))

    def to_str(self) -> str:
        return "/".join(self.symbols)

    @staticmethod
    def from_str(text: str, orientation: Orientation) -> "History":
        symbols = tuple(s for s in text.split("/") if s)
        return History(symbols, orientation)

    def __repr__(self) -> str:  # compact in test output
        tag = "AP" if self.orientation is Orientation.AGENT_FIRST else "PA"
        return f"<{tag}:{self.to_str() or 'ε'}>"


def empty_history(orientation: Orientation) -> History:
    return History((), orientation)


def validate_history(symbols: Sequence[Symbol], universe: Universe,
                     orientation: Orientation) -> History:
    """Check membership, alternation and orientation; return the History.

    The symbol at position i must be an action exactly when i is even (for
    agent-first histories) or odd (percept-first).
    """
    for i, s in enumerate(symbols):
        if universe.is_action(s):
            kind_is_action = True
        elif universe.is_percept(s):
            kind_is_action = False
        else:
            raise UnknownSymbol(f"symbol {s!r} at position {i} is not in the universe")
        expect_action = (i % 2 == 0) == (orientation is Orientation.AGENT_FIRST)
        if kind_is_action != expect_action:
            if i == 0:
                raise OrientationMismatch(
                    f"first symbol {s!r} has the wrong kind for {orientation.value}")
            prev = symbols[i - 1]
            raise AlternationViolation(
                f"positions {i-1},{i} ({prev!r},{s!r}) do not alternate")
    return History(tuple(symbols), orientation)


def local_reverse(h: History) -> History:
    """Swap each adjacent (even, odd) pair of symbols and flip orientation.

    Defined on even-length histories only; it is an involution.
    """
    if len(h) % 2 != 0:
        raise OddLength(f"cannot locally reverse odd-length history {h!r}")
    out = []
    for i in range(0, len(h.symbols), 2):
        out.append(h.symbols[i + 1])
        out.append(h.symbols[i])
    return History(tuple(out), h.orientation.flipped())


def history_reward(h: History, universe: Universe) -> Fraction:
    """Reward of the final percept; 0 for the empty history or after an action."""
    if not h.symbols:
        return Fraction(0)
    s = h.last()
    if universe.is_percept(s):
        return universe.reward(s)
    if universe.is_action(s):
        return Fraction(0)
    raise UnknownSymbol(f"{s!r} is not in the universe")


# ==== distributions ====

@dataclass(frozen=True)
class Distribution:
    """Finitely supported exact distribution over symbols.

    Entries are (symbol, probability) pairs with positive Fractions that sum
    to exactly 1; zero-probability symbols are dropped at construction.
    """

    items: Tuple[Tuple[Symbol, Fraction], ...]

    @staticmethod
    def of(probs: Mapping[Symbol, Fraction | int | str]) -> "Distribution":
        items = []
        total = Fraction(0)
        for sym in sorted(probs):
            p = Fraction(probs[sym])
            if p < 0:
                raise SchemaError(f"negative probability {p} for {sym!r}")
            if p > 0:
                items.append((sym, p))
                total += p
        if total != 1:
            raise SchemaError(f"probabilities sum to {total}, not 1")
        return Distribution(tuple(items))

    @staticmethod
    def point(symbol: Symbol) -> "Distribution":
        return Distribution(((symbol, Fraction(1)),))

    @staticmethod
    def uniform(symbols: Sequence[Symbol]) -> "Distribution":
        n = len(symbols)
        if n == 0:
            raise SchemaError("uniform distribution over empty support")
        return Distribution.of({s: Fraction(1, n) for s in symbols})

    @staticmethod
    def mix(parts: Sequence[Tuple[Fraction, "Distribution"]]) -> "Distribution":
        """Exact convex combination; weights must sum to 1."""
        acc: dict[Symbol, Fraction] = {}
        for w, d in parts:
            w = Fraction(w)
            if w == 0:
                continue
            for sym, p in d.items:
                acc[sym] = acc.get(sym, Fraction(0)) + w * p
        return Distribution.of(acc)

    def prob(self, symbol: Symbol) -> Fraction:
        for sym, p in self.items:
            if sym == symbol:
                return p
        return Fraction(0)

    def support(self) -> Tuple[Symbol, ...]:
        return tuple(sym for sym, _ in self.items)

    def is_point(self) -> bool:
        return len(self.items) == 1

    def point_value(self) -> Symbol:
        if not self.is_point():
            raise NotDeterministic(f"distribution {self.items} is not a point mass")
        return self.items[0][0]

    def to_json(self) -> dict:
        return {sym: frac_to_str(p) for sym, p in self.items}

    @staticmethod
    def from_json(data: Mapping) -> "Distribution":
        return Distribution.of({s: frac_from_str(v) for s, v in data.items()})


# ==== framework specs ====

@dataclass(frozen=True)
class FrameworkSpec:
    """A finitely-generated framework: universe, orientation, policy families.

    ``table_depth`` bounds the explicit tables of corpus policies;
    ``reward_horizon`` T promises that every percept emitted at depth > T has
    reward 0.  ``value_range``, when set, declares the closed interval of
    values attainable in the environment family (used by the counting
    audits together with ``integer_rewards``).
    """

    universe: Universe
    orientation: Orientation
    deterministic_agents: bool
    deterministic_environments: bool
    table_depth: int
    reward_horizon: int
    integer_rewards: bool = False
    value_range: Optional[Tuple[int, int]] = None
    name: str = ""

    def __post_init__(self):
        if self.table_depth < 0 or self.reward_horizon < 0:
            raise SchemaError("table_depth and reward_horizon must be >= 0")
        if self.value_range is not None and self.value_range[0] > self.value_range[1]:
            raise SchemaError(f"empty value range {self.value_range}")

    def key(self) -> tuple:
        """Compatibility key: everything except the cosmetic name."""
        return (self.universe, self.orientation, self.deterministic_agents,
                self.deterministic_environments, self.table_depth,
                self.reward_horizon, self.integer_rewards, self.value_range)

    def determinism_class(self) -> str:
        """Which corner of the randomization diamond this spec sits in."""
        if self.deterministic_agents and self.deterministic_environments:
            return "det/det"
        if self.deterministic_environments:
            return "rand-agent/det-env"
        if self.deterministic_agents:
            return "det-agent/rand-env"
        return "rand/rand"

    def empty(self) -> History:
        return empty_history(self.orientation)

    def with_name(self, name: str) -> "FrameworkSpec":
        return replace(self, name=name)

    def to_json(self) -> dict:
        out = {
            "universe": self.universe.to_json(),
            "orientation": self.orientation.value,
            "deterministic_agents": self.deterministic_agents,
            "deterministic_environments": self.deterministic_environments,
            "table_depth": self.table_depth,
            "reward_horizon": self.reward_horizon,
            "integer_rewards": self.integer_rewards,
        }
        if self.value_range is not None:
            out["value_range"] = list(self.value_range)
        if self.name:
            out["name"] = self.name
        return out

    @staticmethod
    def from_json(data: Mapping) -> "FrameworkSpec":
        try:
            vr = data.get("value_range")
            return FrameworkSpec(
                universe=Universe.from_json(data["universe"]),
                orientation=Orientation(data["orientation"]),
                deterministic_agents=bool(data["deterministic_agents"]),
                deterministic_environments=bool(data["deterministic_environments"]),
                table_depth=int(data["table_depth"]),
                reward_horizon=int(data["reward_horizon"]),
                integer_rewards=bool(data.get("integer_rewards", False)),
                value_range=None if vr is None else (int(vr[0]), int(vr[1])),
                name=str(data.get("name", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad framework JSON: {exc}") from None


def histories_of_length(spec: FrameworkSpec, length: int) -> Iterator[History]:
    """All valid histories of exactly the given length (depth-first order)."""
    univ = spec.universe

    def extend(prefix: Tuple[Symbol, ...]) -> Iterator[Tuple[Symbol, ...]]:
        if len(prefix) == length:
            yield prefix
            return
        i = len(prefix)
        expect_action = (i % 2 == 0) == (spec.orientation is Orientation.AGENT_FIRST)
        alphabet = univ.actions if expect_action else univ.percepts
        for s in alphabet:
            yield from extend(prefix + (s,))

    for symbols in extend(()):
        yield History(symbols, spec.orientation)


def histories_up_to(spec: FrameworkSpec, max_len: int,
                    turn: Optional[str] = None) -> list[History]:
    """All histories of length <= max_len, optionally only one side's turns.

    ``turn`` is 'agent', 'env' or None for both.
    """
    out: list[History] = []
    for n in range(max_len + 1):
        for h in histories_of_length(spec, n):
            if turn == "agent" and not h.is_agent_turn():
                continue
            if turn == "env" and not h.is_env_turn():
                continue
            out.append(h)
    return out
