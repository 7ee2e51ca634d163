"""Agents, environments, constructed environments and policy corpora.

A policy is a lookup table over its own turn histories plus a default rule
for everything off-table.  Default rules are tagged tuples:

    ("uniform",)          uniform over the full action alphabet (agents)
    ("fixed", symbol)     constant point mass
    ("closure", fn)       arbitrary History -> Distribution callback

Closure-backed policies are how translated and specially constructed
policies stay exact at any depth without materialising huge tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Tuple

from .core import (
    ActionUnavailable,
    AlreadyRandomized,
    ConditionC1Violation,
    ConditionC2Violation,
    ConditionC3Violation,
    Distribution,
    FrameworkMismatch,
    FrameworkSpec,
    History,
    HorizonViolation,
    InsufficientRewardAlphabet,
    NoUnitRewardPercept,
    NoZeroRewardPercept,
    NotAnAntichain,
    NotDeterministic,
    OrientationMismatch,
    SchemaError,
    Symbol,
    UnknownSymbol,
    WeightOutOfRange,
    WrongTurn,
    histories_up_to,
    validate_history,
)

DefaultRule = tuple


# ==== policies ====

@dataclass(eq=False)
class Agent:
    """Maps agent-turn histories to distributions over actions."""

    spec: FrameworkSpec
    table: Mapping[Tuple[Symbol, ...], Distribution]
    default: DefaultRule = ("uniform",)
    name: str = ""

    def act(self, h: History) -> Distribution:
        if h.orientation is not self.spec.orientation:
            raise OrientationMismatch(
                f"agent expects {self.spec.orientation.value} histories")
        if not h.is_agent_turn():
            raise WrongTurn(f"not an agent turn: {h!r}")
        d = self.table.get(h.symbols)
        if d is None:
            d = _apply_default(self.default, h, self.spec.universe.actions)
        if self.spec.deterministic_agents and not d.is_point():
            raise NotDeterministic(f"agent {self.name or '?'} is random at {h!r}")
        return d

    def is_table_deterministic(self) -> bool:
        return all(d.is_point() for d in self.table.values())


@dataclass(eq=False)
class Environment:
    """Maps environment-turn histories to distributions over percepts."""

    spec: FrameworkSpec
    table: Mapping[Tuple[Symbol, ...], Distribution]
    default: DefaultRule
    name: str = ""

    def emit(self, h: History) -> Distribution:
        if h.orientation is not self.spec.orientation:
            raise OrientationMismatch(
                f"environment expects {self.spec.orientation.value} histories")
        if not h.is_env_turn():
            raise WrongTurn(f"not an environment turn: {h!r}")
        d = self.table.get(h.symbols)
        if d is None:
            d = _apply_default(self.default, h, self.spec.universe.percepts)
        if self.spec.deterministic_environments and not d.is_point():
            raise NotDeterministic(f"environment {self.name or '?'} is random at {h!r}")
        if len(h) >= self.spec.reward_horizon:
            for sym, _ in d.items:
                if self.spec.universe.reward(sym) != 0:
                    raise HorizonViolation(
                        f"{self.name or '?'} emits rewarding {sym!r} at depth "
                        f"{len(h) + 1} > horizon {self.spec.reward_horizon}")
        return d

    def is_table_deterministic(self) -> bool:
        return all(d.is_point() for d in self.table.values())


def _apply_default(rule: DefaultRule, h: History,
                   alphabet: Tuple[Symbol, ...]) -> Distribution:
    tag = rule[0]
    if tag == "uniform":
        return Distribution.uniform(alphabet)
    if tag == "fixed":
        return Distribution.point(rule[1])
    if tag == "closure":
        return rule[1](h)
    raise SchemaError(f"unknown default rule {rule!r}")


def eval_agent(agent: Agent, h: History) -> Distribution:
    return agent.act(h)


def eval_environment(env: Environment, h: History) -> Distribution:
    return env.emit(h)


def agent_reach(agent: Agent, h: History) -> Fraction:
    """Product of the agent's probabilities for its own moves along h."""
    w = Fraction(1)
    for i in range(len(h)):
        prefix = h.prefix(i)
        if prefix.is_agent_turn():
            w *= agent.act(prefix).prob(h.symbols[i])
            if w == 0:
                return w
    return w


def availability(spec: FrameworkSpec, h: History,
                 family: Optional[Sequence] = None) -> Tuple[Symbol, ...]:
    """Symbols some family member can produce at h (full alphabet if family
    is None — our corpora always include every point choice)."""
    alphabet = (spec.universe.actions if h.is_agent_turn()
                else spec.universe.percepts)
    if family is None:
        return alphabet
    seen: set[Symbol] = set()
    for member in family:
        query = member.act if isinstance(member, Agent) else member.emit
        seen.update(query(h).support())
    return tuple(s for s in alphabet if s in seen)


# ==== constructed environments ====

def _zero_percept(spec: FrameworkSpec) -> Symbol:
    zs = spec.universe.zero_reward_percepts()
    if not zs:
        raise NoZeroRewardPercept("universe has no zero-reward percept")
    return zs[0]


def _unit_percept(spec: FrameworkSpec) -> Symbol:
    us = spec.universe.unit_reward_percepts()
    if not us:
        raise NoUnitRewardPercept("universe has no reward-1 percept")
    return us[0]


def zero_environment(spec: FrameworkSpec, name: str = "zero-env") -> Environment:
    """Emits a fixed zero-reward percept everywhere."""
    return Environment(spec, {}, ("fixed", _zero_percept(spec)), name=name)


def _check_env_turn(spec: FrameworkSpec, h: History) -> None:
    if h.orientation is not spec.orientation:
        raise OrientationMismatch(f"history {h!r} has the wrong orientation")
    if not h.is_env_turn():
        raise WrongTurn(f"not an environment turn: {h!r}")


def indicator_environment(spec: FrameworkSpec, h: History,
                          name: str = "") -> Environment:
    """Deterministic environment rewarding exactly the percept after h."""
    _check_env_turn(spec, h)
    if len(h) >= spec.reward_horizon:
        raise HorizonViolation(
            f"indicator at depth {len(h) + 1} exceeds horizon {spec.reward_horizon}")
    unit = _unit_percept(spec)
    zero = _zero_percept(spec)
    table = {h.symbols: Distribution.point(unit)}
    return Environment(spec, table, ("fixed", zero),
                       name=name or f"ind[{h.to_str() or 'e'}]")


def cutoff_environment(spec: FrameworkSpec, base: Environment, h: History,
                       x: Symbol, name: str = "") -> Environment:
    """Copy of ``base`` outside h's subtree; below h, reward only at h + x.

    Emits the unit percept right after h followed by x, a zero percept at
    every other node strictly below h, and ``base``'s percept wherever h is
    not a prefix.
    """
    if h.orientation is not spec.orientation:
        raise OrientationMismatch(f"history {h!r} has the wrong orientation")
    if not h.is_agent_turn():
        raise WrongTurn(f"cutoff pivot must be an agent turn: {h!r}")
    if x not in availability(spec, h):
        raise ActionUnavailable(f"{x!r} is not an available action at {h!r}")
    hx = h.append(x)
    if len(hx) >= spec.reward_horizon:
        raise HorizonViolation(
            f"cutoff reward at depth {len(hx) + 1} exceeds horizon {spec.reward_horizon}")
    unit = _unit_percept(spec)
    zero = _zero_percept(spec)

    def rule(g: History) -> Distribution:
        if g.symbols == hx.symbols:
            return Distribution.point(unit)
        if h.is_prefix_of(g, proper=True):
            return Distribution.point(zero)
        return base.emit(g)

    return Environment(spec, {}, ("closure", rule),
                       name=name or f"cutoff[{h.to_str() or 'e'}+{x}]")


def _is_antichain(histories: Sequence[History]) -> bool:
    for i, a in enumerate(histories):
        for b in histories[i + 1:]:
            if a.is_prefix_of(b) or b.is_prefix_of(a):
                return False
    return True


def descending_environment(spec: FrameworkSpec, antichain: Sequence[History],
                           name: str = "descending-env") -> Environment:
    """Reward K - i at the i-th antichain node (K nodes, 0-indexed), 0 elsewhere."""
    for h in antichain:
        _check_env_turn(spec, h)
        if len(h) >= spec.reward_horizon:
            raise HorizonViolation(
                f"antichain node at depth {len(h) + 1} exceeds horizon")
    if not _is_antichain(antichain):
        raise NotAnAntichain("one history is a prefix of another")
    K = len(antichain)
    zero = _zero_percept(spec)
    table = {}
    for i, h in enumerate(antichain):
        wanted = K - i
        cands = spec.universe.percepts_with_reward(wanted)
        if not cands:
            raise InsufficientRewardAlphabet(f"no percept with reward {wanted}")
        table[h.symbols] = Distribution.point(cands[0])
    return Environment(spec, table, ("fixed", zero), name=name)


def flexible_environment(
        spec: FrameworkSpec,
        prob_entries: Sequence[Tuple[History, Fraction]],
        pinned_entries: Sequence[Tuple[History, Symbol]],
        name: str = "flexible-env") -> Environment:
    """Environment rewarding independently at a prefix-free node set.

    At each (h, p) in ``prob_entries`` it emits the unit-reward percept with
    probability p (a zero percept otherwise); at each (h, y) in
    ``pinned_entries`` it emits the required zero-reward percept y; it emits
    a fixed zero percept everywhere else.  The three admissibility checks:
    probabilistic nodes pairwise prefix-free, node sets disjoint, pinned
    percepts zero-reward.
    """
    prob_hs = [h for h, _ in prob_entries]
    for h in prob_hs:
        _check_env_turn(spec, h)
        if len(h) >= spec.reward_horizon:
            raise HorizonViolation(
                f"probabilistic node at depth {len(h) + 1} exceeds horizon")
    if not _is_antichain(prob_hs):
        raise ConditionC1Violation(
            "probabilistic nodes must be pairwise prefix-free")
    pinned_hs = [h for h, _ in pinned_entries]
    for h in pinned_hs:
        _check_env_turn(spec, h)
    prob_keys = {h.symbols for h in prob_hs}
    pinned_keys = {h.symbols for h in pinned_hs}
    if prob_keys & pinned_keys:
        raise ConditionC2Violation(
            "probabilistic and pinned node sets must be disjoint")
    if len(pinned_keys) != len(pinned_hs):
        raise SchemaError("duplicate pinned node")
    unit = _unit_percept(spec)
    zero = _zero_percept(spec)
    table: dict[Tuple[Symbol, ...], Distribution] = {}
    for h, p in prob_entries:
        p = Fraction(p)
        if not (0 <= p <= 1):
            raise SchemaError(f"probability {p} outside [0, 1]")
        table[h.symbols] = Distribution.of({unit: p, zero: 1 - p})
    for h, y in pinned_entries:
        if not spec.universe.is_percept(y):
            raise ConditionC3Violation(f"pinned symbol {y!r} is not a percept")
        if spec.universe.reward(y) != 0:
            raise ConditionC3Violation(f"pinned percept {y!r} has nonzero reward")
        table[h.symbols] = Distribution.point(y)
    return Environment(spec, table, ("fixed", zero), name=name)


# ==== agent combinators ====

def mixture_agent(pi: Agent, rho: Agent, w: Fraction,
                  name: str = "") -> Agent:
    """Behavioural w : (1-w) mixture whose value is the mixed value.

    Conditionals are re-weighted by each component's probability of having
    produced the current history's actions, which is what makes
    V(mix) = w V(pi) + (1-w) V(rho) hold in every environment.  Where both
    components give the history probability zero the conditional is
    arbitrary; we pick the uniform distribution.
    """
    w = Fraction(w)
    if not (0 <= w <= 1):
        raise WeightOutOfRange(f"weight {w} outside [0, 1]")
    if pi.spec.universe != rho.spec.universe or \
            pi.spec.orientation is not rho.spec.orientation:
        raise FrameworkMismatch("mixture components live in different frameworks")
    spec = replace(pi.spec, deterministic_agents=False)
    actions = spec.universe.actions

    def rule(h: History) -> Distribution:
        rp = agent_reach(pi, h)
        rr = agent_reach(rho, h)
        den = w * rp + (1 - w) * rr
        if den == 0:
            return Distribution.uniform(actions)
        dp = pi.act(h) if rp else None
        dr = rho.act(h) if rr else None
        probs: dict[Symbol, Fraction] = {}
        for x in actions:
            num = Fraction(0)
            if dp is not None:
                num += w * rp * dp.prob(x)
            if dr is not None:
                num += (1 - w) * rr * dr.prob(x)
            if num:
                probs[x] = num / den
        return Distribution.of(probs)

    return Agent(spec, {}, ("closure", rule),
                 name=name or f"mix[{pi.name or 'pi'},{rho.name or 'rho'};{w}]")


def randomize(spec: FrameworkSpec, component: str) -> FrameworkSpec:
    """Relax determinism flags: component is 'agents', 'environments' or 'both'."""
    suffix = {"agents": "^a", "environments": "^e", "both": "^ae"}
    if component not in suffix:
        raise SchemaError(f"unknown component {component!r}")
    relax_a = component in ("agents", "both")
    relax_e = component in ("environments", "both")
    if relax_a and not spec.deterministic_agents and \
            (not relax_e or not spec.deterministic_environments):
        raise AlreadyRandomized("agents are already randomized")
    if relax_e and not spec.deterministic_environments and \
            (not relax_a or not spec.deterministic_agents):
        raise AlreadyRandomized("environments are already randomized")
    if relax_a and relax_e and not spec.deterministic_agents and \
            not spec.deterministic_environments:
        raise AlreadyRandomized("both components are already randomized")
    new_name = spec.name + suffix[component] if spec.name else ""
    return replace(
        spec,
        deterministic_agents=spec.deterministic_agents and not relax_a,
        deterministic_environments=spec.deterministic_environments and not relax_e,
        name=new_name,
    )


# ==== corpora ====

def constant_agent(spec: FrameworkSpec, action: Symbol, name: str = "") -> Agent:
    if not spec.universe.is_action(action):
        raise UnknownSymbol(f"{action!r} is not an action")
    return Agent(spec, {}, ("fixed", action), name=name or f"always-{action}")


def uniform_agent(spec: FrameworkSpec, name: str = "uniform-agent") -> Agent:
    if spec.deterministic_agents:
        raise NotDeterministic("uniform agent needs a random-agent framework")
    return Agent(spec, {}, ("uniform",), name=name)


def deterministic_agent_corpus(spec: FrameworkSpec, depth: int) -> list[Agent]:
    """Every deterministic table on agent turns of length <= depth.

    Off-table behaviour is the constant first action, so two corpus members
    differ exactly when their tables do.
    """
    keys = [h.symbols for h in histories_up_to(spec, depth, turn="agent")]
    actions = spec.universe.actions
    out = []
    for idx, choice in enumerate(itertools.product(actions, repeat=len(keys))):
        table = {k: Distribution.point(a) for k, a in zip(keys, choice)}
        out.append(Agent(spec, table, ("fixed", actions[0]), name=f"agt-{idx:03d}"))
    return out


def deterministic_environment_corpus(spec: FrameworkSpec, depth: int) -> list[Environment]:
    """Every deterministic table on env turns of length <= depth.

    Entries at or beyond the reward horizon are restricted to zero-reward
    percepts; off-table behaviour is the fixed zero percept.
    """
    zero = _zero_percept(spec)
    keys = []
    options = []
    for h in histories_up_to(spec, depth, turn="env"):
        keys.append(h.symbols)
        if len(h) >= spec.reward_horizon:
            options.append(spec.universe.zero_reward_percepts())
        else:
            options.append(spec.universe.percepts)
    out = []
    for idx, choice in enumerate(itertools.product(*options)):
        table = {k: Distribution.point(p) for k, p in zip(keys, choice)}
        out.append(Environment(spec, table, ("fixed", zero), name=f"env-{idx:03d}"))
    return out


def _random_distribution(rng, symbols: Sequence[Symbol],
                         deterministic: bool) -> Distribution:
    if deterministic:
        return Distribution.point(symbols[int(rng.integers(len(symbols)))])
    nums = [int(n) for n in rng.integers(0, 5, size=len(symbols))]
    if sum(nums) == 0:
        nums[int(rng.integers(len(symbols)))] = 1
    total = sum(nums)
    return Distribution.of({s: Fraction(n, total)
                            for s, n in zip(symbols, nums) if n})


def random_agent(spec: FrameworkSpec, depth: int, rng, name: str = "") -> Agent:
    table = {}
    for h in histories_up_to(spec, depth, turn="agent"):
        table[h.symbols] = _random_distribution(
            rng, spec.universe.actions, spec.deterministic_agents)
    default_action = spec.universe.actions[int(rng.integers(len(spec.universe.actions)))]
    return Agent(spec, table, ("fixed", default_action), name=name or "rand-agent")


def random_environment(spec: FrameworkSpec, depth: int, rng,
                       name: str = "") -> Environment:
    zero = _zero_percept(spec)
    table = {}
    for h in histories_up_to(spec, depth, turn="env"):
        if len(h) >= spec.reward_horizon:
            symbols = spec.universe.zero_reward_percepts()
        else:
            symbols = spec.universe.percepts
        table[h.symbols] = _random_distribution(
            rng, symbols, spec.deterministic_environments)
    return Environment(spec, table, ("fixed", zero), name=name or "rand-env")


def grid_distributions(symbols: Sequence[Symbol],
                       denominator: int = 4) -> list[Distribution]:
    """Every distribution over ``symbols`` with probabilities k/denominator."""
    out = []
    n = len(symbols)

    def parts(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for k in range(remaining + 1):
            for rest in parts(remaining - k, slots - 1):
                yield (k,) + rest

    for nums in parts(denominator, n):
        out.append(Distribution.of(
            {s: Fraction(k, denominator) for s, k in zip(symbols, nums) if k}))
    return out


# ==== JSON ====

def _default_to_json(rule: DefaultRule) -> dict:
    if rule[0] == "uniform":
        return {"uniform": True}
    if rule[0] == "fixed":
        return {"fixed": rule[1]}
    raise SchemaError("closure-backed defaults cannot be serialized; "
                      "tabulate the policy first")


def _default_from_json(data: Mapping) -> DefaultRule:
    if data.get("uniform"):
        return ("uniform",)
    if "fixed" in data:
        return ("fixed", data["fixed"])
    raise SchemaError(f"bad default rule {data!r}")


def policy_to_json(policy) -> dict:
    kind = "agent" if isinstance(policy, Agent) else "environment"
    table = {"/".join(k): d.to_json() for k, d in sorted(policy.table.items())}
    return {"kind": kind, "table": table,
            "default": _default_to_json(policy.default),
            "name": policy.name}


def policy_from_json(data: Mapping, spec: FrameworkSpec):
    try:
        kind = data["kind"]
        raw_table = data["table"]
        default = _default_from_json(data["default"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad policy JSON: {exc}") from None
    if kind not in ("agent", "environment"):
        raise SchemaError(f"unknown policy kind {kind!r}")
    want_agent_turn = kind == "agent"
    table = {}
    for text, dist in raw_table.items():
        symbols = tuple(s for s in text.split("/") if s)
        h = validate_history(symbols, spec.universe, spec.orientation)
        if h.is_agent_turn() != want_agent_turn:
            raise WrongTurn(f"table key {text!r} is not a {kind} turn")
        table[h.symbols] = Distribution.from_json(dist)
    name = str(data.get("name", ""))
    if kind == "agent":
        for d in table.values():
            for s, _ in d.items:
                if not spec.universe.is_action(s):
                    raise UnknownSymbol(f"{s!r} is not an action")
        return Agent(spec, table, default, name=name)
    for d in table.values():
        for s, _ in d.items:
            if not spec.universe.is_percept(s):
                raise UnknownSymbol(f"{s!r} is not a percept")
    return Environment(spec, table, default, name=name)


def tabulate(policy, depth: int):
    """Materialise a policy into an explicit table down to ``depth``.

    The default of the result is the original policy's behaviour at the
    lexicographically first alphabet symbol -- only safe for serialization
    when queries beyond ``depth`` are irrelevant (e.g. past the horizon).
    """
    spec = policy.spec
    if isinstance(policy, Agent):
        turn, query = "agent", policy.act
        fallback = ("fixed", spec.universe.actions[0])
    else:
        turn, query = "env", policy.emit
        fallback = ("fixed", _zero_percept(spec))
    table = {}
    for h in histories_up_to(spec, depth, turn=turn):
        table[h.symbols] = query(h)
    cls = Agent if isinstance(policy, Agent) else Environment
    return cls(spec, table, fallback, name=policy.name)
