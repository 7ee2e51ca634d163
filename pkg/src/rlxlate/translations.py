"""The translation catalog and mechanical checks of the translation laws.

A translation carries an agent map (source agents to destination agents),
optionally an environment map (destination environments back to source
environments), a finite dependency declaration for the locality law, and a
claimed status.  The three laws checked here:

    condition1   order preservation: the destination ranks two image agents
                 the way the source ranks the originals, in every mapped
                 environment (an iff, checked per ordered agent pair)
    condition2   locality: the image's choice at h is determined by the
                 original's choices on the declared finite dependency set
    condition3   richness: image behaviour can be pinned on any finite set
                 while still deviating somewhere else

"weak" additionally requires the environment map to be injective; "strong"
requires mapped environments to stay distinguishable whenever the originals
were.  Checks are corpus-bounded: a "pass" certifies the quantified laws on
the supplied corpora, and reports say exactly what was quantified over.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .core import (
    Distribution,
    FrameworkSpec,
    History,
    MissingEnvMap,
    NoZeroRewardPercept,
    Orientation,
    SpecMismatch,
    Symbol,
    UnknownSymbol,
    WrongFramework,
    empty_history,
    frac_to_str,
    histories_up_to,
    local_reverse,
)
from .policies import Agent, Environment
from .valuation import total_value

_STATUS_RANK = {"none": 0, "pre": 1, "weak": 2, "strong": 3}


# ==== translation objects ====

@dataclass(eq=False)
class Translation:
    """A (possibly one-sided) translation between two framework specs."""

    name: str
    source_spec: FrameworkSpec
    dest_spec: FrameworkSpec
    agent_fn: Callable[[Agent], Agent]
    env_fn: Optional[Callable[[Environment], Environment]]
    dependency_fn: Callable[[History], list[History]]
    claimed_status: str = "none"
    witness_lifter_fn: Optional[Callable[[Agent], Agent]] = None
    value_offset: Optional[Fraction] = None

    def apply_agent(self, agent: Agent) -> Agent:
        if agent.spec.universe != self.source_spec.universe or \
                agent.spec.orientation is not self.source_spec.orientation:
            raise WrongFramework(
                f"agent {agent.name or '?'} does not live in the source framework "
                f"of {self.name}")
        image = self.agent_fn(agent)
        if not image.name:
            image.name = f"{agent.name or 'agent'}*"
        return image

    def apply_env(self, env: Environment) -> Environment:
        if self.env_fn is None:
            raise MissingEnvMap(f"translation {self.name} has no environment map")
        if env.spec.universe != self.dest_spec.universe or \
                env.spec.orientation is not self.dest_spec.orientation:
            raise WrongFramework(
                f"environment {env.name or '?'} does not live in the destination "
                f"framework of {self.name}")
        image = self.env_fn(env)
        if not image.name:
            image.name = f"{env.name or 'env'}_*"
        return image

    def dependency(self, h: History) -> list[History]:
        if h.orientation is not self.dest_spec.orientation or not h.is_agent_turn():
            raise WrongFramework(
                f"dependency sets are declared at destination agent turns, not {h!r}")
        return self.dependency_fn(h)

    def lift_witness(self, agent: Agent) -> Agent:
        assert self.witness_lifter_fn is not None
        lifted = self.witness_lifter_fn(agent)
        if not lifted.name:
            lifted.name = f"{agent.name or 'agent'}^lift"
        return lifted


def apply_agent_map(translation: Translation, agent: Agent) -> Agent:
    return translation.apply_agent(agent)


def apply_env_map(translation: Translation, env: Environment) -> Environment:
    return translation.apply_env(env)


# ==== catalog ====

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SpecMismatch(msg)


def _closure_agent(spec: FrameworkSpec, rule, name: str = "") -> Agent:
    return Agent(spec, {}, ("closure", rule), name=name)


def _closure_env(spec: FrameworkSpec, rule, name: str = "") -> Environment:
    return Environment(spec, {}, ("closure", rule), name=name)


def make_prepend_percept(source_spec: FrameworkSpec, dest_spec: FrameworkSpec,
                         y0: Symbol) -> Translation:
    """Translate percept-first agents to agent-first by assuming an initial
    percept y0; mapped environments emit y0 first and then defer.

    Where the agent's first percept differs from y0, the mapped environment
    keeps emitting a fixed zero-reward percept, so the off-branch is
    reward-free.  The value law is V(sigma, mapped mu) = V(image sigma, mu)
    + reward(y0).
    """
    _require(source_spec.orientation is Orientation.PERCEPT_FIRST,
             "prepend-percept sources are percept-first")
    _require(dest_spec.orientation is Orientation.AGENT_FIRST,
             "prepend-percept destinations are agent-first")
    _require(source_spec.universe == dest_spec.universe,
             "prepend-percept keeps the universe fixed")
    univ = source_spec.universe
    if not univ.is_percept(y0):
        raise UnknownSymbol(f"{y0!r} is not a percept")
    _require(source_spec.reward_horizon >= dest_spec.reward_horizon + 1,
             "mapped environments emit one symbol deeper: the source horizon "
             "must exceed the destination horizon")
    zeros = univ.zero_reward_percepts()
    if len(univ.percepts) > 1 and not zeros:
        raise NoZeroRewardPercept(
            "the off-branch of mapped environments needs a zero-reward percept")
    off = zeros[0] if zeros else None

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            return pi.act(History((y0,) + g.symbols, Orientation.PERCEPT_FIRST))
        return _closure_agent(dest_spec, rule)

    def env_fn(mu: Environment) -> Environment:
        def rule(g: History) -> Distribution:
            if len(g) == 0:
                return Distribution.point(y0)
            if g.symbols[0] == y0:
                return mu.emit(History(g.symbols[1:], Orientation.AGENT_FIRST))
            return Distribution.point(off)
        return _closure_env(source_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        return [History((y0,) + g.symbols, Orientation.PERCEPT_FIRST)]

    def lifter_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            return pi.act(History(g.symbols[1:], Orientation.AGENT_FIRST))
        return _closure_agent(source_spec, rule)

    return Translation(
        name=f"prepend-percept:{y0}",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=dependency_fn,
        claimed_status="strong",
        witness_lifter_fn=lifter_fn,
        value_offset=univ.reward(y0),
    )


def make_prepend_action(source_spec: FrameworkSpec, dest_spec: FrameworkSpec,
                        x0: Symbol) -> Translation:
    """Translate percept-first agents to agent-first by opening with a fixed
    action x0; mapped environments drop that opening action.

    The environment map forgets how a destination environment reacts to
    openings other than x0, which is why this translation is not weak.
    """
    _require(source_spec.orientation is Orientation.PERCEPT_FIRST,
             "prepend-action sources are percept-first")
    _require(dest_spec.orientation is Orientation.AGENT_FIRST,
             "prepend-action destinations are agent-first")
    _require(source_spec.universe == dest_spec.universe,
             "prepend-action keeps the universe fixed")
    univ = source_spec.universe
    if not univ.is_action(x0):
        raise UnknownSymbol(f"{x0!r} is not an action")
    _require(source_spec.reward_horizon >= dest_spec.reward_horizon - 1,
             "mapped environments emit one symbol shallower: the source "
             "horizon must reach the shifted rewards")

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            if len(g) == 0:
                return Distribution.point(x0)
            return pi.act(History(g.symbols[1:], Orientation.PERCEPT_FIRST))
        return _closure_agent(dest_spec, rule)

    def env_fn(mu: Environment) -> Environment:
        def rule(g: History) -> Distribution:
            return mu.emit(History((x0,) + g.symbols, Orientation.AGENT_FIRST))
        return _closure_env(source_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        if len(g) == 0:
            return []
        return [History(g.symbols[1:], Orientation.PERCEPT_FIRST)]

    return Translation(
        name=f"prepend-action:{x0}",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=dependency_fn,
        claimed_status="pre",
        value_offset=Fraction(0),
    )


def make_local_reverse(source_spec: FrameworkSpec,
                       dest_spec: FrameworkSpec) -> Translation:
    """Translate agent-first policies to percept-first by locally reversing
    the even-length prefix of each query (the final symbol is dropped)."""
    _require(source_spec.orientation is Orientation.AGENT_FIRST,
             "local-reverse sources are agent-first")
    _require(dest_spec.orientation is Orientation.PERCEPT_FIRST,
             "local-reverse destinations are percept-first")
    _require(source_spec.universe == dest_spec.universe,
             "local-reverse keeps the universe fixed")
    _require(source_spec.reward_horizon >= dest_spec.reward_horizon + 1,
             "mapped environments emit one symbol deeper: the source horizon "
             "must exceed the destination horizon")

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            return pi.act(local_reverse(g.prefix(len(g) - 1)))
        return _closure_agent(dest_spec, rule)

    def env_fn(mu: Environment) -> Environment:
        def rule(g: History) -> Distribution:
            return mu.emit(local_reverse(g.prefix(len(g) - 1)))
        return _closure_env(source_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        return [local_reverse(g.prefix(len(g) - 1))]

    return Translation(
        name="local-reverse",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=dependency_fn,
        claimed_status="weak",
        value_offset=Fraction(0),
    )


def make_times_map(source_spec: FrameworkSpec,
                   dest_spec: FrameworkSpec) -> Translation:
    """Agent-only map dropping the first percept of every query."""
    _require(source_spec.orientation is Orientation.AGENT_FIRST,
             "times-map sources are agent-first")
    _require(dest_spec.orientation is Orientation.PERCEPT_FIRST,
             "times-map destinations are percept-first")
    _require(source_spec.universe == dest_spec.universe,
             "times-map keeps the universe fixed")

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            return pi.act(History(g.symbols[1:], Orientation.AGENT_FIRST))
        return _closure_agent(dest_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        return [History(g.symbols[1:], Orientation.AGENT_FIRST)]

    return Translation(
        name="times-map",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=None,
        dependency_fn=dependency_fn,
        claimed_status="none",
    )


def make_sum_map(source_spec: FrameworkSpec,
                 dest_spec: FrameworkSpec) -> Translation:
    """Agent-only map averaging over the unseen first action.

    The image's choice at h mixes the original's choices at x + h, weighted
    by the original's opening distribution.
    """
    _require(source_spec.orientation is Orientation.AGENT_FIRST,
             "sum-map sources are agent-first")
    _require(dest_spec.orientation is Orientation.PERCEPT_FIRST,
             "sum-map destinations are percept-first")
    _require(source_spec.universe == dest_spec.universe,
             "sum-map keeps the universe fixed")
    root = empty_history(Orientation.AGENT_FIRST)

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            opening = pi.act(root)
            parts = []
            for x, w in opening.items:
                parts.append(
                    (w, pi.act(History((x,) + g.symbols, Orientation.AGENT_FIRST))))
            return Distribution.mix(parts)
        return _closure_agent(dest_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        deps = [root]
        for x in source_spec.universe.actions:
            deps.append(History((x,) + g.symbols, Orientation.AGENT_FIRST))
        return deps

    return Translation(
        name="sum-map",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=None,
        dependency_fn=dependency_fn,
        claimed_status="none",
    )


def make_drop_first_action(source_spec: FrameworkSpec, dest_spec: FrameworkSpec,
                           x0: Symbol) -> Translation:
    """Agent-only map pretending the opening action was always x0."""
    _require(source_spec.orientation is Orientation.AGENT_FIRST,
             "drop-first-action sources are agent-first")
    _require(dest_spec.orientation is Orientation.PERCEPT_FIRST,
             "drop-first-action destinations are percept-first")
    _require(source_spec.universe == dest_spec.universe,
             "drop-first-action keeps the universe fixed")
    if not source_spec.universe.is_action(x0):
        raise UnknownSymbol(f"{x0!r} is not an action")

    def agent_fn(pi: Agent) -> Agent:
        def rule(g: History) -> Distribution:
            return pi.act(History((x0,) + g.symbols, Orientation.AGENT_FIRST))
        return _closure_agent(dest_spec, rule)

    def dependency_fn(g: History) -> list[History]:
        return [History((x0,) + g.symbols, Orientation.AGENT_FIRST)]

    return Translation(
        name=f"drop-first-action:{x0}",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=None,
        dependency_fn=dependency_fn,
        claimed_status="none",
    )


# The randomization diamond: which inclusion edges carry a weak translation.
# An identity/inclusion pair is well-typed from G to G' exactly when G's
# agents embed in G''s and G''s environments embed back in G's.
DIAMOND_CLASSES = ("F", "F^a", "F^e", "F^ae")
POSITIVE_EDGES = (
    ("F^e", "F"),
    ("F^e", "F^a"),
    ("F^e", "F^ae"),
    ("F", "F^a"),
    ("F^ae", "F^a"),
)
NEGATIVE_EDGES = tuple(
    (a, b) for a in DIAMOND_CLASSES for b in DIAMOND_CLASSES
    if a != b and (a, b) not in POSITIVE_EDGES)


def diamond_specs(base_spec: FrameworkSpec) -> dict[str, FrameworkSpec]:
    """The four determinism variants of a deterministic base spec."""
    from .policies import randomize  # local import to avoid a cycle
    _require(base_spec.deterministic_agents and base_spec.deterministic_environments,
             "the diamond is built over a deterministic base framework")
    base = base_spec if base_spec.name else base_spec.with_name("F")
    return {
        "F": base,
        "F^a": randomize(base, "agents"),
        "F^e": randomize(base, "environments"),
        "F^ae": randomize(base, "both"),
    }


def make_inclusion(edge: str, base_spec: FrameworkSpec) -> Translation:
    """Identity agent map plus inclusion environment map along a diamond edge."""
    try:
        src_label, dst_label = edge.split("->")
    except ValueError:
        raise SpecMismatch(f"bad edge {edge!r}; expected 'SRC->DST'") from None
    specs = diamond_specs(base_spec)
    if src_label not in specs or dst_label not in specs:
        raise SpecMismatch(f"unknown diamond corner in {edge!r}")
    src, dst = specs[src_label], specs[dst_label]
    agents_embed = src.deterministic_agents or not dst.deterministic_agents
    envs_embed = dst.deterministic_environments or not src.deterministic_environments
    if not (agents_embed and envs_embed):
        raise SpecMismatch(
            f"{edge} is not an inclusion edge: the identity maps are ill-typed")

    def agent_fn(pi: Agent) -> Agent:
        return Agent(dst, pi.table, pi.default, name=pi.name)

    def env_fn(mu: Environment) -> Environment:
        return Environment(src, mu.table, mu.default, name=mu.name)

    def lifter_fn(pi: Agent) -> Agent:
        return Agent(src, pi.table, pi.default, name=pi.name)

    return Translation(
        name=f"inclusion:{edge}",
        source_spec=src,
        dest_spec=dst,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=lambda h: [History(h.symbols, src.orientation)],
        claimed_status="weak",
        witness_lifter_fn=lifter_fn,
        value_offset=Fraction(0),
    )


def make_translation(kind: str, *, source_spec: Optional[FrameworkSpec] = None,
                     dest_spec: Optional[FrameworkSpec] = None,
                     base_spec: Optional[FrameworkSpec] = None) -> Translation:
    """Catalog dispatcher for translation ids like "prepend-percept:y0"."""
    head, _, arg = kind.partition(":")
    if head == "inclusion":
        _require(base_spec is not None, "inclusion translations need base_spec")
        return make_inclusion(arg, base_spec)
    _require(source_spec is not None and dest_spec is not None,
             f"{head} needs source_spec and dest_spec")
    if head == "prepend-percept":
        return make_prepend_percept(source_spec, dest_spec, arg)
    if head == "prepend-action":
        return make_prepend_action(source_spec, dest_spec, arg)
    if head == "local-reverse":
        return make_local_reverse(source_spec, dest_spec)
    if head == "times-map":
        return make_times_map(source_spec, dest_spec)
    if head == "sum-map":
        return make_sum_map(source_spec, dest_spec)
    if head == "drop-first-action":
        return make_drop_first_action(source_spec, dest_spec, arg)
    raise SpecMismatch(f"unknown translation kind {kind!r}")


def compose(first: Translation, second: Translation) -> Translation:
    """Apply ``first`` then ``second`` (specs must meet in the middle)."""
    if first.dest_spec.key() != second.source_spec.key():
        raise SpecMismatch(
            f"cannot compose {first.name} . {second.name}: the middle "
            "framework specs differ")

    def agent_fn(pi: Agent) -> Agent:
        return second.apply_agent(first.apply_agent(pi))

    env_fn = None
    if first.env_fn is not None and second.env_fn is not None:
        def env_fn(mu: Environment) -> Environment:  # noqa: F811
            return first.apply_env(second.apply_env(mu))

    def dependency_fn(h: History) -> list[History]:
        out: list[History] = []
        for g in second.dependency(h):
            for d in first.dependency(g):
                if d not in out:
                    out.append(d)
        return out

    lifter_fn = None
    if first.witness_lifter_fn is not None and second.witness_lifter_fn is not None:
        def lifter_fn(pi: Agent) -> Agent:  # noqa: F811
            return first.lift_witness(second.lift_witness(pi))

    offset = None
    if first.value_offset is not None and second.value_offset is not None:
        offset = first.value_offset + second.value_offset

    rank = min(_STATUS_RANK[first.claimed_status],
               _STATUS_RANK[second.claimed_status])
    status = [k for k, v in _STATUS_RANK.items() if v == rank][0]
    return Translation(
        name=f"{first.name} . {second.name}",
        source_spec=first.source_spec,
        dest_spec=second.dest_spec,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=dependency_fn,
        claimed_status=status if env_fn is not None else "none",
        witness_lifter_fn=lifter_fn,
        value_offset=offset,
    )


# ==== law reports ====

@dataclass
class LawReport:
    """Outcome of one corpus-bounded law check."""

    law: str                    # condition1|condition2|condition3|injectivity|strongness
    verdict: str                # pass|fail|inconclusive
    witness: Optional[dict]
    instances_checked: int
    notes: str = ""

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "verdict": self.verdict,
            "witness": self.witness,
            "instances_checked": self.instances_checked,
            "notes": self.notes,
        }


def all_ordered_pairs(agents: Sequence[Agent]) -> list[Tuple[Agent, Agent]]:
    return [(a, b) for a in agents for b in agents if a is not b]


def check_condition1(translation: Translation,
                     agent_pairs: Sequence[Tuple[Agent, Agent]],
                     env_corpus: Sequence[Environment]) -> LawReport:
    """Order preservation over every (ordered pair, destination env) instance."""
    agents: list[Agent] = []
    for a, b in agent_pairs:
        for x in (a, b):
            if not any(x is y for y in agents):
                agents.append(x)
    images = {id(a): translation.apply_agent(a) for a in agents}
    instances = 0
    for mu in env_corpus:
        nu = translation.apply_env(mu)
        v_src = {id(a): total_value(a, nu).value for a in agents}
        v_dst = {id(a): total_value(images[id(a)], mu).value for a in agents}
        for pi, rho in agent_pairs:
            instances += 1
            src_le = v_src[id(pi)] <= v_src[id(rho)]
            dst_le = v_dst[id(pi)] <= v_dst[id(rho)]
            if src_le != dst_le:
                witness = {
                    "env": mu.name,
                    "pi": pi.name, "rho": rho.name,
                    "v_pi_source": frac_to_str(v_src[id(pi)]),
                    "v_rho_source": frac_to_str(v_src[id(rho)]),
                    "v_pi_dest": frac_to_str(v_dst[id(pi)]),
                    "v_rho_dest": frac_to_str(v_dst[id(rho)]),
                }
                return LawReport("condition1", "fail", witness, instances)
    return LawReport("condition1", "pass", None, instances)


def _mutate_at(agent: Agent, g: History) -> Agent:
    """Copy of ``agent`` with a genuinely different choice at g only."""
    actions = agent.spec.universe.actions
    current = agent.act(g)
    if current.is_point():
        i = actions.index(current.point_value())
        new = Distribution.point(actions[(i + 1) % len(actions)])
    else:
        new = Distribution.point(actions[0])
        if new == current:  # pragma: no cover - uniform vs point never equal
            new = Distribution.point(actions[1])
    table = dict(agent.table)
    table[g.symbols] = new
    return Agent(agent.spec, table, agent.default, name=f"{agent.name}~{g.to_str()}")


def check_condition2(translation: Translation, agent: Agent, h: History,
                     probe_depth: Optional[int] = None,
                     max_probes: int = 60) -> LawReport:
    """Mutate the source agent off the declared dependency set of h and
    require the image's choice at h to stay fixed."""
    deps = translation.dependency(h)
    dep_keys = {d.symbols for d in deps}
    if probe_depth is None:
        probe_depth = max([len(d) for d in deps] + [0]) + 2
    sites = [g for g in histories_up_to(translation.source_spec, probe_depth,
                                        turn="agent")
             if g.symbols not in dep_keys][:max_probes]
    baseline = translation.apply_agent(agent).act(h)
    instances = 0
    for g in sites:
        mutant = _mutate_at(agent, g)
        for d in deps:
            assert mutant.act(d) == agent.act(d), "mutation leaked into the dependency set"
        instances += 1
        image = translation.apply_agent(mutant).act(h)
        if image != baseline:
            witness = {
                "h": h.to_str(),
                "mutated_at": g.to_str(),
                "baseline": baseline.to_json(),
                "after_mutation": image.to_json(),
                "declared_dependency": [d.to_str() for d in deps],
            }
            return LawReport("condition2", "fail", witness, instances,
                             notes="image at h changed although the dependency "
                                   "set was untouched")
    return LawReport("condition2", "pass", None, instances,
                     notes=f"dependency set size {len(deps)}, "
                           f"{instances} off-set mutations")


def check_condition3(translation: Translation, agent: Agent,
                     pinned: Sequence[History], family: Sequence[Agent],
                     probes: Sequence[History]) -> LawReport:
    """Search the family for an agent whose image matches on ``pinned`` but
    deviates at some probe history."""
    base = translation.apply_agent(agent)
    base_pinned = [base.act(g) for g in pinned]
    base_probe = [base.act(g) for g in probes]
    instances = 0
    any_deviation = False
    for rho in family:
        if rho is agent:
            continue
        instances += 1
        image = translation.apply_agent(rho)
        deviates_at = None
        for g, want in zip(probes, base_probe):
            if image.act(g) != want:
                deviates_at = g
                break
        if deviates_at is not None:
            any_deviation = True
        if any(image.act(g) != want for g, want in zip(pinned, base_pinned)):
            continue
        if deviates_at is not None:
            witness = {
                "rho": rho.name,
                "agrees_on": [g.to_str() for g in pinned],
                "deviates_at": deviates_at.to_str(),
            }
            return LawReport("condition3", "pass", witness, instances)
    if not any_deviation:
        return LawReport(
            "condition3", "fail", {"pinned": [g.to_str() for g in pinned]},
            instances,
            notes="no family member's image deviates anywhere on the probe "
                  "slice; the image map looks constant")
    return LawReport(
        "condition3", "inconclusive", None, instances,
        notes="no family member matched on the pinned set while deviating "
              "on the probe slice; a larger family might")


def environments_equal_on(depth: int, a: Environment, b: Environment) -> bool:
    """Exact pointwise comparison on every env turn of length <= depth."""
    for h in histories_up_to(a.spec, depth, turn="env"):
        if a.emit(h) != b.emit(h):
            return False
    return True


def check_weak(translation: Translation,
               agent_pairs: Sequence[Tuple[Agent, Agent]],
               env_corpus: Sequence[Environment],
               probe_depth: Optional[int] = None) -> LawReport:
    """Condition 1 plus injectivity of the environment map on the corpus."""
    c1 = check_condition1(translation, agent_pairs, env_corpus)
    if c1.verdict != "pass":
        return c1
    if probe_depth is None:
        probe_depth = translation.source_spec.table_depth + 2
    images = [(mu, translation.apply_env(mu)) for mu in env_corpus]
    instances = c1.instances_checked
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            # a pair indistinguishable before mapping owes us nothing
            if environments_equal_on(probe_depth, images[i][0], images[j][0]):
                continue
            instances += 1
            if environments_equal_on(probe_depth, images[i][1], images[j][1]):
                witness = {
                    "mu": images[i][0].name,
                    "nu": images[j][0].name,
                    "note": f"images agree on every env turn to depth {probe_depth}",
                }
                return LawReport("injectivity", "fail", witness, instances,
                                 notes="environment map collides on the corpus")
    return LawReport("injectivity", "pass", None, instances,
                     notes=f"condition1 passed on {c1.instances_checked} instances; "
                           f"no image collision to depth {probe_depth}")


def environment_rewards_nowhere(env: Environment) -> bool:
    """True if no reachable node within the horizon emits a rewarding percept.

    This is exhaustive over the environment's own support tree, so a True
    verdict really does mean every agent values this environment at 0.
    """
    spec = env.spec
    univ = spec.universe
    frontier = [empty_history(spec.orientation)]
    while frontier:
        h = frontier.pop()
        if len(h) >= spec.reward_horizon:
            continue
        if h.is_env_turn():
            dist = env.emit(h)
            for y, _ in dist.items:
                if univ.reward(y) != 0:
                    return False
                frontier.append(h.append(y))
        else:
            for x in univ.actions:
                frontier.append(h.append(x))
    return True


def check_strong(translation: Translation,
                 env_corpus: Sequence[Environment],
                 dest_agents: Sequence[Agent],
                 source_agents: Optional[Sequence[Agent]] = None) -> LawReport:
    """Whenever the corpus distinguishes two destination environments, their
    images must be distinguished too — via the witness lifter when the
    translation has one, otherwise by searching the source corpus."""
    if source_agents is None:
        from .policies import deterministic_agent_corpus
        source_agents = deterministic_agent_corpus(
            translation.source_spec, min(2, translation.source_spec.table_depth))
    vals: dict[Tuple[int, int], Fraction] = {}

    def v(agent: Agent, env: Environment) -> Fraction:
        key = (id(agent), id(env))
        if key not in vals:
            vals[key] = total_value(agent, env).value
        return vals[key]

    distinguished = 0
    for mu, nu in itertools.combinations(env_corpus, 2):
        pair_witness = None
        for pi in dest_agents:
            for rho in dest_agents:
                if pi is rho:
                    continue
                if (v(pi, mu) <= v(rho, mu)) != (v(pi, nu) <= v(rho, nu)):
                    pair_witness = (pi, rho)
                    break
            if pair_witness:
                break
        if pair_witness is None:
            continue
        distinguished += 1
        mu_s, nu_s = translation.apply_env(mu), translation.apply_env(nu)
        found = False
        if translation.witness_lifter_fn is not None:
            lp = translation.lift_witness(pair_witness[0])
            lr = translation.lift_witness(pair_witness[1])
            if (v(lp, mu_s) <= v(lr, mu_s)) != (v(lp, nu_s) <= v(lr, nu_s)):
                found = True
        if not found:
            for pi in source_agents:
                for rho in source_agents:
                    if pi is rho:
                        continue
                    if (v(pi, mu_s) <= v(rho, mu_s)) != (v(pi, nu_s) <= v(rho, nu_s)):
                        found = True
                        break
                if found:
                    break
        if not found:
            notes = ("destination pair is distinguished but no source witness "
                     "was found (lifter and corpus both failed)")
            if environment_rewards_nowhere(mu_s) and environment_rewards_nowhere(nu_s):
                notes += ("; both images reward nothing within the horizon, so "
                          "no agent whatsoever distinguishes them")
            witness = {
                "mu": mu.name, "nu": nu.name,
                "dest_pi": pair_witness[0].name, "dest_rho": pair_witness[1].name,
                "v_pi_mu": frac_to_str(v(pair_witness[0], mu)),
                "v_rho_mu": frac_to_str(v(pair_witness[1], mu)),
                "v_pi_nu": frac_to_str(v(pair_witness[0], nu)),
                "v_rho_nu": frac_to_str(v(pair_witness[1], nu)),
            }
            return LawReport("strongness", "fail", witness, distinguished,
                             notes=notes)
    if distinguished == 0:
        return LawReport("strongness", "inconclusive", None, 0,
                         notes="no corpus-distinguished destination pairs")
    return LawReport("strongness", "pass", None, distinguished,
                     notes=f"{distinguished} distinguished destination pairs, "
                           "all re-witnessed in the source")
