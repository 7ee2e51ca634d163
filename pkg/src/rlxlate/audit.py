"""Falsification machinery for candidate translations.

Each audit takes a *candidate* translation (agent map plus env map) and a
claimed direction and mechanically exhibits a violated instance of the
order-preservation law, following one of four argument shapes:

    mixture           a 1/2-1/2 behavioural mixture forces a source value
                      identity no destination ordering can accommodate
    nonstrong_demo    a composed endo-map must reverse a tie, so no
                      completion of it preserves equivalence
    descending_chain  a strictly descending destination value chain longer
                      than the source's integer value range (pigeonhole)
    cardinality       more forced-distinct source values than the
                      destination's integer range can seat (pigeonhole)

Every number involved is an exact Fraction; outcomes carry explicit
witnesses so a report can be replayed by hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .core import (
    ChainStalled,
    DegenerateRewards,
    Distribution,
    FrameworkSpec,
    History,
    NoDisagreementFound,
    PropertyPrerequisiteFailed,
    RangeTooSmall,
    SpecMismatch,
    Symbol,
    WrongAgentMapKind,
    empty_history,
    frac_to_str,
    histories_up_to,
)
from .policies import (
    Agent,
    Environment,
    constant_agent,
    cutoff_environment,
    deterministic_agent_corpus,
    deterministic_environment_corpus,
    flexible_environment,
    grid_distributions,
    indicator_environment,
    mixture_agent,
    random_agent,
    random_environment,
    uniform_agent,
    zero_environment,
)
from .translations import (
    DIAMOND_CLASSES,
    NEGATIVE_EDGES,
    POSITIVE_EDGES,
    Translation,
    all_ordered_pairs,
    check_weak,
    compose,
    diamond_specs,
    make_inclusion,
)
from .valuation import determined_path, total_value


# ==== report types ====

@dataclass
class AuditReport:
    """Outcome of one falsification run."""

    target: str
    argument: str      # mixture | nonstrong_demo | descending_chain | cardinality
    outcome: str       # contradiction_exhibited | no_contradiction_found
    witness: Optional[dict]
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "argument": self.argument,
            "outcome": self.outcome,
            "witness": self.witness,
            "details": self.details,
        }


@dataclass
class DescendingChainPlan:
    """The data of a constructed descending chain."""

    agents: list            # pi_0 .. pi_K (source agents)
    histories: list         # h_1 .. h_K (deviation sites, destination turns)
    actions: list           # x_1 .. x_K (deviation actions)
    probabilities: list     # p_1 .. p_K (flexible-environment weights)
    margins: list           # delta_1 .. delta_K (guaranteed value gaps)
    reach: list             # F(h_1) .. F(h_K) (pinned-path reach of h_i)

    def to_json(self) -> dict:
        return {
            "agents": [a.name for a in self.agents],
            "histories": [h.to_str() for h in self.histories],
            "actions": list(self.actions),
            "probabilities": [frac_to_str(p) for p in self.probabilities],
            "margins": [frac_to_str(d) for d in self.margins],
            "reach": [frac_to_str(f) for f in self.reach],
        }


# ==== shared helpers ====

def _overlay(agent: Agent, g: History, dist: Distribution, name: str) -> Agent:
    table = dict(agent.table)
    table[g.symbols] = dist
    return Agent(agent.spec, table, agent.default, name=name)


def environment_value_extremes(env: Environment) -> Tuple[Fraction, Fraction]:
    """Min and max total path reward over the environment's support tree."""
    spec = env.spec
    univ = spec.universe

    def rec(h: History) -> Tuple[Fraction, Fraction]:
        if len(h) >= spec.reward_horizon:
            return Fraction(0), Fraction(0)
        if h.is_agent_turn():
            lows, highs = [], []
            for x in univ.actions:
                lo, hi = rec(h.append(x))
                lows.append(lo)
                highs.append(hi)
            return min(lows), max(highs)
        lows, highs = [], []
        for y, _ in env.emit(h).items:
            lo, hi = rec(h.append(y))
            r = univ.reward(y)
            lows.append(r + lo)
            highs.append(r + hi)
        return min(lows), max(highs)

    return rec(empty_history(spec.orientation))


def validate_environment_range(env: Environment, spec: FrameworkSpec) -> dict:
    """Check an audited image environment stays in the declared family."""
    if spec.value_range is None or not spec.integer_rewards:
        raise RangeTooSmall(
            "the source framework must declare integer rewards and a value range")
    for _, r in spec.universe.reward_items:
        if r.denominator != 1:
            raise RangeTooSmall(f"universe reward {r} is not an integer")
    lo, hi = environment_value_extremes(env)
    ok = (lo.denominator == 1 and hi.denominator == 1
          and spec.value_range[0] <= lo and hi <= spec.value_range[1])
    return {
        "min_path_reward": frac_to_str(lo),
        "max_path_reward": frac_to_str(hi),
        "declared_range": list(spec.value_range),
        "in_family": ok,
    }


def enumerate_env_candidates(spec: FrameworkSpec, depth: int = 1,
                             denominator: int = 4) -> list[Environment]:
    """Exhaustive family of source environments with grid-probability tables
    on env turns of length <= depth and a zero-reward tail.

    In a mixture audit the only part of a candidate environment map that
    matters is its output at the one constructed destination environment, so
    quantifying over possible outputs quantifies over the whole map family.
    """
    zero = spec.universe.zero_reward_percepts()
    if not zero:
        raise DegenerateRewards("candidate family needs a zero-reward percept")
    keys = []
    options = []
    for h in histories_up_to(spec, depth, turn="env"):
        keys.append(h.symbols)
        if len(h) >= spec.reward_horizon:
            options.append(grid_distributions(zero, denominator))
        else:
            options.append(grid_distributions(spec.universe.percepts, denominator))
    out = []
    for idx, choice in enumerate(itertools.product(*options)):
        table = {k: d for k, d in zip(keys, choice)}
        out.append(Environment(spec, table, ("fixed", zero[0]),
                               name=f"cand-{idx:04d}"))
    return out


def _violated_pair(order: Sequence[Tuple[str, Fraction, Fraction]]):
    """First ordered pair whose source/destination <=-orderings differ.

    ``order`` rows are (label, source value, destination value).
    """
    for (la, sa, da), (lb, sb, db) in itertools.permutations(order, 2):
        if (sa <= sb) != (da <= db):
            return {
                "pi": la, "rho": lb,
                "v_pi_source": frac_to_str(sa), "v_rho_source": frac_to_str(sb),
                "v_pi_dest": frac_to_str(da), "v_rho_dest": frac_to_str(db),
            }
    return None


# ==== mixture audits ====

def falsify_mixture(translation: Translation,
                    candidates: Optional[Sequence[Environment]] = None,
                    denominator: int = 4) -> AuditReport:
    """Show no environment map can complete an agent-only map.

    For drop-first-action: with pi = always-x0, rho = always-x1 and sigma
    their 1/2-1/2 mixture, sigma's image coincides with pi's, yet sigma's
    source value is pinned to the average of pi's and rho's.  A destination
    environment rewarding exactly an opening x0 then leaves every candidate
    source environment with an impossible order to reproduce.

    For sum-map the same mixture trick applies with one twist: the mixture's
    image is *strictly* above the constant agents' images in a destination
    environment rewarding a change of opening action, while its source value
    is still pinned to their average.
    """
    head = translation.name.split(":")[0]
    if head not in ("drop-first-action", "sum-map"):
        raise WrongAgentMapKind(
            f"falsify_mixture knows drop-first-action and sum-map, not {head!r}")
    src, dst = translation.source_spec, translation.dest_spec
    univ = src.universe
    if not univ.unit_reward_percepts() or not univ.zero_reward_percepts():
        raise DegenerateRewards("the audit universe needs reward-0 and reward-1 percepts")
    unit = univ.unit_reward_percepts()[0]
    zero = univ.zero_reward_percepts()[0]
    if candidates is None:
        candidates = enumerate_env_candidates(src, depth=1, denominator=denominator)

    actions = univ.actions
    if head == "drop-first-action":
        x0 = translation.name.split(":")[1]
        x_alt = next(a for a in actions if a != x0)
    else:
        x0, x_alt = actions[0], actions[1]

    pi = constant_agent(src, x0, name=f"always-{x0}")
    rho = constant_agent(src, x_alt, name=f"always-{x_alt}")
    sigma = mixture_agent(pi, rho, Fraction(1, 2), name="half-mix")

    # The single destination environment the whole argument needs.
    if head == "drop-first-action":
        def mu_rule(g: History) -> Distribution:
            if len(g) == 2 and g.symbols[1] == x0:
                return Distribution.point(unit)
            return Distribution.point(zero)
        mu_name = f"first-action-{x0}-pays"
    else:
        def mu_rule(g: History) -> Distribution:
            if len(g) == 4 and g.symbols[1] != g.symbols[3]:
                return Distribution.point(unit)
            return Distribution.point(zero)
        mu_name = "changed-opening-pays"
    mu_hat = Environment(dst, {}, ("closure", mu_rule), name=mu_name)

    agents = [pi, rho, sigma]
    images = [translation.apply_agent(a) for a in agents]
    dest_vals = [total_value(img, mu_hat).value for img in images]

    rows = []
    all_violated = True
    for cand in candidates:
        p = total_value(pi, cand).value
        r = total_value(rho, cand).value
        s = total_value(sigma, cand).value
        assert s == (p + r) / 2, "behavioural mixture lost its value identity"
        order = [(pi.name, p, dest_vals[0]), (rho.name, r, dest_vals[1]),
                 (sigma.name, s, dest_vals[2])]
        violation = _violated_pair(order)
        if violation is None:
            all_violated = False
        rows.append({
            "candidate": cand.name,
            "v_pi": frac_to_str(p),
            "v_rho": frac_to_str(r),
            "v_sigma": frac_to_str(s),
            "violated_pair": violation,
        })
    outcome = ("contradiction_exhibited"
               if all_violated and rows else "no_contradiction_found")
    details = {
        "destination_env": mu_hat.name,
        "destination_values": {
            a.name: frac_to_str(v) for a, v in zip(agents, dest_vals)},
        "family_size": len(rows),
        "mixture_identity": "v_sigma == (v_pi + v_rho)/2 verified per candidate",
        "candidates": rows,
    }
    witness = next((row for row in rows if row["violated_pair"]), None)
    return AuditReport(
        target=translation.name,
        argument="mixture",
        outcome=outcome,
        witness=witness,
        details=details,
    )


# ==== non-strongness demo for the percept-dropping composite ====

def demo_nonstrong_times_map(prepend: Translation, times: Translation) -> AuditReport:
    """Compose prepend-percept with the percept-dropping map; show the result
    cannot preserve environment equivalence.

    The composite replays histories as if the first percept had been y0.  An
    environment that opens with a different percept and pays for an opening
    x0 ties two agents that only differ after seeing y0 -- while their
    composite images are split apart.  Any environment assigned to it by a
    completion must therefore reverse a tie, so it cannot be equivalent to
    the original.
    """
    y0 = prepend.name.split(":")[1]
    dagger = compose(prepend, times)
    spec = dagger.source_spec
    univ = spec.universe
    zeros = [p for p in univ.zero_reward_percepts() if p != y0]
    units = univ.unit_reward_percepts()
    if not zeros or not units:
        raise DegenerateRewards(
            "the demo needs a zero-reward percept besides the prepended one "
            "and a reward-1 percept")
    y1, unit = zeros[0], units[0]
    zero = univ.zero_reward_percepts()[0]
    x0, x1 = univ.actions[0], univ.actions[1]

    def pi_rule(g: History) -> Distribution:
        return Distribution.point(x0 if g.symbols[0] == y0 else x1)

    pi = Agent(spec, {}, ("closure", pi_rule), name="x0-after-y0")
    rho = constant_agent(spec, x1, name=f"always-{x1}")

    def mu_rule(g: History) -> Distribution:
        if len(g) == 0:
            return Distribution.point(y1)
        if len(g) == 2 and g.symbols == (y1, x0):
            return Distribution.point(unit)
        return Distribution.point(zero)

    mu = Environment(spec, {}, ("closure", mu_rule), name=f"opens-{y1}-pays-{x0}")

    pi_d = dagger.apply_agent(pi)
    rho_d = dagger.apply_agent(rho)
    v = {
        "v_pi": total_value(pi, mu).value,
        "v_rho": total_value(rho, mu).value,
        "v_pi_dagger": total_value(pi_d, mu).value,
        "v_rho_dagger": total_value(rho_d, mu).value,
    }
    tied = v["v_pi"] == v["v_rho"]
    split = v["v_pi_dagger"] != v["v_rho_dagger"]

    # The composite is idempotent on images: applying it twice changes nothing.
    pi_dd = dagger.apply_agent(pi_d)
    probes = histories_up_to(spec, 3, turn="agent")
    idempotent = all(pi_dd.act(g) == pi_d.act(g) for g in probes)

    outcome = "contradiction_exhibited" if tied and split else "no_contradiction_found"
    return AuditReport(
        target=dagger.name,
        argument="nonstrong_demo",
        outcome=outcome,
        witness={k: frac_to_str(x) for k, x in v.items()},
        details={
            "environment": mu.name,
            "first_percept": y1,
            "probe": f"composite image of {pi.name} opens with {x0} "
                     f"after {y1} although {pi.name} itself does not",
            "tie_in_source": tied,
            "split_in_images": split,
            "composite_idempotent_on_probes": idempotent,
            "conclusion": "any environment a completion assigns to this one "
                          "must order the pair strictly, so it cannot be "
                          "equivalent to the original",
        },
    )


# ==== chain-extension step (single-point modifications along a path) ====

def minimal_disagreement_step(candidate: Translation, pi: Agent, path: Sequence[History],
               min_depth: int = 2, max_depth: Optional[int] = None
               ) -> Tuple[Agent, History]:
    """Find a single-point modification of pi whose image agrees with pi's
    image strictly below some path agent node and differs there.

    Returns (rho, node).  Searches nodes shallow-first, so the returned node
    is minimal along the path.
    """
    pi_img = candidate.apply_agent(pi)
    actions = candidate.source_spec.universe.actions
    agent_nodes = [h for h in path if h.is_agent_turn()]
    for g in agent_nodes:
        if len(g) < min_depth:
            continue
        if max_depth is not None and len(g) > max_depth:
            break
        src_g = History(g.symbols, candidate.source_spec.orientation)
        for a in actions:
            rho = _overlay(pi, src_g, Distribution.point(a),
                           name=f"{pi.name}~{src_g.to_str() or 'e'}={a}")
            rho_img = candidate.apply_agent(rho)
            if rho_img.act(g) == pi_img.act(g):
                continue
            if all(rho_img.act(q) == pi_img.act(q)
                   for q in agent_nodes if q.is_prefix_of(g, proper=True)):
                return rho, g
    raise NoDisagreementFound(
        "no single-point modification moved the image along the path")


# ==== descending chain audit (deterministic source into doubly-random target) ====

def _koenig_path(agent: Agent, env: Environment, length: int) -> list[History]:
    """Positive-probability path: lexicographically first supported action at
    agent turns, the environment's (point) percept at env turns."""
    h = empty_history(env.spec.orientation)
    out = [h]
    for _ in range(length):
        if h.is_agent_turn():
            support = agent.act(h).support()
            sym = next(s for s in env.spec.universe.actions if s in support)
        else:
            sym = env.emit(h).point_value()
        h = h.append(sym)
        out.append(h)
    return out


def build_descending_chain(candidate: Translation, chain_length: int = 6
                           ) -> Tuple[DescendingChainPlan, AuditReport]:
    """Refute a candidate translation of a deterministic framework into its
    doubly-randomized variant.

    Builds source agents pi_0..pi_K whose images deviate from pi_0's image at
    nested sites of one positive-probability path, then a flexible
    environment paying geometrically shrinking stakes at the deviations.
    The image values come out strictly descending, which needs K+1 distinct
    source values -- more than the declared integer range can hold, so some
    ordered pair must violate order preservation.  That pair is exhibited
    exactly.
    """
    src, dst = candidate.source_spec, candidate.dest_spec
    if src.value_range is None or not src.integer_rewards:
        raise RangeTooSmall("the source framework must declare an integer value range")
    lo, hi = src.value_range
    if chain_length <= hi - lo:
        raise RangeTooSmall(
            f"chain length {chain_length} cannot out-count range [{lo},{hi}]")
    K = chain_length
    need = 2 * K  # deepest deviation site
    if dst.reward_horizon < need:
        raise SpecMismatch(
            f"destination horizon {dst.reward_horizon} too small for a "
            f"length-{K} chain (needs >= {need})")

    actions = src.universe.actions
    pi0 = constant_agent(src, actions[0], name="pi-0")
    pi0_img = candidate.apply_agent(pi0)
    mu0 = zero_environment(dst)
    path = _koenig_path(pi0_img, mu0, 2 * K)
    path_action = {path[i].symbols: path[i + 1].symbols[-1]
                   for i in range(len(path) - 1) if path[i].is_agent_turn()}

    agents = [pi0]
    images = [pi0_img]
    sites: list[History] = []
    dev_actions: list[Symbol] = []
    gaps: list[Fraction] = []
    # the final path node has no recorded continuation and no room for a
    # reward below it, so deviation sites stop one step earlier
    agent_nodes = [h for h in path[:-1] if h.is_agent_turn()]

    for i in range(1, K + 1):
        floor = len(sites[-1]) + 2 if sites else 0
        found = None
        for g in agent_nodes:
            if len(g) < floor:
                continue
            src_g = History(g.symbols, src.orientation)
            for a in actions:
                if a == pi0.act(src_g).point_value():
                    continue
                rho = _overlay(pi0, src_g, Distribution.point(a), name=f"pi-{i}")
                rho_img = candidate.apply_agent(rho)
                d_new, d_old = rho_img.act(g), pi0_img.act(g)
                if d_new == d_old:
                    continue
                if not all(rho_img.act(q) == pi0_img.act(q)
                           for q in agent_nodes if q.is_prefix_of(g, proper=True)):
                    continue
                # deviation action: biggest image gain off the reference path
                best, best_gap = None, Fraction(0)
                for x in actions:
                    if x == path_action[g.symbols]:
                        continue
                    gap = d_new.prob(x) - d_old.prob(x)
                    if gap > best_gap:
                        best, best_gap = x, gap
                if best is None:
                    continue
                found = (rho, rho_img, g, best, best_gap)
                break
            if found:
                break
        if found is None:
            raise ChainStalled(f"no image deviation available at chain step {i}")
        rho, rho_img, g, x_i, gap = found
        agents.append(rho)
        images.append(rho_img)
        sites.append(g)
        dev_actions.append(x_i)
        gaps.append(gap)

    # pinned-path reach of each site under the reference image
    def pinned_reach(h: History) -> Fraction:
        w = Fraction(1)
        for i in range(len(h)):
            q = h.prefix(i)
            if q.is_agent_turn():
                w *= pi0_img.act(q).prob(h.symbols[i])
        return w

    reach = [pinned_reach(h) for h in sites]
    probs: list[Fraction] = []
    margins: list[Fraction] = []
    for i in range(K):
        if i == 0:
            p = Fraction(1)
        else:
            p = min(margins[j] / 2 ** (i + 1 - (j + 1)) for j in range(i)) / 2
        probs.append(p)
        delta = p * reach[i] * gaps[i]
        assert delta > 0, "chain step produced a non-positive margin"
        margins.append(delta)

    prob_entries = [(sites[i].append(dev_actions[i]), probs[i]) for i in range(K)]
    pinned = [(h, mu0.emit(h).point_value()) for h in path if h.is_env_turn()]
    mu = flexible_environment(dst, prob_entries, pinned, name="chain-env")

    dest_vals = [total_value(img, mu).value for img in images]
    for i in range(1, K):
        assert dest_vals[i] > dest_vals[i + 1], "destination chain not descending"
    assert dest_vals[K] > dest_vals[0], "chain floor not above the reference"

    plan = DescendingChainPlan(
        agents=agents, histories=sites, actions=dev_actions,
        probabilities=probs, margins=margins, reach=reach)

    nu = candidate.apply_env(mu)
    family = validate_environment_range(nu, src)
    if not family["in_family"]:
        return plan, AuditReport(
            target=candidate.name,
            argument="descending_chain",
            outcome="contradiction_exhibited",
            witness={"reason": "image environment leaves the declared family",
                     **family},
            details={"plan": plan.to_json()},
        )

    source_vals = [total_value(a, nu).value for a in agents]
    violation = None
    for k in range(1, K + 1):
        for ell in [0] + list(range(k + 1, K + 1)):
            if source_vals[k] <= source_vals[ell]:  # destination says strictly >
                violation = {
                    "pi": agents[k].name, "rho": agents[ell].name,
                    "v_pi_source": frac_to_str(source_vals[k]),
                    "v_rho_source": frac_to_str(source_vals[ell]),
                    "v_pi_dest": frac_to_str(dest_vals[k]),
                    "v_rho_dest": frac_to_str(dest_vals[ell]),
                }
                break
        if violation:
            break
    outcome = ("contradiction_exhibited" if violation
               else "no_contradiction_found")
    details = {
        "plan": plan.to_json(),
        "destination_values": [frac_to_str(v) for v in dest_vals],
        "source_values": [frac_to_str(v) for v in source_vals],
        "image_env_family_check": family,
        "pigeonhole": f"{K + 1} strictly ordered source values demanded inside "
                      f"an integer range of {hi - lo + 1} values",
    }
    return plan, AuditReport(
        target=candidate.name,
        argument="descending_chain",
        outcome=outcome,
        witness=violation,
        details=details,
    )


# ==== cardinality audit (doubly-random source into deterministic target) ====

def cardinality_audit(candidate: Translation, n: int = 6) -> AuditReport:
    """Refute a candidate translation of a doubly-randomized framework into
    its deterministic base.

    A uniform agent and a one-node modification of it get split apart by a
    cutoff environment in the destination; the n+1 mixtures between them
    then carry n+1 forced-distinct source values whose destination images
    must be distinct integers in a range that cannot hold them.
    """
    src, dst = candidate.source_spec, candidate.dest_spec
    if dst.value_range is None or not dst.integer_rewards:
        raise RangeTooSmall("the destination framework must declare an integer value range")
    lo, hi = dst.value_range
    if hi - lo + 1 >= n + 1:
        raise RangeTooSmall(
            f"destination range [{lo},{hi}] is not out-counted by {n + 1} values")

    pi = uniform_agent(src, name="uniform")
    mu0 = zero_environment(dst)
    pi_img = candidate.apply_agent(pi)
    path = determined_path(pi_img, mu0, min(2 * (n + 1), dst.reward_horizon - 2))
    rho, h_plus = minimal_disagreement_step(candidate, pi, path, min_depth=2,
                             max_depth=dst.reward_horizon - 2)
    rho_img = candidate.apply_agent(rho)
    x_hat = pi_img.act(h_plus).point_value()
    mu = cutoff_environment(dst, mu0, h_plus, x_hat)

    d_pi = total_value(pi_img, mu).value
    d_rho = total_value(rho_img, mu).value
    assert d_pi != d_rho, "cutoff environment failed to split the images"

    nu = candidate.apply_env(mu)
    a = total_value(pi, nu).value
    b = total_value(rho, nu).value
    base_rows = [(pi.name, a, d_pi), (rho.name, b, d_rho)]
    direct = _violated_pair(base_rows)
    if direct is not None:
        return AuditReport(
            target=candidate.name,
            argument="cardinality",
            outcome="contradiction_exhibited",
            witness=direct,
            details={
                "h_plus": h_plus.to_str(),
                "x_hat": x_hat,
                "note": "the split pair already violates order preservation",
            },
        )

    rows = []
    for k in range(n + 1):
        w = Fraction(k, n)
        sigma = mixture_agent(pi, rho, w, name=f"mix-{k}/{n}")
        s = total_value(sigma, nu).value
        assert s == w * a + (1 - w) * b, "mixture lost its value identity"
        sigma_img = candidate.apply_agent(sigma)
        d = total_value(sigma_img, mu).value
        assert d.denominator == 1 and lo <= d <= hi, \
            "destination value left the declared integer range"
        rows.append((f"mix-{k}/{n}", s, d))
    source_vals = [s for _, s, _ in rows]
    assert len(set(source_vals)) == n + 1, "mixture values failed to be distinct"

    violation = _violated_pair(rows)
    outcome = ("contradiction_exhibited" if violation
               else "no_contradiction_found")
    return AuditReport(
        target=candidate.name,
        argument="cardinality",
        outcome=outcome,
        witness=violation,
        details={
            "h_plus": h_plus.to_str(),
            "x_hat": x_hat,
            "split": {"v_pi_dest": frac_to_str(d_pi),
                      "v_rho_dest": frac_to_str(d_rho),
                      "v_pi_source": frac_to_str(a),
                      "v_rho_source": frac_to_str(b)},
            "mixtures": [{"agent": lbl, "source": frac_to_str(s),
                          "dest": frac_to_str(d)} for lbl, s, d in rows],
            "pigeonhole": f"{n + 1} distinct source values vs "
                          f"{hi - lo + 1} available destination integers",
        },
    )


# ==== candidate translations for the audits ====

def _mode_symbol(dist: Distribution, alphabet: Sequence[Symbol],
                 reverse: bool = False) -> Symbol:
    order = tuple(reversed(alphabet)) if reverse else tuple(alphabet)
    best, best_p = None, Fraction(-1)
    for s in order:
        p = dist.prob(s)
        if p > best_p:
            best, best_p = s, p
    return best


def candidate_translation(source_spec: FrameworkSpec, dest_spec: FrameworkSpec,
                          agent_style: str, env_style: str,
                          name: str = "") -> Translation:
    """Assemble a plausible-looking candidate translation for auditing.

    Agent styles: identity (re-badge), dilution (half-mix with uniform),
    mode / mode-rev (most likely action, lex or reverse-lex ties).
    Env styles: inclusion (re-badge), mode / mode-rev (most likely percept),
    first-support (lexicographically first supported percept), zero
    (constant zero environment).
    """
    univ = source_spec.universe
    assert univ == dest_spec.universe and \
        source_spec.orientation is dest_spec.orientation

    if agent_style == "identity":
        def agent_fn(pi: Agent) -> Agent:
            return Agent(dest_spec, pi.table, pi.default, name=pi.name)
    elif agent_style == "dilution":
        def agent_fn(pi: Agent) -> Agent:
            base = Distribution.uniform(univ.actions)

            def rule(h: History) -> Distribution:
                return Distribution.mix([(Fraction(1, 2), pi.act(h)),
                                         (Fraction(1, 2), base)])
            return Agent(dest_spec, {}, ("closure", rule), name=f"dilute({pi.name})")
    elif agent_style in ("mode", "mode-rev"):
        rev = agent_style == "mode-rev"

        def agent_fn(pi: Agent) -> Agent:
            def rule(h: History) -> Distribution:
                return Distribution.point(_mode_symbol(pi.act(h), univ.actions, rev))
            return Agent(dest_spec, {}, ("closure", rule), name=f"mode({pi.name})")
    else:
        raise SpecMismatch(f"unknown agent style {agent_style!r}")

    if env_style == "inclusion":
        def env_fn(mu: Environment) -> Environment:
            return Environment(source_spec, mu.table, mu.default, name=mu.name)
    elif env_style in ("mode", "mode-rev"):
        rev = env_style == "mode-rev"

        def env_fn(mu: Environment) -> Environment:
            def rule(h: History) -> Distribution:
                return Distribution.point(
                    _mode_symbol(mu.emit(h), univ.percepts, rev))
            return Environment(source_spec, {}, ("closure", rule),
                               name=f"mode({mu.name})")
    elif env_style == "first-support":
        def env_fn(mu: Environment) -> Environment:
            def rule(h: History) -> Distribution:
                support = mu.emit(h).support()
                sym = next(p for p in univ.percepts if p in support)
                return Distribution.point(sym)
            return Environment(source_spec, {}, ("closure", rule),
                               name=f"first({mu.name})")
    elif env_style == "zero":
        def env_fn(mu: Environment) -> Environment:
            return zero_environment(source_spec, name="zeroed")
    else:
        raise SpecMismatch(f"unknown env style {env_style!r}")

    return Translation(
        name=name or f"cand[{agent_style}+{env_style}]",
        source_spec=source_spec,
        dest_spec=dest_spec,
        agent_fn=agent_fn,
        env_fn=env_fn,
        dependency_fn=lambda h: [History(h.symbols, source_spec.orientation)],
        claimed_status="pre",
    )


# ==== the randomization diamond ====

def _default_negative_family(edge: Tuple[str, str],
                             specs: dict) -> list[Translation]:
    """Three well-typed straw candidates for a negative diamond edge."""
    a, b = edge
    src, dst = specs[a], specs[b]
    # agent maps run source -> destination
    if not src.deterministic_agents and dst.deterministic_agents:
        agent_styles = ["mode", "mode-rev"]
    elif not dst.deterministic_agents:
        agent_styles = ["identity", "dilution"]
    else:
        agent_styles = ["identity"]
    # environment maps run destination -> source
    if src.deterministic_environments and not dst.deterministic_environments:
        env_styles = ["mode", "zero", "first-support"]
    else:
        env_styles = ["inclusion", "zero"]
    picked = [(astyle, env_styles[0]) for astyle in agent_styles]
    picked += [(agent_styles[0], estyle) for estyle in env_styles[1:]]
    return [candidate_translation(src, dst, astyle, estyle,
                                  name=f"{a}->{b}[{astyle}+{estyle}]")
            for astyle, estyle in picked[:3]]


def _reduce_to_direct(edge: Tuple[str, str], cand: Translation,
                      base_spec: FrameworkSpec) -> Tuple[str, Translation]:
    """Compose a negative-edge candidate with inclusion edges until it runs
    between the deterministic base and its doubly-randomized variant."""
    a, b = edge
    t = cand
    if (a, b) == ("F", "F^ae"):
        return "descending_chain", t
    if (a, b) == ("F^ae", "F"):
        return "cardinality", t
    if (a, b) == ("F", "F^e"):
        return "descending_chain", compose(t, make_inclusion("F^e->F^ae", base_spec))
    if (a, b) == ("F^a", "F^ae"):
        return "descending_chain", compose(make_inclusion("F->F^a", base_spec), t)
    if (a, b) == ("F^a", "F"):
        return "cardinality", compose(make_inclusion("F^ae->F^a", base_spec), t)
    if (a, b) == ("F^a", "F^e"):
        inner = compose(make_inclusion("F^ae->F^a", base_spec), t)
        return "cardinality", compose(inner, make_inclusion("F^e->F", base_spec))
    if (a, b) == ("F^ae", "F^e"):
        return "cardinality", compose(t, make_inclusion("F^e->F", base_spec))
    raise SpecMismatch(f"no reduction registered for edge {edge}")


def diamond_report(base_spec: FrameworkSpec,
                   candidate_families: Optional[dict] = None,
                   corpus_depth: int = 2,
                   chain_length: int = 6,
                   mixture_points: int = 6,
                   seed: int = 7) -> dict:
    """Verdict matrix over all ordered pairs of determinism variants.

    Positive edges get inclusion translations checked weak on depth-bounded
    corpora; negative edges get every candidate in the (supplied or default)
    family refuted by reduction to one of the two direct impossibility
    audits.
    """
    specs = diamond_specs(base_spec)
    F = specs["F"]
    # structural prerequisites for the audits
    try:
        probe_env_turn = next(h for h in histories_up_to(F, 2, turn="env"))
        indicator_environment(F, probe_env_turn)
        cutoff_environment(F, zero_environment(F), F.empty(),
                           F.universe.actions[0])
    except Exception as exc:
        raise PropertyPrerequisiteFailed(
            f"base framework lacks indicator/cutoff environments: {exc}") from exc
    if F.value_range is None or not F.integer_rewards:
        raise PropertyPrerequisiteFailed(
            "base framework must declare integer rewards and a value range")

    import numpy as np
    rng = np.random.default_rng(seed)
    cells = {}
    for a, b in [(x, y) for x in DIAMOND_CLASSES for y in DIAMOND_CLASSES if x != y]:
        edge = f"{a}->{b}"
        if (a, b) in POSITIVE_EDGES:
            t = make_inclusion(edge, base_spec)
            agents = deterministic_agent_corpus(specs[a], corpus_depth)
            if not specs[a].deterministic_agents:
                agents = agents + [random_agent(specs[a], corpus_depth, rng,
                                                name=f"rand-agt-{i}")
                                   for i in range(2)]
            envs = deterministic_environment_corpus(specs[b], 1)
            if not specs[b].deterministic_environments:
                envs = envs + [random_environment(specs[b], 1, rng,
                                                  name=f"rand-env-{i}")
                               for i in range(2)]
            law = check_weak(t, all_ordered_pairs(agents), envs)
            cells[edge] = {
                "expected": "weak",
                "verdict": "confirmed" if law.verdict == "pass" else "refuted",
                "law_report": law.to_json(),
            }
        else:
            family = (candidate_families or {}).get((a, b)) or \
                _default_negative_family((a, b), specs)
            outcomes = []
            for cand in family:
                kind, reduced = _reduce_to_direct((a, b), cand, base_spec)
                if kind == "descending_chain":
                    _, rep = build_descending_chain(reduced, chain_length)
                else:
                    rep = cardinality_audit(reduced, mixture_points)
                outcomes.append({
                    "candidate": cand.name,
                    "reduced_via": kind,
                    "outcome": rep.outcome,
                    "witness": rep.witness,
                })
            ok = all(o["outcome"] == "contradiction_exhibited" for o in outcomes)
            cells[edge] = {
                "expected": "none",
                "verdict": "confirmed" if ok and outcomes else "unresolved",
                "candidates": outcomes,
            }
    matches = all(c["verdict"] == "confirmed" for c in cells.values())
    return {
        "positive_edges": [f"{a}->{b}" for a, b in POSITIVE_EDGES],
        "negative_edges": [f"{a}->{b}" for a, b in NEGATIVE_EDGES],
        "cells": cells,
        "matches_expected": matches,
    }
