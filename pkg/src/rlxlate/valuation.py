"""Exact expected values, seeded simulation and corpus equivalence probes.

``expected_value`` enumerates the interaction tree with exact Fractions,
pruning branches once every future percept falls beyond the reward horizon.
Floats appear only in the Monte-Carlo helpers, which exist to cross-check
the exact numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import (
    EmptyCorpus,
    FrameworkMismatch,
    History,
    NoRewardHorizon,
    empty_history,
    frac_to_str,
)
from .policies import Agent, Environment


def _check_compatible(agent: Agent, env: Environment) -> None:
    if agent.spec.universe != env.spec.universe or \
            agent.spec.orientation is not env.spec.orientation:
        raise FrameworkMismatch(
            f"agent {agent.name or '?'} and environment {env.name or '?'} "
            "live in different frameworks")


# ==== exact evaluation ====

@dataclass(frozen=True)
class ValueReport:
    """Result of an exact value computation."""

    value: Fraction
    horizon_used: int
    path_count: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "value": frac_to_str(self.value),
            "horizon_used": self.horizon_used,
            "path_count": self.path_count,
            "converged": self.converged,
        }


def expected_value(agent: Agent, env: Environment, t: int) -> ValueReport:
    """E[sum of rewards over the first t symbols], exactly.

    Branches are pruned once the current depth reaches the environment's
    reward horizon: every percept beyond it has reward 0 by contract, so the
    remaining tail contributes nothing.
    """
    _check_compatible(agent, env)
    horizon = env.spec.reward_horizon
    universe = env.spec.universe
    paths = 0

    def rec(h: History, remaining: int) -> Fraction:
        nonlocal paths
        if remaining == 0 or len(h) >= horizon:
            paths += 1
            return Fraction(0)
        total = Fraction(0)
        if h.is_agent_turn():
            for x, p in agent.act(h).items:
                total += p * rec(h.append(x), remaining - 1)
        else:
            for y, p in env.emit(h).items:
                total += p * (universe.reward(y) + rec(h.append(y), remaining - 1))
        return total

    value = rec(empty_history(env.spec.orientation), t)
    return ValueReport(value=value, horizon_used=t, path_count=paths,
                       converged=t >= 2 * horizon)


def total_value(agent: Agent, env: Environment) -> ValueReport:
    """The limiting value: evaluate past the horizon so the tail is zero."""
    horizon = env.spec.reward_horizon
    if horizon is None or horizon < 0:
        raise NoRewardHorizon("environment spec lacks a usable reward horizon")
    return expected_value(agent, env, 2 * horizon + 2)


# ==== simulation ====

def simulate(agent: Agent, env: Environment, t: int, seed: int) -> dict:
    """One seeded trajectory of t symbols with its exact reward total."""
    _check_compatible(agent, env)
    rng = np.random.default_rng(seed)
    h = empty_history(env.spec.orientation)
    universe = env.spec.universe
    total = Fraction(0)
    for _ in range(t):
        dist = agent.act(h) if h.is_agent_turn() else env.emit(h)
        u = float(rng.random())
        acc = 0.0
        symbol = dist.items[-1][0]
        for s, p in dist.items:
            acc += float(p)
            if u < acc:
                symbol = s
                break
        if universe.is_percept(symbol):
            total += universe.reward(symbol)
        h = h.append(symbol)
    return {
        "trajectory": list(h.symbols),
        "total_reward": total,
        "steps": t,
        "seed": seed,
    }


def _compile_tree(agent: Agent, env: Environment, t: int):
    """Flatten the reachable interaction tree into numpy lookup tables."""
    universe = env.spec.universe
    root = empty_history(env.spec.orientation)
    nodes = [root]
    rows: list[tuple[list[int], list[float], list[float]]] = []
    frontier = [(0, root)]
    for _ in range(t):
        next_frontier = []
        for node_id, h in frontier:
            dist = agent.act(h) if h.is_agent_turn() else env.emit(h)
            ks, cs, rs = [], [], []
            acc = 0.0
            for s, p in dist.items:
                child = h.append(s)
                child_id = len(nodes)
                nodes.append(child)
                acc += float(p)
                ks.append(child_id)
                cs.append(acc)
                rs.append(float(universe.reward(s)) if universe.is_percept(s) else 0.0)
                next_frontier.append((child_id, child))
            cs[-1] = 1.0 + 1e-12  # guard against float round-off at the top
            assert len(rows) == node_id  # BFS ids are assigned in append order
            rows.append((ks, cs, rs))
        frontier = next_frontier
    while len(rows) < len(nodes):  # leaves at depth t
        rows.append(([], [], []))
    width = max(1, max(len(ks) for ks, _, _ in rows))
    kid_m = np.zeros((len(nodes), width), dtype=np.int64)
    cum_m = np.full((len(nodes), width), 2.0)
    rew_m = np.zeros((len(nodes), width))
    for i, (ks, cs, rs) in enumerate(rows):
        for j, (k, c, r) in enumerate(zip(ks, cs, rs)):
            kid_m[i, j] = k
            cum_m[i, j] = c
            rew_m[i, j] = r
        for j in range(len(ks), width):
            kid_m[i, j] = i  # stay put on padding columns
    return kid_m, cum_m, rew_m


def monte_carlo_value(agent: Agent, env: Environment, t: int, n: int,
                      seed: int) -> dict:
    """Sample mean/std of the t-step reward sum over n vectorized walkers."""
    _check_compatible(agent, env)
    kid_m, cum_m, rew_m = _compile_tree(agent, env, t)
    rng = np.random.default_rng(seed)
    pos = np.zeros(n, dtype=np.int64)
    total = np.zeros(n)
    for _ in range(t):
        u = rng.random(n)
        rows_cum = cum_m[pos]
        idx = (u[:, None] >= rows_cum).sum(axis=1)
        idx = np.minimum(idx, rows_cum.shape[1] - 1)
        total += rew_m[pos, idx]
        pos = kid_m[pos, idx]
    return {
        "mean": float(total.mean()),
        "std": float(total.std(ddof=1)) if n > 1 else 0.0,
        "n": n,
        "steps": t,
        "seed": seed,
    }


# ==== deterministic interaction ====

def determined_path(agent: Agent, env: Environment, length: int) -> list[History]:
    """The unique interaction prefix of a deterministic agent/env pair."""
    _check_compatible(agent, env)
    h = empty_history(env.spec.orientation)
    out = [h]
    for _ in range(length):
        dist = agent.act(h) if h.is_agent_turn() else env.emit(h)
        h = h.append(dist.point_value())  # raises NotDeterministic if spread out
        out.append(h)
    return out


# ==== agreement and corpus equivalence ====

def agree_about(mu: Environment, nu: Environment, pi: Agent, rho: Agent) -> bool:
    """Do mu and nu order the pair (pi, rho) the same way?"""
    v_pi_mu = total_value(pi, mu).value
    v_rho_mu = total_value(rho, mu).value
    v_pi_nu = total_value(pi, nu).value
    v_rho_nu = total_value(rho, nu).value
    return (v_pi_mu <= v_rho_mu) == (v_pi_nu <= v_rho_nu)


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of a corpus-bounded equivalence probe between environments.

    ``distinguished`` means some ordered corpus pair is valued in opposite
    orders; the converse verdict is only ever "not distinguished by this
    corpus", never a proof of equivalence.
    """

    distinguished: bool
    witness: Optional[dict]
    corpus_size: int

    @property
    def label(self) -> str:
        return ("distinguished" if self.distinguished
                else "not distinguished by corpus")

    def to_json(self) -> dict:
        return {
            "distinguished": self.distinguished,
            "witness": self.witness,
            "corpus_size": self.corpus_size,
            "label": self.label,
        }


def corpus_equivalent(mu: Environment, nu: Environment,
                      agents: Sequence[Agent]) -> EquivalenceVerdict:
    """Search the agent corpus for an ordered pair the two environments rank
    in opposite orders."""
    if not agents:
        raise EmptyCorpus("corpus_equivalent needs at least one agent")
    vals_mu = [total_value(a, mu).value for a in agents]
    vals_nu = [total_value(a, nu).value for a in agents]
    for i in range(len(agents)):
        for j in range(len(agents)):
            if i == j:
                continue
            if (vals_mu[i] <= vals_mu[j]) != (vals_nu[i] <= vals_nu[j]):
                witness = {
                    "pi": agents[i].name or f"agent-{i}",
                    "rho": agents[j].name or f"agent-{j}",
                    "v_pi_mu": frac_to_str(vals_mu[i]),
                    "v_rho_mu": frac_to_str(vals_mu[j]),
                    "v_pi_nu": frac_to_str(vals_nu[i]),
                    "v_rho_nu": frac_to_str(vals_nu[j]),
                }
                return EquivalenceVerdict(True, witness, len(agents))
    return EquivalenceVerdict(False, None, len(agents))
