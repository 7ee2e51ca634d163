"""Intelligence comparators: who is smarter, according to which electorate.

A comparator orders agents of one framework by their exact values in a set
of environments.  Two shapes are provided:

    principal    a single dictator environment; the order is just the value
                 order there (total, transitive)
    majority     finitely many voter environments; pi <= rho when no more
                 voters strictly prefer pi than strictly prefer rho.  Ties
                 vote both ways.  Majority orders may contain Condorcet
                 cycles -- see condorcet_example -- which is permitted;
                 comparisons are pairwise verdicts, not a ranking.

A weak translation pulls a destination comparator back to the source by
mapping the voter environments through its environment map; order
preservation of the translation then says source comparisons of two agents
match destination comparisons of their images.  check_preservation tests
exactly that, pair by pair.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence, Tuple

from .core import (
    Distribution,
    EmptyCorpus,
    FrameworkMismatch,
    FrameworkSpec,
    History,
    NotWeak,
    Orientation,
    frac_to_str,
)
from .policies import Agent, Environment
from .translations import LawReport, Translation, _STATUS_RANK
from .valuation import total_value


@dataclass
class Comparator:
    """Pairwise agent order induced by exact values in voter environments."""

    kind: str                    # "principal" | "majority"
    environments: Tuple[Environment, ...]
    name: str = ""

    def __post_init__(self):
        if not self.environments:
            raise EmptyCorpus("a comparator needs at least one environment")
        if self.kind == "principal" and len(self.environments) != 1:
            raise EmptyCorpus("a principal comparator has exactly one environment")
        specs = {e.spec.key() for e in self.environments}
        if len(specs) > 1:
            raise FrameworkMismatch("voter environments span different frameworks")
        if not self.name:
            self.name = f"{self.kind}[{'+'.join(e.name for e in self.environments)}]"

    def compare(self, pi: Agent, rho: Agent) -> dict:
        """Both directions of the induced order, with per-voter tallies."""
        votes = []
        strict_pi = strict_rho = ties = 0
        for e in self.environments:
            v_pi = total_value(pi, e).value
            v_rho = total_value(rho, e).value
            if v_pi > v_rho:
                strict_pi += 1
            elif v_rho > v_pi:
                strict_rho += 1
            else:
                ties += 1
            votes.append({"environment": e.name,
                          "v_pi": frac_to_str(v_pi),
                          "v_rho": frac_to_str(v_rho)})
        return {
            "pi": pi.name,
            "rho": rho.name,
            "le": strict_pi <= strict_rho,
            "ge": strict_rho <= strict_pi,
            "strict_pi": strict_pi,
            "strict_rho": strict_rho,
            "ties": ties,
            "votes": votes,
        }


def principal_comparator(env: Environment, name: str = "") -> Comparator:
    return Comparator("principal", (env,), name=name)


def majority_comparator(envs: Sequence[Environment], name: str = "") -> Comparator:
    return Comparator("majority", tuple(envs), name=name)


def induce_source_comparator(translation: Translation,
                             comparator: Comparator) -> Comparator:
    """Pull a destination comparator back through a weak translation.

    The voter environments are mapped through the translation's environment
    map; order preservation is what makes the pulled-back order meaningful,
    so anything claiming less than weak status is refused.
    """
    if _STATUS_RANK[translation.claimed_status] < _STATUS_RANK["weak"]:
        raise NotWeak(
            f"{translation.name} claims status {translation.claimed_status!r}; "
            "comparator transport needs at least a weak translation")
    for e in comparator.environments:
        if e.spec.universe != translation.dest_spec.universe or \
                e.spec.orientation is not translation.dest_spec.orientation:
            raise FrameworkMismatch(
                f"voter environment {e.name} does not live in the "
                "translation's destination framework")
    pulled = tuple(translation.apply_env(e) for e in comparator.environments)
    return Comparator(comparator.kind, pulled,
                      name=f"induced[{translation.name}]({comparator.name})")


def check_preservation(translation: Translation, comparator: Comparator,
                       agent_pairs: Sequence[Tuple[Agent, Agent]]) -> LawReport:
    """Source comparisons must match destination comparisons of the images."""
    induced = induce_source_comparator(translation, comparator)
    image_of: dict[int, Agent] = {}

    def img(a: Agent) -> Agent:
        if id(a) not in image_of:
            image_of[id(a)] = translation.apply_agent(a)
        return image_of[id(a)]

    checked = 0
    for pi, rho in agent_pairs:
        src = induced.compare(pi, rho)
        dst = comparator.compare(img(pi), img(rho))
        checked += 1
        if src["le"] != dst["le"] or src["ge"] != dst["ge"]:
            return LawReport(
                law="comparator-preservation",
                verdict="fail",
                witness={
                    "pi": pi.name, "rho": rho.name,
                    "source": {k: src[k] for k in ("le", "ge")},
                    "destination": {k: dst[k] for k in ("le", "ge")},
                    "source_votes": src["votes"],
                    "destination_votes": dst["votes"],
                },
                instances_checked=checked,
                notes=f"transported by {translation.name}",
            )
    return LawReport(
        law="comparator-preservation",
        verdict="pass",
        witness=None,
        instances_checked=checked,
        notes=f"comparator {comparator.name} transported by {translation.name}",
    )


def tallies_to_csv(comparator: Comparator, agents: Sequence[Agent]) -> str:
    """Pairwise tally table, one row per ordered pair of distinct agents."""
    if not agents:
        raise EmptyCorpus("no agents to compare")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["pi", "rho", "strict_pi", "strict_rho", "ties",
                     "pi_le_rho", "pi_ge_rho"])
    for i, pi in enumerate(agents):
        for j, rho in enumerate(agents):
            if i == j:
                continue
            r = comparator.compare(pi, rho)
            writer.writerow([pi.name, rho.name, r["strict_pi"],
                             r["strict_rho"], r["ties"],
                             str(r["le"]).lower(), str(r["ge"]).lower()])
    return buf.getvalue()


def condorcet_example(spec: FrameworkSpec) -> Tuple[list[Agent], Comparator]:
    """Three agents and three voter environments forming a majority cycle.

    A beats B, B beats C, C beats A, each two voters to one.  Included to
    document that majority comparators are pairwise verdicts and not
    rankings; do not expect transitivity from them.
    """
    univ = spec.universe
    if spec.orientation is not Orientation.AGENT_FIRST:
        raise FrameworkMismatch("the cycle example is written agent-first")
    a0, a1 = univ.actions[0], univ.actions[1]
    units = univ.unit_reward_percepts()
    zeros = univ.zero_reward_percepts()
    if not units or not zeros:
        raise EmptyCorpus("the cycle example needs reward-0 and reward-1 percepts")
    unit, zero = units[0], zeros[0]
    if spec.reward_horizon < 6:
        raise EmptyCorpus("the cycle example needs a reward horizon of at least 6")

    A = Agent(spec, {}, ("fixed", a0), name="A-all-first")
    C = Agent(spec, {}, ("fixed", a1), name="C-all-second")

    def b_rule(h: History) -> Distribution:
        return Distribution.point(a1 if len(h) == 0 else a0)

    B = Agent(spec, {}, ("closure", b_rule), name="B-switch")

    def e1_rule(g: History) -> Distribution:
        # A -> 2, B -> 1, C -> 0
        if len(g) == 1 and g.symbols[0] == a0:
            return Distribution.point(unit)
        if len(g) == 3 and g.symbols[2] == a0:
            return Distribution.point(unit)
        return Distribution.point(zero)

    def e2_rule(g: History) -> Distribution:
        # B -> 2, C -> 1, A -> 0
        if len(g) == 1 and g.symbols[0] == a1:
            return Distribution.point(unit)
        if len(g) == 3 and g.symbols[:3:2] == (a1, a0):
            return Distribution.point(unit)
        return Distribution.point(zero)

    def e3_rule(g: History) -> Distribution:
        # C -> 2, A -> 1, B -> 0
        if len(g) == 1 and g.symbols[0] == a0:
            return Distribution.point(unit)
        if len(g) == 3 and g.symbols[:3:2] == (a1, a1):
            return Distribution.point(unit)
        if len(g) == 5 and g.symbols[::2] == (a1, a1, a1):
            return Distribution.point(unit)
        return Distribution.point(zero)

    envs = [Environment(spec, {}, ("closure", r), name=n)
            for r, n in ((e1_rule, "voter-1"), (e2_rule, "voter-2"),
                         (e3_rule, "voter-3"))]
    return [A, B, C], majority_comparator(envs, name="cycle-majority")
