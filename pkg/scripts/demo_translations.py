#!/usr/bin/env python3
"""Walk the translation catalog and print what each map actually certifies.

For every catalog entry at the chosen desk scale this prints the claimed
status next to the observed one: the value law residual over full corpora,
order preservation, the weak check (injectivity included), and the strong
check where a witness lifter exists.  Agent-only maps are reported with
their locality verdict instead, since there is no environment map to audit.

Usage:
    python scripts/demo_translations.py [--depth 2] [--horizon 4]
"""

import argparse
import sys
from dataclasses import replace

from rlxlate.cli import catalog_translation, diamond_base
from rlxlate.core import History, Orientation
from rlxlate.policies import (
    deterministic_agent_corpus,
    deterministic_environment_corpus,
)
from rlxlate.translations import (
    POSITIVE_EDGES,
    all_ordered_pairs,
    check_condition1,
    check_condition2,
    check_strong,
    check_weak,
    make_inclusion,
)
from rlxlate.valuation import total_value

TOKENS = (
    "prepend-percept:n0",
    "prepend-percept:r",
    "prepend-action:a0",
    "local-reverse",
    "times-map",
    "sum-map",
    "drop-first-action:a0",
)


def corpora_for(translation, agent_depth=2, env_depth=1):
    agents = deterministic_agent_corpus(
        replace(translation.source_spec, deterministic_agents=True), agent_depth)
    envs = deterministic_environment_corpus(
        replace(translation.dest_spec, deterministic_environments=True), env_depth)
    # re-badge into the translation's own (possibly randomized) specs
    agents = [type(a)(translation.source_spec, a.table, a.default, name=a.name)
              for a in agents]
    envs = [type(e)(translation.dest_spec, e.table, e.default, name=e.name)
            for e in envs]
    return agents, envs


def law_residuals(translation, agents, envs):
    bad = 0
    for nu in envs:
        nu_src = translation.apply_env(nu)
        for sigma in agents:
            lhs = total_value(sigma, nu_src).value
            rhs = total_value(translation.apply_agent(sigma), nu).value \
                + translation.value_offset
            bad += lhs != rhs
    return bad, len(agents) * len(envs)


def report_full(translation):
    agents, envs = corpora_for(translation)
    pairs = all_ordered_pairs(agents)
    bad, n = law_residuals(translation, agents, envs)
    print(f"  value law        : {n - bad}/{n} instances exact "
          f"(offset {translation.value_offset})")
    c1 = check_condition1(translation, pairs, envs)
    print(f"  order preserving : {c1.verdict} ({c1.instances_checked} instances)")
    weak = check_weak(translation, pairs, envs)
    line = f"  weak             : {weak.verdict}"
    if weak.verdict == "fail":
        line += f" (law: {weak.law})"
    print(line)
    if translation.witness_lifter_fn is not None:
        dest_agents = deterministic_agent_corpus(
            replace(translation.dest_spec, deterministic_agents=True), 2)
        dest_agents = [type(a)(translation.dest_spec, a.table, a.default,
                               name=a.name) for a in dest_agents]
        strong = check_strong(translation, envs, dest_agents,
                              source_agents=agents)
        print(f"  strong           : {strong.verdict}")


def report_agent_only(translation):
    # probe locality at a short agent turn of the destination framework
    agents, _ = corpora_for(translation)
    dst = translation.dest_spec
    if dst.orientation is Orientation.PERCEPT_FIRST:
        h = History((dst.universe.percepts[0],), dst.orientation)
    else:
        h = History((), dst.orientation)
    c2 = check_condition2(translation, agents[0], h)
    print(f"  locality         : {c2.verdict} "
          f"(dependency set size {len(translation.dependency(h))})")
    print("  env map          : none declared (nothing to audit)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--horizon", type=int, default=4)
    args = ap.parse_args(argv)

    for token in TOKENS:
        t = catalog_translation(token, args.depth, args.horizon)
        print(f"{t.name}  [{t.source_spec.name} -> {t.dest_spec.name}]  "
              f"claimed: {t.claimed_status}")
        if t.env_fn is None:
            report_agent_only(t)
        else:
            report_full(t)
        print()

    base = diamond_base(args.depth)
    print("inclusions over the determinism diamond:")
    for a, b in POSITIVE_EDGES:
        t = make_inclusion(f"{a}->{b}", base)
        agents, envs = corpora_for(t, agent_depth=1)
        weak = check_weak(t, all_ordered_pairs(agents), envs)
        print(f"  {t.name:<22} claimed: {t.claimed_status}  weak: {weak.verdict}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
