"""The translation catalog: value laws, locality, weak/strong checks."""

from fractions import Fraction

import pytest

from conftest import law_corpora, rebadge_agents
from rlxlate.cli import ap_spec, catalog_translation, pa_spec
from rlxlate.core import History, Orientation, SpecMismatch
from rlxlate.policies import (
    constant_agent,
    deterministic_agent_corpus,
    indicator_environment,
    zero_environment,
)
from rlxlate.translations import (
    NEGATIVE_EDGES,
    POSITIVE_EDGES,
    MissingEnvMap,
    all_ordered_pairs,
    check_condition1,
    check_condition2,
    check_condition3,
    check_strong,
    check_weak,
    compose,
    diamond_specs,
    environment_rewards_nowhere,
    environments_equal_on,
    make_inclusion,
    make_translation,
)
from rlxlate.valuation import total_value

AP = Orientation.AGENT_FIRST
PA = Orientation.PERCEPT_FIRST


def law_violations(translation, agents, envs):
    """Count (agent, env) instances breaking the exact value law."""
    bad = 0
    for nu in envs:
        nu_src = translation.apply_env(nu)
        for sigma in agents:
            lhs = total_value(sigma, nu_src).value
            rhs = total_value(translation.apply_agent(sigma), nu).value \
                + translation.value_offset
            bad += lhs != rhs
    return bad


# ==== prepend-percept ====


@pytest.fixture(scope="module")
def prepend():
    return catalog_translation("prepend-percept:n0", 2, 4)


def test_prepend_percept_value_law_exact(prepend):
    agents, envs = law_corpora(prepend)
    assert len(agents) == 8 and len(envs) == 9
    assert law_violations(prepend, agents, envs) == 0
    assert prepend.value_offset == 0  # n0 carries reward 0


def test_prepend_percept_rewarding_prefix():
    t = catalog_translation("prepend-percept:r", 2, 4)
    agents, envs = law_corpora(t)
    assert t.value_offset == 1
    assert law_violations(t, agents, envs) == 0


def test_prepend_percept_agent_map_reads_through_prefix(prepend):
    src = prepend.source_spec
    pi_table_key = ("n0",)
    corpus = deterministic_agent_corpus(src, 2)
    pi = corpus[3]
    image = prepend.apply_agent(pi)
    want = pi.act(History(("n0",), PA))
    assert image.act(History((), AP)) == want
    assert pi_table_key in pi.table


def test_prepend_percept_env_map_prefix_and_off_branch(prepend):
    nu = indicator_environment(prepend.dest_spec, History(("a0",), AP))
    mapped = prepend.apply_env(nu)
    assert mapped.emit(History((), PA)).point_value() == "n0"
    # on the y0 branch the original environment answers
    assert mapped.emit(History(("n0", "a0"), PA)).point_value() == "r"
    # off the y0 branch: a fixed zero-reward percept forever
    assert mapped.emit(History(("n1", "a0"), PA)).point_value() == "n0"
    assert mapped.emit(History(("r", "a0"), PA)).point_value() == "n0"
    assert mapped.emit(History(("r", "a0", "n0", "a1"), PA)).point_value() == "n0"


def test_prepend_percept_conditions(prepend):
    agents, envs = law_corpora(prepend)
    c1 = check_condition1(prepend, all_ordered_pairs(agents), envs)
    assert c1.verdict == "pass" and c1.instances_checked == 56 * 9
    weak = check_weak(prepend, all_ordered_pairs(agents[:4]), envs)
    assert weak.verdict == "pass"
    strong = check_strong(
        prepend, envs,
        rebadge_agents(prepend.dest_spec,
                       deterministic_agent_corpus(prepend.dest_spec, 2)))
    assert strong.verdict == "pass"


def test_prepend_percept_dependency_is_singleton(prepend):
    h = History(("a0", "r"), AP)
    deps = prepend.dependency(h)
    assert [d.symbols for d in deps] == [("n0", "a0", "r")]
    c2 = check_condition2(prepend, constant_agent(prepend.source_spec, "a0"), h)
    assert c2.verdict == "pass"


# ==== prepend-action ====


@pytest.fixture(scope="module")
def prepend_act():
    return catalog_translation("prepend-action:a0", 2, 4)


def test_prepend_action_value_law_exact(prepend_act):
    agents, envs = law_corpora(prepend_act)
    assert prepend_act.value_offset == 0
    assert law_violations(prepend_act, agents, envs) == 0


def test_prepend_action_order_preserving_but_not_weak(prepend_act):
    agents, envs = law_corpora(prepend_act)
    c1 = check_condition1(prepend_act, all_ordered_pairs(agents), envs)
    assert c1.verdict == "pass"
    weak = check_weak(prepend_act, all_ordered_pairs(agents), envs)
    assert weak.verdict == "fail" and weak.law == "injectivity"
    assert prepend_act.claimed_status == "pre"


def test_prepend_action_env_collision_witness(prepend_act):
    """Two destination environments differing only off the a0 opening are
    collapsed by the environment map."""
    dst = prepend_act.dest_spec
    nu1 = zero_environment(dst, name="all-zero")
    nu2 = indicator_environment(dst, History(("a1",), AP), name="pays-after-a1")
    assert not environments_equal_on(3, nu1, nu2)
    m1, m2 = prepend_act.apply_env(nu1), prepend_act.apply_env(nu2)
    assert environments_equal_on(4, m1, m2)
    assert environment_rewards_nowhere(m1) and environment_rewards_nowhere(m2)


# ==== local reverse ====


def test_local_reverse_law_and_weakness():
    t = catalog_translation("local-reverse", 2, 4)
    agents, envs = law_corpora(t, agent_depth=2)
    assert t.value_offset == 0
    assert law_violations(t, agents[:16], envs) == 0
    weak = check_weak(t, all_ordered_pairs(agents[:6]), envs)
    assert weak.verdict == "pass"


def test_local_reverse_agent_queries_reversed_pairs():
    t = catalog_translation("local-reverse", 2, 4)
    pi = deterministic_agent_corpus(t.source_spec, 2)[9]
    image = t.apply_agent(pi)
    # image at <y, x, y'> asks the original at <x, y>: pairs swapped, the
    # trailing unmatched percept dropped
    g = History(("r", "a1", "n0"), PA)
    assert image.act(g) == pi.act(History(("a1", "r"), AP))
    # at the very first move only the (dropped) first percept has been seen
    assert image.act(History(("n1",), PA)) == pi.act(History((), AP))


# ==== agent-only maps ====


@pytest.mark.parametrize("token", ["times-map", "sum-map", "drop-first-action:a0"])
def test_agent_only_maps_have_no_env_map(token):
    t = catalog_translation(token, 2, 4)
    assert t.env_fn is None and t.claimed_status == "none"
    with pytest.raises(MissingEnvMap):
        t.apply_env(zero_environment(t.dest_spec))


def test_times_map_drops_first_percept():
    t = catalog_translation("times-map", 2, 4)
    pi = deterministic_agent_corpus(t.source_spec, 2)[5]
    image = t.apply_agent(pi)
    g = History(("n1",), PA)
    assert image.act(g) == pi.act(History((), AP))
    g2 = History(("n1", "a0", "r"), PA)
    assert image.act(g2) == pi.act(History(("a0", "r"), AP))


def test_sum_map_averages_over_openings():
    t = catalog_translation("sum-map", 2, 4)
    src = t.source_spec
    from rlxlate.core import Distribution
    from rlxlate.policies import Agent
    pi = Agent(src, {
        (): Distribution.of({"a0": Fraction(1, 4), "a1": Fraction(3, 4)}),
        ("a0", "r"): Distribution.point("a0"),
        ("a1", "r"): Distribution.point("a1"),
    }, ("fixed", "a0"))
    image = t.apply_agent(pi)
    d = image.act(History(("r",), PA))
    assert d.prob("a0") == Fraction(1, 4) and d.prob("a1") == Fraction(3, 4)


def test_drop_first_action_fixes_opening():
    t = catalog_translation("drop-first-action:a1", 2, 4)
    pi = deterministic_agent_corpus(t.source_spec, 2)[11]
    image = t.apply_agent(pi)
    g = History(("r",), PA)
    assert image.act(g) == pi.act(History(("a1", "r"), AP))


def test_agent_only_maps_satisfy_their_locality(ap4):
    for token in ("times-map", "sum-map", "drop-first-action:a0"):
        t = catalog_translation(token, 2, 4)
        pi = constant_agent(t.source_spec, "a0")
        h = History(("n0",), PA)
        rep = check_condition2(t, pi, h)
        assert rep.verdict == "pass", token


# ==== condition 3 ====


def test_condition3_finds_pinned_but_deviating_member():
    from rlxlate.core import Distribution
    from rlxlate.policies import Agent
    t = catalog_translation("prepend-percept:n0", 2, 4)
    src = t.source_spec
    base = constant_agent(src, "a0", name="base")
    # agrees with base at <n0> but not deeper in the n0 branch
    deviator = Agent(src, {("n0",): Distribution.point("a0"),
                           ("n0", "a0", "n0"): Distribution.point("a1")},
                     ("fixed", "a0"), name="deviator")
    # disagrees already at the pinned node: must be skipped
    red_herring = Agent(src, {("n0",): Distribution.point("a1")},
                        ("fixed", "a0"), name="red-herring")
    pinned = [History((), AP)]
    probes = [History(("a0", "n0"), AP)]
    rep = check_condition3(t, base, pinned, [red_herring, deviator], probes)
    assert rep.verdict == "pass"
    assert rep.witness["rho"] == "deviator"
    assert rep.witness["deviates_at"] == "a0/n0"


def test_condition3_inconclusive_when_family_cannot_pin():
    t = catalog_translation("prepend-percept:n0", 2, 4)
    family = rebadge_agents(
        t.source_spec, deterministic_agent_corpus(t.source_spec, 2))
    # every corpus table is depth <= 2, so images past the table depth all
    # fall back to the same default and nothing deviates off the pinned node
    rep = check_condition3(t, family[0], [History((), AP)], family[:4],
                           [History(("a0", "n0"), AP)])
    assert rep.verdict in ("inconclusive", "fail")


# ==== composition ====


def test_compose_requires_matching_middle():
    first = catalog_translation("prepend-percept:n0", 2, 4)   # PA(5) -> AP(4)
    wrong = catalog_translation("local-reverse", 2, 6)        # AP(7) -> PA(6)
    with pytest.raises(SpecMismatch):
        compose(first, wrong)


def test_compose_chains_maps_and_offsets():
    first = catalog_translation("prepend-percept:r", 2, 4)    # PA(5) -> AP(4), offset 1
    second = catalog_translation("times-map", 2, 4)           # AP(4) -> PA(5)
    both = compose(first, second)
    assert both.name == "prepend-percept:r . times-map"
    assert both.env_fn is None and both.claimed_status == "none"
    assert both.value_offset is None  # times-map has no value law
    pi = constant_agent(both.source_spec, "a1")
    image = both.apply_agent(pi)
    assert image.act(History(("n0",), PA)).point_value() == "a1"


def test_compose_keeps_weakest_status():
    base = diamond_specs(__import__("rlxlate.cli", fromlist=["diamond_base"])
                         .diamond_base(2))["F"]
    up = make_inclusion("F->F^a", base)
    down = make_inclusion("F^e->F", base)
    both = compose(down, up)
    assert both.claimed_status == "weak"
    assert both.source_spec.name == "F^e" and both.dest_spec.name == "F^a"
    # lifters compose too
    assert both.witness_lifter_fn is not None


def test_composed_inclusion_value_law():
    from rlxlate.cli import diamond_base
    base = diamond_base(2, horizon=6)
    both = compose(make_inclusion("F^e->F", base), make_inclusion("F->F^a", base))
    agents, envs = law_corpora(both, agent_depth=1)
    assert law_violations(both, agents, envs[:8]) == 0


# ==== diamond edges ====


def test_diamond_edge_partition():
    assert len(POSITIVE_EDGES) == 5 and len(NEGATIVE_EDGES) == 7
    assert set(POSITIVE_EDGES) & set(NEGATIVE_EDGES) == set()
    labels = {"F", "F^a", "F^e", "F^ae"}
    assert {a for a, _ in POSITIVE_EDGES + NEGATIVE_EDGES} <= labels


def test_make_inclusion_rejects_negative_edges():
    from rlxlate.cli import diamond_base
    base = diamond_base(2)
    for a, b in NEGATIVE_EDGES:
        with pytest.raises(SpecMismatch):
            make_inclusion(f"{a}->{b}", base)
    for a, b in POSITIVE_EDGES:
        t = make_inclusion(f"{a}->{b}", base)
        assert t.claimed_status == "weak"


def test_inclusion_preserves_values_exactly():
    from rlxlate.cli import diamond_base
    base = diamond_base(2, horizon=6)
    t = make_inclusion("F->F^a", base)
    agents, envs = law_corpora(t, agent_depth=1)
    for pi in agents:
        for nu in envs[:6]:
            assert total_value(pi, t.apply_env(nu)).value == \
                total_value(t.apply_agent(pi), nu).value


def test_make_translation_dispatcher():
    pa = pa_spec(2, 5)
    ap = ap_spec(2, 4)
    t = make_translation("prepend-percept:n1", source_spec=pa, dest_spec=ap)
    assert t.name == "prepend-percept:n1"
    with pytest.raises(SpecMismatch):
        make_translation("no-such-map", source_spec=pa, dest_spec=ap)


def test_horizon_constraints_enforced():
    # prepend-percept needs source horizon >= dest horizon + 1
    with pytest.raises(SpecMismatch):
        make_translation("prepend-percept:n0",
                         source_spec=pa_spec(2, 4), dest_spec=ap_spec(2, 4))
    # local-reverse needs source horizon >= dest horizon + 1 as well
    with pytest.raises(SpecMismatch):
        make_translation("local-reverse",
                         source_spec=ap_spec(2, 4), dest_spec=pa_spec(2, 4))


def test_wrong_framework_inputs_are_refused(prepend):
    ap_agent = constant_agent(prepend.dest_spec, "a0")
    from rlxlate.translations import WrongFramework
    with pytest.raises(WrongFramework):
        prepend.apply_agent(ap_agent)  # AP agent into a PA-source translation
    pa_env = zero_environment(prepend.source_spec)
    with pytest.raises(WrongFramework):
        prepend.apply_env(pa_env)  # source env where a dest env is expected
