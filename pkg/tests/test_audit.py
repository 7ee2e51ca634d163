"""Falsification machinery: mixtures, chains, counting, the diamond."""

from fractions import Fraction

import pytest

from rlxlate.audit import (
    PropertyPrerequisiteFailed,
    RangeTooSmall,
    WrongAgentMapKind,
    build_descending_chain,
    candidate_translation,
    cardinality_audit,
    demo_nonstrong_times_map,
    diamond_report,
    enumerate_env_candidates,
    environment_value_extremes,
    falsify_mixture,
    minimal_disagreement_step,
    validate_environment_range,
)
from rlxlate.cli import catalog_translation, diamond_base
from rlxlate.core import History, Orientation, SpecMismatch
from rlxlate.policies import (
    Environment,
    constant_agent,
    uniform_agent,
    zero_environment,
)
from rlxlate.translations import diamond_specs

AP = Orientation.AGENT_FIRST


# ==== mixture falsifier ====


def test_falsify_mixture_rejects_unknown_heads():
    t = catalog_translation("times-map", 2, 4)
    with pytest.raises(WrongAgentMapKind):
        falsify_mixture(t)


def test_falsify_mixture_drop_first_action():
    t = catalog_translation("drop-first-action:a0", 2, 4)
    rep = falsify_mixture(t)
    assert rep.outcome == "contradiction_exhibited"
    assert rep.argument == "mixture"
    assert rep.details["family_size"] == 225
    assert rep.details["destination_env"] == "first-action-a0-pays"
    assert rep.details["destination_values"] == {
        "always-a0": "1", "always-a1": "0", "half-mix": "1"}
    assert all(row["violated_pair"] for row in rep.details["candidates"])


def test_falsify_mixture_drop_violation_shapes():
    """Tied constants violate directly (source tie vs strict destination);
    otherwise either the constant pair or the pinned mixture fails."""
    t = catalog_translation("drop-first-action:a0", 2, 4)
    rep = falsify_mixture(t)
    for row in rep.details["candidates"]:
        pair = (row["violated_pair"]["pi"], row["violated_pair"]["rho"])
        if row["v_pi"] == row["v_rho"]:
            assert pair == ("always-a0", "always-a1")
        else:
            assert pair in (("always-a0", "always-a1"),
                            ("always-a0", "half-mix"))


def test_falsify_mixture_sum_map():
    t = catalog_translation("sum-map", 2, 4)
    rep = falsify_mixture(t)
    assert rep.outcome == "contradiction_exhibited"
    assert rep.details["family_size"] == 225
    assert rep.details["destination_env"] == "changed-opening-pays"
    # the half-mix image switches its opening with prob 1/4 net of the
    # mixture's own conditional re-weighting; the constants never do
    assert rep.details["destination_values"] == {
        "always-a0": "0", "always-a1": "0", "half-mix": "1/4"}
    for row in rep.details["candidates"]:
        pair = (row["violated_pair"]["pi"], row["violated_pair"]["rho"])
        if row["v_pi"] != row["v_rho"]:
            # destination ties the constants that the source splits
            assert set(pair) == {"always-a0", "always-a1"}
        else:
            # constants tie on both sides; the mixture's strict destination
            # value breaks the source tie
            assert pair == ("half-mix", "always-a0")


def test_falsify_mixture_exact_identity_on_a_named_candidate():
    t = catalog_translation("drop-first-action:a0", 2, 4)
    src = t.source_spec
    cands = enumerate_env_candidates(src, depth=1)
    assert len(cands) == 225
    rep = falsify_mixture(t, candidates=cands[:5])
    assert rep.details["family_size"] == 5
    for row in rep.details["candidates"]:
        # v_sigma == (v_pi + v_rho)/2 is asserted inside the audit; re-check
        # it from the serialized row anyway
        s, p, r = (Fraction(row[k]) for k in ("v_sigma", "v_pi", "v_rho"))
        assert s == (p + r) / 2
        assert set(row) == {"candidate", "v_pi", "v_rho", "v_sigma",
                            "violated_pair"}


def test_zero_candidate_violates_on_the_constant_pair():
    t = catalog_translation("drop-first-action:a0", 2, 4)
    zero = zero_environment(t.source_spec, name="all-zero")
    rep = falsify_mixture(t, candidates=[zero])
    row = rep.details["candidates"][0]
    assert row["v_pi"] == row["v_rho"] == row["v_sigma"] == "0"
    # all sources tie while the destination strictly prefers always-a0
    w = row["violated_pair"]
    assert (w["pi"], w["rho"]) == ("always-a0", "always-a1")
    assert (w["v_pi_dest"], w["v_rho_dest"]) == ("1", "0")


# ==== non-strongness demo ====


def test_demo_nonstrong_times_map_splits_a_tie():
    prepend = catalog_translation("prepend-percept:n0", 2, 4)
    times = catalog_translation("times-map", 2, 4)
    rep = demo_nonstrong_times_map(prepend, times)
    assert rep.outcome == "contradiction_exhibited"
    assert rep.witness == {"v_pi": "0", "v_rho": "0",
                           "v_pi_dagger": "1", "v_rho_dagger": "0"}
    assert rep.details["tie_in_source"] is True
    assert rep.details["split_in_images"] is True
    assert rep.details["composite_idempotent_on_probes"] is True
    assert rep.details["first_percept"] == "n1"


# ==== descending chain ====


@pytest.fixture(scope="module")
def base():
    return diamond_base(2)  # horizon 12, integer rewards, value range (0, 4)


@pytest.fixture(scope="module")
def f_to_fae(base):
    specs = diamond_specs(base)
    return specs["F"], specs["F^ae"]


def test_chain_guards(f_to_fae):
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "identity", "mode")
    with pytest.raises(RangeTooSmall):
        build_descending_chain(cand, chain_length=4)  # 4 <= hi - lo
    from dataclasses import replace
    shallow = candidate_translation(replace(F, reward_horizon=8),
                                    replace(Fae, reward_horizon=8),
                                    "identity", "mode")
    with pytest.raises(SpecMismatch):
        build_descending_chain(shallow, chain_length=6)


def test_chain_identity_mode_frozen_run(f_to_fae):
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "identity", "mode")
    plan, rep = build_descending_chain(cand, chain_length=6)
    assert rep.outcome == "contradiction_exhibited"
    data = plan.to_json()
    assert data["probabilities"] == ["1", "1/4", "1/16", "1/64", "1/256", "1/1024"]
    assert data["agents"] == ["pi-0", "pi-1", "pi-2", "pi-3", "pi-4", "pi-5", "pi-6"]
    assert rep.details["destination_values"] == \
        ["0", "1", "1/4", "1/16", "1/64", "1/256", "1/1024"]
    assert rep.details["source_values"] == ["0", "1", "0", "0", "0", "0", "0"]
    assert (rep.witness["pi"], rep.witness["rho"]) == ("pi-2", "pi-0")


def test_chain_margins_and_stake_bounds(f_to_fae):
    """p_1 = 1; every later stake is below each earlier margin scaled by the
    remaining halvings, and the whole tail after step k stays below the k-th
    margin."""
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "identity", "mode")
    plan, _ = build_descending_chain(cand, chain_length=6)
    p, d = plan.probabilities, plan.margins
    K = len(p)
    assert p[0] == 1
    for i in range(K):
        assert d[i] > 0
        for j in range(i):
            assert p[i] < d[j] / 2 ** (i - j)
    for k in range(K):
        assert sum(p[k + 1:]) < d[k]


def test_chain_dilution_candidate(f_to_fae):
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "dilution", "mode")
    plan, rep = build_descending_chain(cand, chain_length=6)
    assert rep.outcome == "contradiction_exhibited"
    assert plan.to_json()["probabilities"][:2] == ["1", "1/8"]
    assert (rep.witness["pi"], rep.witness["rho"]) == ("pi-2", "pi-0")


def test_chain_zero_env_candidate(f_to_fae):
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "identity", "zero")
    _, rep = build_descending_chain(cand, chain_length=6)
    assert rep.outcome == "contradiction_exhibited"
    # the zeroed image ties everything at 0, so the very first strict pair
    # of the chain is already a violation
    assert (rep.witness["pi"], rep.witness["rho"]) == ("pi-1", "pi-0")


def test_chain_nested_sites(f_to_fae):
    F, Fae = f_to_fae
    cand = candidate_translation(F, Fae, "identity", "mode")
    plan, _ = build_descending_chain(cand, chain_length=6)
    for a, b in zip(plan.histories, plan.histories[1:]):
        assert a.is_prefix_of(b, proper=True)
        assert len(b) >= len(a) + 2


# ==== cardinality audit ====


def test_cardinality_guards(base):
    specs = diamond_specs(base)
    cand = candidate_translation(specs["F^ae"], specs["F"], "mode", "inclusion")
    with pytest.raises(RangeTooSmall):
        cardinality_audit(cand, n=4)  # 5 range values hold 5 mixtures


def test_cardinality_mode_inclusion_frozen_run(base):
    specs = diamond_specs(base)
    cand = candidate_translation(specs["F^ae"], specs["F"], "mode", "inclusion")
    rep = cardinality_audit(cand, n=6)
    assert rep.outcome == "contradiction_exhibited"
    assert rep.argument == "cardinality"
    assert (rep.witness["pi"], rep.witness["rho"]) == ("mix-1/6", "mix-0/6")
    assert len(rep.details["mixtures"]) == 7
    sources = {m["source"] for m in rep.details["mixtures"]}
    assert len(sources) == 7  # pigeonhole premise: all distinct
    for m in rep.details["mixtures"]:
        assert "/" not in m["dest"]  # destination values are integers


def test_cardinality_zero_env_candidate_direct_violation(base):
    specs = diamond_specs(base)
    cand = candidate_translation(specs["F^ae"], specs["F"], "mode", "zero")
    rep = cardinality_audit(cand, n=6)
    assert rep.outcome == "contradiction_exhibited"
    # the split pair itself already violates order: no mixtures needed
    assert rep.details.get("note") == \
        "the split pair already violates order preservation"
    assert rep.witness["pi"] == "uniform"


def test_minimal_disagreement_step_is_minimal(base):
    specs = diamond_specs(base)
    cand = candidate_translation(specs["F^ae"], specs["F"], "mode", "inclusion")
    pi = uniform_agent(specs["F^ae"], name="uniform")
    pi_img = cand.apply_agent(pi)
    from rlxlate.valuation import determined_path
    path = determined_path(pi_img, zero_environment(specs["F"]), 10)
    rho, h_plus = minimal_disagreement_step(cand, pi, path, min_depth=2)
    assert len(h_plus) >= 2
    assert cand.apply_agent(rho).act(h_plus) != pi_img.act(h_plus)
    # strictly shallower path nodes agree
    for q in path:
        if q.is_agent_turn() and q.is_prefix_of(h_plus, proper=True):
            assert cand.apply_agent(rho).act(q) == pi_img.act(q)


# ==== candidate styles ====


def test_candidate_styles_shape(base):
    specs = diamond_specs(base)
    F, Fae = specs["F"], specs["F^ae"]
    mode = candidate_translation(Fae, F, "mode", "inclusion")
    pi = uniform_agent(Fae)
    img = mode.apply_agent(pi)
    assert img.act(History((), AP)).point_value() == "a0"  # lex tiebreak
    mode_rev = candidate_translation(Fae, F, "mode-rev", "inclusion")
    img_rev = mode_rev.apply_agent(pi)
    assert img_rev.act(History((), AP)).point_value() == "a1"
    dil = candidate_translation(F, Fae, "dilution", "mode")
    d = dil.apply_agent(constant_agent(F, "a0")).act(History((), AP))
    assert d.prob("a0") == Fraction(3, 4) and d.prob("a1") == Fraction(1, 4)
    with pytest.raises(SpecMismatch):
        candidate_translation(F, Fae, "nope", "mode")
    with pytest.raises(SpecMismatch):
        candidate_translation(F, Fae, "identity", "nope")


def test_environment_range_validation(base):
    mu = zero_environment(base)
    rep = validate_environment_range(mu, base)
    assert rep["in_family"] and rep["min_path_reward"] == "0"
    greedy = Environment(base, {}, ("fixed", "r"), name="all-pay")
    lo, hi = environment_value_extremes(greedy)
    assert hi == 6  # six env turns inside horizon 12
    rep2 = validate_environment_range(greedy, base)
    assert not rep2["in_family"]  # 6 > declared max of 4


# ==== diamond ====


def test_diamond_report_confirms_expected_structure(base):
    rep = diamond_report(base)
    assert rep["matches_expected"] is True
    assert len(rep["cells"]) == 12
    for edge in rep["positive_edges"]:
        assert rep["cells"][edge]["expected"] == "weak"
        assert rep["cells"][edge]["verdict"] == "confirmed"
    for edge in rep["negative_edges"]:
        cell = rep["cells"][edge]
        assert cell["expected"] == "none"
        assert cell["verdict"] == "confirmed"
        assert len(cell["candidates"]) == 3
        for cand in cell["candidates"]:
            assert cand["outcome"] == "contradiction_exhibited"
            assert cand["reduced_via"] in ("descending_chain", "cardinality")


def test_diamond_prerequisites_guard():
    from dataclasses import replace
    bad = replace(diamond_base(2), value_range=None)
    with pytest.raises(PropertyPrerequisiteFailed):
        diamond_report(bad)
