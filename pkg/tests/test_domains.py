import random

import pytest

from effsolve.domains import DOMAINS, get_domain
from effsolve.domains.analogy import (
    CLOSING,
    ZIGZAG,
    AnalogyDomain,
    analogy_fixture,
    closing_distance,
    zigzag_distance,
)
from effsolve.domains.gauss import (
    ITERATE,
    PAIRING,
    SEARCH,
    GaussConfig,
    GaussDomain,
    expert_casebase,
    gauss_candidates,
    iterate_sum,
    novice_casebase,
    pairing_sum,
)
from effsolve.retrieval import RetrievalConfig, abstract_gist, retrieve, similarity
from effsolve.scheduler import schedule


def by_id(cands):
    return {c.id: c for c in cands}


def test_gauss_small_n_prefers_iteration():
    cands = by_id(gauss_candidates(10, novice_casebase()[0]))
    assert set(cands) == {ITERATE, SEARCH}
    assert cands[ITERATE].ratio == pytest.approx(0.1)
    assert cands[SEARCH].ratio == pytest.approx(0.0015)
    assert schedule(list(cands.values())).ids[0] == ITERATE


def test_gauss_large_n_prefers_search():
    cands = by_id(gauss_candidates(10**6, novice_casebase()[0]))
    assert cands[ITERATE].ratio == pytest.approx(1e-6)
    assert schedule(list(cands.values())).ids[0] == SEARCH


def test_gauss_pairing_needs_retrievable_case():
    assert PAIRING in by_id(gauss_candidates(10, expert_casebase()[0]))
    assert PAIRING not in by_id(gauss_candidates(10, []))
    with pytest.raises(ValueError):
        gauss_candidates(0, [])


def test_pairing_hundred():
    assert pairing_sum(100) == 5050


def test_both_methods_agree_with_direct_sum():
    for n in range(1, 10_001):
        assert pairing_sum(n) == n * (n + 1) // 2
    for n in range(1, 2_001, 37):
        assert iterate_sum(n) == sum(range(1, n + 1))


def test_gauss_domain_costs_and_execution():
    d = GaussDomain(GaussConfig(c_add=2.0))
    problem = d.make_problem({"params": {"n": 50}})
    assert d.cost_scale(ITERATE, problem) == 100.0
    cand = by_id(d.builtin_candidates(problem, [], None, 3))
    assert "search_for_better#3" in cand
    assert d.execute(problem, cand[ITERATE], random.Random(0)).solution == 1275
    with pytest.raises(ValueError):
        d.make_problem({"params": {"n": 0}})


def test_gauss_search_outcomes():
    d = GaussDomain()
    problem = d.make_problem({"params": {"n": 1000}})
    search = by_id(d.builtin_candidates(problem, [], None, 1))["search_for_better#1"]
    rng = random.Random(5)
    results = [d.execute(problem, search, rng) for _ in range(2000)]
    hits = [r for r in results if r.discovered]
    assert all(r.discovered[0].id == PAIRING and r.discovered[0].source == "constructed" for r in hits)
    assert len(hits) / len(results) == pytest.approx(0.3, abs=0.04)


def test_gauss_subproblem_only_when_allowed():
    d = GaussDomain()
    plain = d.make_problem({"params": {"n": 100}})
    assert d.subproblems(plain) == []
    allowed = d.make_problem({"id": "big", "params": {"n": 100, "allow_subgoal": True}})
    (sub,) = d.subproblems(allowed)
    assert (sub.params["n"], sub.depth) == (10, 1)
    assert d.constructed_candidate(allowed, sub, 55).source == "constructed"
    assert d.constructed_candidate(allowed, sub, 54) is None


def test_fly_answer():
    _, _, targets = analogy_fixture()
    fly = next(t for t in targets if t.id.startswith("fly"))
    assert fly.quantities["gap"] / (fly.quantities["speed_a"] + fly.quantities["speed_b"]) == pytest.approx(1.25)
    assert closing_distance(fly.quantities) == pytest.approx(125.0)
    assert fly.answer == 125.0


def test_all_targets_consistent():
    _, _, targets = analogy_fixture()
    for t in targets:
        assert closing_distance(t.quantities) == pytest.approx(t.answer)
        assert zigzag_distance(t.quantities) == pytest.approx(t.answer, rel=1e-9)


def test_analogy_surfaces_far_gists_equal():
    cases, tax, targets = analogy_fixture()
    cfg = RetrievalConfig()
    mates = [c for c in cases if c.method == CLOSING]
    assert mates
    for t in targets:
        gist = abstract_gist(t.surface, tax, cfg.salience_floor, cfg.gist_levels)
        for case in mates:
            assert similarity(t.surface, case.surface) < 0.2
            assert similarity(gist, case.gist) == 1.0


def test_surface_only_retrieval_cannot_find_the_method():
    cases, tax, targets = analogy_fixture()
    for t in targets:
        hits = retrieve(t.surface, cases, tax, k=len(cases), mode="surface_only")
        assert all(h.score == 0.0 for h in hits)
        deep = retrieve(t.surface, cases, tax, k=1, mode="with_abstraction")[0]
        assert deep.level == "gist" and not deep.explained


def test_analogy_domain_zigzag_below_floor():
    d = AnalogyDomain()
    _, _, targets = analogy_fixture()
    problem = d.make_problem(targets[0].as_problem_dict())
    (zig,) = d.builtin_candidates(problem, [], None, 1)
    assert zig.id == ZIGZAG
    assert zig.ratio < 0.001


def test_registry():
    assert set(DOMAINS) == {"gauss", "csp", "analogy"}
    assert get_domain("gauss", GaussConfig(c_add=3.0)).config.c_add == 3.0
    with pytest.raises(ValueError):
        get_domain("chess")
