import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effsolve.domains import get_domain
from effsolve.domains.base import Attempt, Domain
from effsolve.domains.gauss import ITERATE, PAIRING, GaussDomain, novice_casebase
from effsolve.engine import (
    Engine,
    EngineConfig,
    Problem,
    SolverState,
    TraceRecord,
    estimate_candidate,
    read_trace,
    run,
    start_state,
    subgoal,
    write_trace,
)
from effsolve.errors import DepthExceeded
from effsolve.experiments import conformance_violations
from effsolve.memory import MemoryGraph, memory_from_casebase
from effsolve.retrieval import Case, RetrievalResult
from effsolve.scheduler import Candidate


class Stub(Domain):
    """Methods listed in ``answers`` solve the problem; anything else fails."""

    tag = "stub"

    def __init__(self, answers=(), builtin=(), subs=None, constructed=None):
        self.answers = set(answers)
        self.builtin = list(builtin)
        self.subs = subs or (lambda problem: [])
        self.constructed = constructed

    def builtin_candidates(self, problem, casebase, taxonomy, round_index):
        return list(self.builtin)

    def subproblems(self, problem):
        return self.subs(problem)

    def constructed_candidate(self, problem, sub, solution):
        return self.constructed

    def execute(self, problem, candidate, rng):
        method = candidate.payload or candidate.id
        return Attempt(True, "ok") if method in self.answers else Attempt(note="no")

    def goal_check(self, problem, solution):
        return solution == "ok"


def problem(surface=None, depth=0):
    return Problem("p", "stub", surface if surface is not None else {"x": 1.0, "y": 1.0}, depth=depth)


def case(cid, method, surface=None, confidence=1.0, cost=1.0):
    return Case(cid, surface or {"x": 1.0, "y": 1.0}, {}, method, confidence, cost)


def engine(domain, casebase=(), config=None, prob=None, memory=None):
    return Engine(prob or problem(), domain, list(casebase), None, memory or MemoryGraph(), config or EngineConfig())


def total_cost(trace):
    return sum(r.cost for r in trace)


# -- start_state ---------------------------------------------------------------


def test_start_identical_case_goes_to_a1():
    state = start_state(problem(), [case("c", "m")], MemoryGraph(), EngineConfig(), domain=Stub())
    assert state.tag == "A1"
    assert [c.id for c in state.plan] == ["m"]


def test_start_nothing_known_goes_to_b():
    assert start_state(problem(), [], MemoryGraph(), EngineConfig(), domain=Stub()).tag == "B"


def test_start_two_viable_goes_to_a2():
    cb = [case("c1", "m1"), case("c2", "m2", surface={"x": 1.0})]
    assert start_state(problem(), cb, MemoryGraph(), EngineConfig(), domain=Stub()).tag == "A2"


def test_solver_state_requires_plan_in_a1():
    with pytest.raises(ValueError):
        SolverState("A1")
    with pytest.raises(ValueError):
        SolverState("D")


# -- step ---------------------------------------------------------------------


def test_a1_with_solving_candidate_records_solved():
    e = engine(Stub(answers={"m"}), [case("c", "m")])
    assert e.start().tag == "A1"
    rec = e.step()
    assert (rec.state, rec.action, rec.candidate_id) == ("A1", "solved", "m")


def test_b_goes_to_c_after_fruitless_rounds():
    cfg = EngineConfig(fruitless_rounds=3)
    e = engine(Stub(), config=cfg)
    e.start()
    for k in range(3):
        assert e.state.tag == "B"
        rec = e.step()
        assert rec.action == "generate"
    assert e.state.tag == "C"


def test_c_decays_memory_and_returns_to_b():
    mem = MemoryGraph().add_concept("z")
    mem.concepts["z"].activation = 0.8
    cfg = EngineConfig(fruitless_rounds=1, incubation_ticks=3)
    e = engine(Stub(), config=cfg, prob=problem({"q": 1.0}), memory=mem)
    e.start()
    e.step()
    assert e.state.tag == "C"
    before = e.memory.concepts["z"].activation
    rec = e.step()
    assert rec.action == "incubate"
    assert e.state.tag == "B"
    assert e.state.generation_rounds == 0
    assert e.memory.focus == set()
    assert e.memory.concepts["z"].activation == pytest.approx(before * 0.5**3)


def test_failed_test_moves_to_b_when_plan_empty():
    e = engine(Stub(), [case("c", "m")])
    e.start()
    rec = e.step()
    assert rec.action == "test_candidate"
    assert e.state.tag == "B"


def test_progress_monitor_flags_weak_plan():
    cfg = EngineConfig(acceptance_floor=0.5)
    e = engine(Stub(), [case("c", "m", cost=4.0)], config=cfg)
    # ratio 0.25 is below the floor, so nothing is viable
    assert e.start().tag == "B"
    e.state = SolverState("A1", [Candidate("weak", 0.1, 10.0)])
    rec = e.step()
    assert (rec.action, e.state.tag) == ("assess", "A2")


def test_a2_keeps_plan_without_clear_improvement():
    e = engine(Stub())
    e.start()
    plan = [Candidate("cur", 0.5, 1.0)]
    e.state = SolverState("A2", plan)
    e.alternatives = {"alt": Candidate("alt", 0.6, 1.0)}
    rec = e.step()
    assert e.state.tag == "A1"
    assert rec.note == "keep current plan"
    assert [c.id for c in e.state.plan] == ["cur"]


def test_a2_switches_past_margin():
    e = engine(Stub())
    e.start()
    e.state = SolverState("A2", [Candidate("cur", 0.2, 1.0)])
    e.alternatives = {"alt": Candidate("alt", 0.9, 1.0)}
    e.step()
    assert [c.id for c in e.state.plan] == ["alt", "cur"]


# -- run ----------------------------------------------------------------------


def gauss_run(n, budget=1000, **kw):
    d = GaussDomain()
    cb, tax = novice_casebase()
    prob = d.make_problem({"params": {"n": n, **kw}})
    cfg = EngineConfig(budget=budget)
    return run(prob, cb, memory_from_casebase(cb), cfg, d, tax)


def test_run_gauss_ten_iterates():
    out = gauss_run(10)
    assert out.solved and out.method == ITERATE and out.solution == 55
    assert out.steps == 10
    assert out.trace[-1].action == "solved"


def test_run_gauss_large_finds_pairing():
    out = gauss_run(10**6, budget=20_000)
    assert out.solved and out.method == PAIRING
    assert out.solution == 10**6 * (10**6 + 1) // 2
    tested = [r.candidate_id for r in out.trace if r.action in ("test_candidate", "solved")]
    assert ITERATE not in tested


def test_budget_one_fails():
    out = gauss_run(10, budget=1)
    assert not out.solved
    assert out.reason.startswith("BudgetExhausted")
    assert out.trace[-1].action == "failed"
    assert out.steps <= 1


def test_run_leaves_caller_memory_untouched():
    cb, tax = novice_casebase()
    mem = memory_from_casebase(cb)
    snap = mem.to_dict()
    d = GaussDomain()
    run(d.make_problem({"params": {"n": 10}}), cb, mem, EngineConfig(), d, tax)
    assert mem.to_dict() == snap


def test_solving_strengthens_feature_method_links():
    cb, tax = novice_casebase()
    mem = memory_from_casebase(cb)
    d = GaussDomain()
    out = run(d.make_problem({"params": {"n": 10}}), cb, mem, EngineConfig(), d, tax)
    assert out.memory.weight("sum", ITERATE) > mem.weight("sum", ITERATE)


# -- estimate_candidate -------------------------------------------------------


def test_estimate_identity():
    c = estimate_candidate(RetrievalResult("c", 1.0), case("c", "m"), problem())
    assert (c.p, c.t, c.source) == (1.0, 1.0, "recalled_surface")


def test_estimate_product():
    c = estimate_candidate(RetrievalResult("c", 0.5), case("c", "m", confidence=0.8), problem())
    assert c.p == pytest.approx(0.4)


def test_estimate_gist_level():
    res = RetrievalResult("c", 0.9, level="gist", explained=False)
    c = estimate_candidate(res, case("c", "m"), problem())
    assert c.source == "recalled_gist"
    assert c.explained is False


def test_unexplained_candidate_noted_in_trace():
    from effsolve.domains.analogy import analogy_fixture

    cases, tax, targets = analogy_fixture()
    d = get_domain("analogy")
    out = run(d.make_problem(targets[0].as_problem_dict()), cases, MemoryGraph(), EngineConfig(budget=200), d, tax)
    assert out.solved
    assert "intuition" in out.trace[-1].note


def test_estimate_scales_by_domain_cost():
    d = GaussDomain()
    prob = d.make_problem({"params": {"n": 40}})
    c = estimate_candidate(RetrievalResult("c", 1.0), case("c", ITERATE, cost=2.0), prob, d)
    assert c.t == 80.0


# -- subgoals -----------------------------------------------------------------


def test_subgoal_depth_guard():
    cfg = EngineConfig(max_depth=1)
    parent = problem(depth=1)
    e = engine(Stub(), config=cfg, prob=parent)
    with pytest.raises(DepthExceeded):
        subgoal(parent, problem(depth=2), e)
    with pytest.raises(ValueError):
        subgoal(parent, problem(depth=3), e)


def test_subgoal_success_adds_constructed_candidate():
    made = Candidate("from_sub", 1.0, 2.0, "constructed", "m")
    sub = Problem("p/sub", "stub", {"x": 1.0, "y": 1.0}, depth=1)
    d = Stub(answers={"m"}, subs=lambda p: [sub] if p.depth == 0 else [], constructed=made)
    out = engine(d, [case("c", "m")], prob=Problem("p", "stub", {"q": 1.0})).run()
    actions = [r.action for r in out.trace]
    assert "subgoal_push" in actions and "subgoal_pop" in actions
    assert out.solved and out.trace[-1].candidate_id == "from_sub"


def test_failed_subgoal_is_fruitless_round():
    sub = Problem("p/sub", "stub", {"q": 1.0}, depth=1)
    d = Stub(subs=lambda p: [sub] if p.depth == 0 else [])
    cfg = EngineConfig(fruitless_rounds=1, budget=400, subgoal_budget=5)
    e = engine(d, config=cfg, prob=Problem("p", "stub", {"q": 1.0}))
    e.start()
    rec = e.step()
    assert rec.action == "manipulate"
    assert e.state.tag == "C"


def test_subgoal_budget_charged_to_parent():
    sub = Problem("p/sub", "stub", {"q": 1.0}, depth=1)
    d = Stub(subs=lambda p: [sub] if p.depth == 0 else [])
    cfg = EngineConfig(budget=50, subgoal_budget=7)
    out = engine(d, config=cfg, prob=Problem("p", "stub", {"q": 1.0})).run()
    assert out.steps == total_cost(out.trace) <= 50


# -- trace --------------------------------------------------------------------


def test_trace_round_trip(tmp_path):
    out = gauss_run(10**4, budget=3000, allow_subgoal=True)
    path = tmp_path / "t.jsonl"
    write_trace(out.trace, path)
    assert read_trace(path) == out.trace
    import json

    first = json.loads(path.read_text().splitlines()[0])
    assert list(first) == ["step", "state", "action", "candidate_id", "p", "t", "ratio", "note"]


def test_record_costs():
    assert TraceRecord(1, "A1", "test_candidate", "m", 1.0, 2.5, 0.4).cost == 3
    assert TraceRecord(1, "A1", "failed").cost == 0
    assert TraceRecord(1, "B", "generate").cost == 1


# -- properties over randomized runs ------------------------------------------


scenarios = st.one_of(
    st.builds(
        lambda n, budget, sub, seed: ({"domain": "gauss", "params": {"n": n, "allow_subgoal": sub}}, budget, seed),
        st.sampled_from([1, 5, 10, 100, 5000, 10**6]),
        st.integers(1, 3000),
        st.booleans(),
        st.integers(0, 1000),
    ),
    st.builds(
        lambda k, budget, seed: (k, budget, seed),
        st.integers(0, 2),
        st.integers(1, 300),
        st.integers(0, 1000),
    ),
)


def scenario_outcome(scenario, **cfg):
    from effsolve.config import Settings
    from effsolve.domains.analogy import analogy_fixture
    from effsolve.experiments import solve

    data, budget, seed = scenario
    if isinstance(data, int):
        cases, tax, targets = analogy_fixture()
        return solve(targets[data].as_problem_dict(), Settings(), cases, tax, budget=budget, rng_seed=seed, **cfg)
    return solve(data, Settings(), budget=budget, rng_seed=seed, **cfg)


@settings(max_examples=60, deadline=None)
@given(scenarios)
def test_trace_conformance_and_budget(scenario):
    out = scenario_outcome(scenario)
    assert conformance_violations(out.trace) == []
    assert out.steps == total_cost(out.trace) <= scenario[1]
    assert [r.step for r in out.trace] == list(range(1, len(out.trace) + 1))


@settings(max_examples=30, deadline=None)
@given(scenarios)
def test_runs_are_reproducible(scenario):
    a, b = scenario_outcome(scenario), scenario_outcome(scenario)
    assert [r.to_json() for r in a.trace] == [r.to_json() for r in b.trace]


@settings(max_examples=40, deadline=None)
@given(scenarios, st.integers(1, 4))
def test_incubation_preceded_by_fruitless_rounds(scenario, g):
    trace = scenario_outcome(scenario, fruitless_rounds=g).trace
    for i, rec in enumerate(trace):
        if rec.state != "C":
            continue
        assert rec.action in ("incubate", "failed")
        if rec.action == "failed":
            continue
        assert i + 1 == len(trace) or trace[i + 1].state == "B"
        # walk back over this B episode, counting fruitless rounds
        fruitless, j = 0, i - 1
        while j >= 0 and trace[j].state == "B":
            if trace[j].action in ("generate", "manipulate"):
                fruitless += 1
            j -= 1
        assert fruitless >= g
