"""
The problem-solving state machine.

The solver is always in one of four states:

* ``A1`` follow the current plan, testing candidates in ``p / t`` order;
* ``A2`` step back and compare the plan with the alternatives;
* ``B``  generate candidates (memory association, case retrieval, domain
  generators, subproblems) until something is worth testing;
* ``C``  incubate: let memory activation decay, then return to ``B``.

Every step appends one :class:`TraceRecord` (a subgoal adds push/pop
records around the child's own records). Budget is charged per record:
``ceil(t)`` for a tested candidate, nothing for ``failed`` and
``subgoal_pop``, one unit for everything else.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

from .errors import BudgetExhausted, DepthExceeded
from .memory import MemoryGraph
from .retrieval import Case, FeatureSet, RetrievalConfig, RetrievalResult, Taxonomy, recall_associated, retrieve
from .scheduler import Candidate, ratio, schedule

STATES = ("A1", "A2", "B", "C")
ACTIONS = (
    "test_candidate",
    "generate",
    "manipulate",
    "assess",
    "incubate",
    "subgoal_push",
    "subgoal_pop",
    "solved",
    "failed",
)
TRACE_FIELDS = ("step", "state", "action", "candidate_id", "p", "t", "ratio", "note")


@dataclass
class Problem:
    id: str
    domain: str
    surface: FeatureSet
    params: dict[str, Any] = field(default_factory=dict)
    depth: int = 0


@dataclass(frozen=True)
class EngineConfig:
    budget: int = 1000
    max_depth: int = 2
    switch_margin: float = 1.5
    fruitless_rounds: int = 3
    incubation_ticks: int = 2
    acceptance_floor: float = 0.001
    rng_seed: int = 0
    # cap on the budget one subgoal may draw from its parent
    subgoal_budget: int = 200
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be > 0")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.switch_margin < 1:
            raise ValueError("switch_margin must be >= 1")
        if self.fruitless_rounds < 1 or self.incubation_ticks < 1:
            raise ValueError("fruitless_rounds and incubation_ticks must be >= 1")
        if self.acceptance_floor < 0:
            raise ValueError("acceptance_floor must be >= 0")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be unsigned")
        if self.subgoal_budget < 1:
            raise ValueError("subgoal_budget must be > 0")


@dataclass
class SolverState:
    tag: str
    plan: list[Candidate] | None = None
    generation_rounds: int = 0

    def __post_init__(self):
        if self.tag not in STATES:
            raise ValueError(f"unknown state {self.tag!r}")
        if self.tag == "A1" and not self.plan:
            raise ValueError("state A1 requires a nonempty plan")


@dataclass(frozen=True)
class TraceRecord:
    step: int
    state: str
    action: str
    candidate_id: str | None = None
    p: float | None = None
    t: float | None = None
    ratio: float | None = None
    note: str = ""

    @property
    def cost(self) -> int:
        return record_cost(self)

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        return cls(**json.loads(line))


def record_cost(rec: TraceRecord) -> int:
    if rec.action in ("test_candidate", "solved"):
        return math.ceil(rec.t)
    if rec.action in ("failed", "subgoal_pop"):
        return 0
    return 1


@dataclass
class Outcome:
    solved: bool
    steps: int
    trace: list[TraceRecord]
    solution: Any = None
    method: str | None = None
    reason: str = ""
    candidates_tested: int = 0
    memory: MemoryGraph | None = None

    @property
    def status(self) -> str:
        return "solved" if self.solved else "failed"


class _Recorder:
    """Trace and budget clock shared by an engine and its subgoal engines."""

    def __init__(self):
        self.records: list[TraceRecord] = []
        self.used = 0
        self.tested = 0

    def emit(self, state: str, action: str, cand: Candidate | None = None, note: str = "") -> TraceRecord:
        rec = TraceRecord(
            step=len(self.records) + 1,
            state=state,
            action=action,
            candidate_id=cand.id if cand else None,
            p=cand.p if cand else None,
            t=cand.t if cand else None,
            ratio=ratio(cand) if cand else None,
            note=note,
        )
        self.records.append(rec)
        self.used += rec.cost
        if action in ("test_candidate", "solved"):
            self.tested += 1
        return rec


def estimate_candidate(result: RetrievalResult, case: Case, problem: Problem, domain=None) -> Candidate:
    """Turn a retrieved case into a testable candidate.

    Success probability is the match score times the case's confidence; the
    cost is the case's estimate scaled by the domain's cost model.
    """
    p = min(1.0, max(0.0, result.score * case.confidence))
    scale = domain.cost_scale(case.method, problem) if domain is not None else 1.0
    return Candidate(
        id=case.method,
        p=p,
        t=case.cost_estimate * scale,
        source="recalled_surface" if result.level == "surface" else "recalled_gist",
        payload=case.method,
        explained=result.explained,
    )


def _merge(cands: Iterable[Candidate]) -> dict[str, Candidate]:
    """Deduplicate by id, keeping the best ratio (first wins on ties)."""
    out: dict[str, Candidate] = {}
    for c in cands:
        if c.id not in out or ratio(c) > ratio(out[c.id]):
            out[c.id] = c
    return out


class Engine:
    def __init__(
        self,
        problem: Problem,
        domain,
        casebase: list[Case],
        taxonomy: Taxonomy | None,
        memory: MemoryGraph,
        config: EngineConfig,
        *,
        rng: random.Random | None = None,
        recorder: _Recorder | None = None,
        limit: int | None = None,
    ):
        if problem.depth > config.max_depth:
            raise DepthExceeded(f"problem depth {problem.depth} > max_depth {config.max_depth}")
        self.problem = problem
        self.domain = domain
        self.casebase = list(casebase)
        self.cases = {c.id: c for c in self.casebase}
        self.taxonomy = taxonomy or Taxonomy()
        self.memory = memory
        self.config = config
        self.rng = rng if rng is not None else random.Random(config.rng_seed)
        self.recorder = recorder if recorder is not None else _Recorder()
        self.limit = config.budget if limit is None else limit
        self.state: SolverState | None = None
        self.alternatives: dict[str, Candidate] = {}
        self.tried: set[str] = set()
        self.attempted_subproblems: set[str] = set()
        self.rounds_total = 0
        self.done = False
        self.solution = None
        self.solved_by: str | None = None
        self.reason = ""

    # -- candidate generation ------------------------------------------------

    def _associated(self) -> list[Candidate]:
        seeds = [f for f in self.problem.surface if f in self.memory]
        if not seeds:
            return []
        out = []
        for cid, activation in recall_associated(self.memory, seeds):
            concept = self.memory.concepts[cid]
            if concept.kind != "method" or cid in seeds:
                continue
            t = self.domain.cost_scale(cid, self.problem)
            out.append(Candidate(cid, min(1.0, activation), t, "associated", cid))
        return out

    def _retrieved(self) -> list[Candidate]:
        rc = self.config.retrieval
        hits = retrieve(self.problem.surface, self.casebase, self.taxonomy, k=rc.top_k, mode=rc.mode, config=rc)
        return [estimate_candidate(r, self.cases[r.case_id], self.problem, self.domain) for r in hits]

    def _fresh(self, cands: Iterable[Candidate]) -> dict[str, Candidate]:
        return {cid: c for cid, c in _merge(cands).items() if cid not in self.tried}

    def _viable(self, c: Candidate) -> bool:
        return ratio(c) >= self.config.acceptance_floor

    def start(self) -> SolverState:
        """Pick the initial state from what memory and the casebase offer."""
        found = self._fresh(self._associated() + self._retrieved())
        viable = [c for c in found.values() if self._viable(c)]
        if len(viable) == 1:
            self.state = SolverState("A1", list(schedule(list(found.values())).order))
        else:
            self.alternatives = found
            self.state = SolverState("A2" if viable else "B")
        return self.state

    # -- stepping -----------------------------------------------------------

    def _afford(self, cost: int) -> bool:
        if self.recorder.used + cost <= self.limit:
            return True
        self._fail(f"BudgetExhausted: needs {cost}, {self.limit - self.recorder.used} left")
        return False

    def _fail(self, reason: str) -> TraceRecord:
        self.done = True
        self.reason = reason
        return self.recorder.emit(self.state.tag, "failed", note=reason)

    def step(self) -> TraceRecord:
        if self.done:
            raise RuntimeError("run already finished")
        if self.state is None:
            self.start()
        if self.recorder.used >= self.limit:
            return self._fail("BudgetExhausted: no budget left")
        handler = {"A1": self._step_a1, "A2": self._step_a2, "B": self._step_b, "C": self._step_c}
        return handler[self.state.tag]()

    def _step_a1(self) -> TraceRecord:
        plan = self.state.plan
        head = plan[0]
        if not self._viable(head):
            if not self._afford(1):
                return self.recorder.records[-1]
            self._to("A2", plan=plan)
            return self.recorder.emit("A1", "assess", head, "progress monitor: best remaining ratio below floor")
        if not self._afford(math.ceil(head.t)):
            return self.recorder.records[-1]
        attempt = self.domain.execute(self.problem, head, self.rng)
        plan.pop(0)
        self.tried.add(head.id)
        note = attempt.note
        if not head.explained:
            note = "; ".join(filter(None, ["intuition: gist match without surface support", note]))
        if attempt.solved and self.domain.goal_check(self.problem, attempt.solution):
            self.done = True
            self.solution = attempt.solution
            self.solved_by = head.payload or head.id
            self._learn(self.solved_by)
            return self.recorder.emit("A1", "solved", head, note)
        if attempt.solved:
            note = "; ".join(filter(None, [note, "result failed the goal check"]))
        rec = self.recorder.emit("A1", "test_candidate", head, note)
        if attempt.discovered:
            self.alternatives.update(self._fresh(attempt.discovered))
            self._to("A2", plan=plan or None)
        elif not plan:
            self._to("B")
        return rec

    def _step_a2(self) -> TraceRecord:
        if not self._afford(1):
            return self.recorder.records[-1]
        plan = self.state.plan or []
        pool = self._fresh(list(plan) + list(self.alternatives.values()))
        ranked = list(schedule(list(pool.values())).order)
        if not any(self._viable(c) for c in ranked):
            self.alternatives = pool
            self._to("B")
            return self.recorder.emit("A2", "assess", note="no candidate clears the acceptance floor")
        current = ratio(plan[0]) if plan and self._viable(plan[0]) else 0.0
        best = ranked[0]
        if not plan or ratio(best) >= self.config.switch_margin * current:
            self.alternatives = {}
            self._to("A1", plan=ranked)
            return self.recorder.emit("A2", "assess", best, f"adopt plan of {len(ranked)}")
        self._to("A1", plan=plan)
        return self.recorder.emit("A2", "assess", plan[0], "keep current plan")

    def _step_b(self) -> TraceRecord:
        if not self._afford(1):
            return self.recorder.records[-1]
        self.rounds_total += 1
        found = self._associated() + self._retrieved()
        found += self.domain.builtin_candidates(self.problem, self.casebase, self.taxonomy, self.rounds_total)
        self.alternatives.update(self._fresh(list(self.alternatives.values()) + found))

        subs = [s for s in self.domain.subproblems(self.problem) if s.id not in self.attempted_subproblems]
        if subs:
            sub = subs[0]
            self.attempted_subproblems.add(sub.id)
            rec = self.recorder.emit("B", "manipulate", note=f"reformulate as subproblem {sub.id}")
            gained = self._run_subgoal(sub)
            if self.done:
                return rec
            if gained is not None:
                self.alternatives.update(self._fresh([gained]))
        else:
            rec = None
        if any(self._viable(c) for c in self.alternatives.values()):
            self._to("A2")
            if rec is None:
                rec = self.recorder.emit("B", "generate", note=f"{len(self.alternatives)} candidates known")
            return rec
        if rec is None:
            rec = self.recorder.emit("B", "generate", note="fruitless round")
        return self._fruitless(rec)

    def _fruitless(self, rec: TraceRecord) -> TraceRecord:
        self.state.generation_rounds += 1
        if self.state.generation_rounds >= self.config.fruitless_rounds:
            self._to("C", rounds=self.state.generation_rounds)
        return rec

    def _step_c(self) -> TraceRecord:
        if not self._afford(1):
            return self.recorder.records[-1]
        for _ in range(self.config.incubation_ticks):
            self.memory.decay_tick()
        self._to("B")
        return self.recorder.emit("C", "incubate", note=f"{self.config.incubation_ticks} decay ticks")

    def _to(self, tag: str, plan: list[Candidate] | None = None, rounds: int = 0) -> None:
        self.state = SolverState(tag, plan, rounds)

    def _learn(self, method: str) -> None:
        if method not in self.memory:
            self.memory.add_concept(method, kind="method")
        if self.memory.concepts[method].kind != "method":
            return
        for feature in self.problem.surface:
            self.memory.ensure_concept(feature)
            if feature != method:
                self.memory.hebb_update(feature, method)

    # -- subgoals ------------------------------------------------------------

    def _run_subgoal(self, sub: Problem) -> Candidate | None:
        if not self._afford(1):
            return None
        self.recorder.emit("B", "subgoal_push", note=sub.id)
        try:
            outcome = subgoal(self.problem, sub, self)
        except DepthExceeded as exc:
            self.recorder.emit("B", "subgoal_pop", note=f"{sub.id}: {exc}")
            return None
        self.recorder.emit("B", "subgoal_pop", note=f"{sub.id}: {outcome.status}")
        if not outcome.solved:
            return None
        return self.domain.constructed_candidate(self.problem, sub, outcome.solution)

    def outcome(self) -> Outcome:
        return Outcome(
            solved=self.solved_by is not None,
            steps=self.recorder.used,
            trace=list(self.recorder.records),
            solution=self.solution,
            method=self.solved_by,
            reason="" if self.solved_by else self.reason,
            candidates_tested=self.recorder.tested,
            memory=self.memory,
        )

    def run(self) -> Outcome:
        if self.state is None:
            self.start()
        while not self.done:
            self.step()
        return self.outcome()


def start_state(problem: Problem, casebase, memory: MemoryGraph, config: EngineConfig, domain=None, taxonomy=None) -> SolverState:
    domain = domain or _domain_for(problem)
    return Engine(problem, domain, casebase, taxonomy, memory.copy(), config).start()


def subgoal(problem: Problem, sub: Problem, engine: Engine) -> Outcome:
    """Solve ``sub`` with the same machinery, charging the parent's budget."""
    cfg = engine.config
    if sub.depth != problem.depth + 1:
        raise ValueError(f"subproblem depth {sub.depth} must be {problem.depth + 1}")
    if sub.depth > cfg.max_depth:
        raise DepthExceeded(f"subproblem depth {sub.depth} > max_depth {cfg.max_depth}")
    rec = engine.recorder
    child = Engine(
        sub,
        engine.domain,
        engine.casebase,
        engine.taxonomy,
        engine.memory,
        cfg,
        rng=engine.rng,
        recorder=rec,
        limit=min(engine.limit, rec.used + cfg.subgoal_budget),
    )
    return child.run()


def run(
    problem: Problem,
    casebase: list[Case],
    memory: MemoryGraph,
    config: EngineConfig,
    domain=None,
    taxonomy: Taxonomy | None = None,
) -> Outcome:
    """Solve ``problem`` from scratch; the caller's memory is not modified."""
    domain = domain or _domain_for(problem)
    return Engine(problem, domain, casebase, taxonomy, memory.copy(), config).run()


def _domain_for(problem: Problem):
    from .domains import get_domain

    return get_domain(problem.domain)


def write_trace(trace: Iterable[TraceRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in trace:
            fh.write(rec.to_json() + "\n")


def read_trace(path) -> list[TraceRecord]:
    with open(path, encoding="utf-8") as fh:
        return [TraceRecord.from_json(line) for line in fh if line.strip()]


__all__ = [
    "ACTIONS",
    "BudgetExhausted",
    "Engine",
    "EngineConfig",
    "Outcome",
    "Problem",
    "STATES",
    "SolverState",
    "TraceRecord",
    "estimate_candidate",
    "read_trace",
    "record_cost",
    "run",
    "start_state",
    "subgoal",
    "write_trace",
]
