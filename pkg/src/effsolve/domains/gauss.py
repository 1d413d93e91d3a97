"""
Summing 1..n: the trade-off between a slow obvious method and searching for
a fast one.

Adding the numbers one by one costs ``n * c_add``. The pairing identity
``1 + n = 2 + (n - 1) = ...`` costs ``c_formula`` once known, but finding it
is a gamble: each search attempt succeeds with ``p_search`` and costs
``t_search``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from ..retrieval import Case, Taxonomy, retrieve
from ..scheduler import Candidate
from .base import Attempt, Domain

ITERATE = "iterate_add"
PAIRING = "pairing_formula"
SEARCH = "search_for_better"

GAUSS_SURFACE = {"sum": 1.0, "consecutive_integers": 1.0, "arithmetic": 0.8, "long_list": 0.3}


@dataclass(frozen=True)
class GaussConfig:
    c_add: float = 1.0
    c_formula: float = 5.0
    p_search: float = 0.3
    t_search: float = 200.0
    # size of the specialised instance proposed as a subgoal
    small_n: int = 10


def iterate_sum(n: int) -> int:
    total = 0
    for i in range(1, n + 1):
        total += i
    return total


def pairing_sum(n: int) -> int:
    """Sum 1..n by pairing the ends: each pair adds to n + 1."""
    pairs, middle = divmod(n, 2)
    total = pairs * (n + 1)
    if middle:
        total += (n + 1) // 2
    return total


def novice_casebase() -> tuple[list[Case], Taxonomy]:
    cases = [
        Case(
            "school_addition",
            surface={"sum": 1.0, "consecutive_integers": 1.0, "arithmetic": 0.8},
            gist={"arithmetic_series": 1.0},
            method=ITERATE,
            confidence=1.0,
            cost_estimate=1.0,
        )
    ]
    return cases, Taxonomy()


def expert_casebase() -> tuple[list[Case], Taxonomy]:
    cases, tax = novice_casebase()
    cases.append(
        Case(
            "young_gauss",
            surface={"sum": 1.0, "consecutive_integers": 1.0, "symmetry": 0.6},
            gist={"arithmetic_series": 1.0},
            method=PAIRING,
            confidence=1.0,
            cost_estimate=1.0,
        )
    )
    return cases, tax


def formula_retrievable(casebase, taxonomy: Taxonomy | None = None, surface=None) -> bool:
    surface = surface or GAUSS_SURFACE
    by_id = {c.id: c for c in casebase}
    hits = retrieve(surface, casebase, taxonomy, k=max(1, len(by_id)), mode="surface_only")
    return any(r.score > 0 and by_id[r.case_id].method == PAIRING for r in hits)


def gauss_candidates(n: int, casebase, config: GaussConfig | None = None, taxonomy: Taxonomy | None = None) -> list[Candidate]:
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = config or GaussConfig()
    out = [Candidate(ITERATE, 1.0, n * cfg.c_add, "domain_builtin", ITERATE)]
    if formula_retrievable(casebase, taxonomy):
        out.append(Candidate(PAIRING, 1.0, cfg.c_formula, "recalled_surface", PAIRING))
    out.append(Candidate(SEARCH, cfg.p_search, cfg.t_search, "domain_builtin", SEARCH))
    return out


class GaussDomain(Domain):
    tag = "gauss"

    def __init__(self, config: GaussConfig | None = None):
        self.config = config or GaussConfig()

    def default_surface(self, params):
        return dict(GAUSS_SURFACE)

    def default_casebase(self):
        return novice_casebase()

    def make_problem(self, data: Mapping, problem_id: str = "problem"):
        problem = super().make_problem(data, problem_id)
        n = problem.params.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError(f"gauss problem needs integer param n >= 1, got {n!r}")
        return problem

    def cost_scale(self, method, problem):
        n = problem.params["n"]
        return {
            ITERATE: n * self.config.c_add,
            PAIRING: self.config.c_formula,
            SEARCH: self.config.t_search,
        }.get(method, 1.0)

    def builtin_candidates(self, problem, casebase, taxonomy, round_index):
        out = []
        for c in gauss_candidates(problem.params["n"], casebase, self.config, taxonomy):
            if c.id == SEARCH:
                # every search attempt is a fresh, independent trial
                c = Candidate(f"{SEARCH}#{round_index}", c.p, c.t, c.source, SEARCH)
            out.append(c)
        return out

    def subproblems(self, problem):
        n = problem.params["n"]
        small = self.config.small_n
        if not problem.params.get("allow_subgoal") or n <= small:
            return []
        from ..engine import Problem

        return [
            Problem(
                id=f"{problem.id}/n={small}",
                domain=self.tag,
                surface=dict(problem.surface),
                params={"n": small},
                depth=problem.depth + 1,
            )
        ]

    def constructed_candidate(self, problem, sub, solution):
        # seeing 1..small add up to small*(small+1)/2 exposes the pairing pattern
        small = sub.params["n"]
        if solution != pairing_sum(small):
            return None
        return Candidate(PAIRING, 1.0, self.config.c_formula, "constructed", PAIRING)

    def execute(self, problem, candidate, rng: random.Random):
        n = problem.params["n"]
        method = candidate.payload or candidate.id
        if method == ITERATE:
            return Attempt(True, iterate_sum(n))
        if method == PAIRING:
            return Attempt(True, pairing_sum(n))
        if method == SEARCH:
            if rng.random() < candidate.p:
                found = Candidate(PAIRING, 1.0, self.config.c_formula, "constructed", PAIRING)
                return Attempt(discovered=[found], note="pairing relation found")
            return Attempt(note="search came up empty")
        return Attempt(note=f"method {method!r} does not apply")

    def goal_check(self, problem, solution):
        n = problem.params["n"]
        return solution == n * (n + 1) // 2
