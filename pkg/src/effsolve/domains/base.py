from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..retrieval import Case, Taxonomy
from ..scheduler import Candidate


@dataclass
class Attempt:
    """What testing one candidate produced."""

    solved: bool = False
    solution: Any = None
    discovered: list[Candidate] = field(default_factory=list)
    note: str = ""


class Domain:
    """Plug-in seam between the solver engine and a concrete problem family.

    Subclasses set ``tag`` and ``cost_model`` and override the hooks they
    need. ``cost_model`` maps a method id to a time-unit multiplier applied
    to a recalled case's cost estimate.
    """

    tag = "base"
    cost_model: Mapping[str, float] = {}

    def make_problem(self, data: Mapping, problem_id: str = "problem"):
        from ..engine import Problem

        return Problem(
            id=str(data.get("id", problem_id)),
            domain=self.tag,
            surface=dict(data.get("surface") or self.default_surface(data.get("params", {}))),
            params=dict(data.get("params", {})),
        )

    def default_surface(self, params: Mapping) -> dict[str, float]:
        return {}

    def default_casebase(self) -> tuple[list[Case], Taxonomy]:
        return [], Taxonomy()

    def cost_scale(self, method: str, problem) -> float:
        return float(self.cost_model.get(method, 1.0))

    def builtin_candidates(self, problem, casebase: list[Case], taxonomy: Taxonomy, round_index: int) -> list[Candidate]:
        """Candidates the domain always knows about (generation macro process)."""
        return []

    def subproblems(self, problem) -> list:
        """Transformed problems worth solving first (manipulation macro process)."""
        return []

    def constructed_candidate(self, problem, sub, solution) -> Candidate | None:
        return None

    def execute(self, problem, candidate: Candidate, rng: random.Random) -> Attempt:
        raise NotImplementedError

    def goal_check(self, problem, solution) -> bool:
        raise NotImplementedError

    def solution_to_json(self, solution):
        return solution
