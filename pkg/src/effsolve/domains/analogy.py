"""
Word problems that share a "distance = speed x time" core under different
stories.

Every target is a closing-speed chase: two parties start ``gap`` apart and
approach at ``speed_a`` and ``speed_b`` while a runner shuttles between them
at ``speed_runner``. The runner covers ``speed_runner * gap / (speed_a +
speed_b)``. The stored cases tell other stories with no surface features in
common with the targets, so only a gist-level match can find them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from ..retrieval import Case, Taxonomy
from ..scheduler import Candidate
from .base import Attempt, Domain

CLOSING = "closing_speed_distance"
ZIGZAG = "sum_zigzag_legs"
QUANTITIES = ("gap", "speed_a", "speed_b", "speed_runner")


@dataclass(frozen=True)
class WordProblem:
    id: str
    surface: dict[str, float]
    quantities: dict[str, float] = field(default_factory=dict)
    answer: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.answer):
            raise ValueError(f"{self.id}: answer must be finite")
        q = self.quantities
        if q and q["speed_runner"] <= max(q["speed_a"], q["speed_b"]):
            # a slower runner gets overtaken and the shuttle picture breaks down
            raise ValueError(f"{self.id}: runner must be faster than both parties")

    def as_problem_dict(self) -> dict:
        return {
            "id": self.id,
            "domain": "analogy",
            "params": {**self.quantities, "answer": self.answer},
            "surface": dict(self.surface),
        }


def closing_distance(q: Mapping[str, float]) -> float:
    time = q["gap"] / (q["speed_a"] + q["speed_b"])
    return q["speed_runner"] * time


def zigzag_distance(q: Mapping[str, float], tol: float = 1e-12, max_legs: int = 10_000) -> float:
    """Follow the runner leg by leg until the gap closes (the hard way)."""
    gap, va, vb, vr = q["gap"], q["speed_a"], q["speed_b"], q["speed_runner"]
    total = 0.0
    toward_b = True
    for _ in range(max_legs):
        if gap <= tol:
            break
        closing = vr + (vb if toward_b else va)
        leg_time = gap / closing
        total += vr * leg_time
        gap -= (va + vb) * leg_time
        toward_b = not toward_b
    return total


def analogy_taxonomy() -> Taxonomy:
    return Taxonomy.from_pairs(
        [
            ("speed", "rate"),
            ("velocity", "rate"),
            ("duration", "time"),
            ("hours", "time"),
            ("separation", "distance"),
            ("length", "distance"),
        ]
    )


def analogy_casebase() -> list[Case]:
    rate_time_distance = {"rate": 1.0, "time": 1.0, "distance": 1.0}
    return [
        Case(
            "relay_courier",
            surface={"courier": 1.0, "relay_station": 0.8, "horseback": 0.6},
            gist=rate_time_distance,
            method=CLOSING,
            confidence=0.9,
            cost_estimate=3.0,
        ),
        Case(
            "river_ferry",
            surface={"ferry": 1.0, "river_bank": 0.7, "passengers": 0.4},
            gist=rate_time_distance,
            method=CLOSING,
            confidence=0.8,
            cost_estimate=3.0,
        ),
        Case(
            "garden_fence",
            surface={"garden": 1.0, "fence_posts": 0.8, "lawn": 0.5},
            gist={"area": 1.0, "perimeter": 1.0},
            method="rectangle_area",
            confidence=0.9,
            cost_estimate=2.0,
        ),
    ]


def analogy_targets() -> list[WordProblem]:
    return [
        WordProblem(
            "fly_cyclists",
            surface={"trajectory_shape": 0.2, "rate": 1.0, "time": 1.0, "distance": 1.0},
            quantities={"gap": 50.0, "speed_a": 18.0, "speed_b": 22.0, "speed_runner": 100.0},
            # collide after 50 / 40 = 1.25 h, fly covers 100 * 1.25
            answer=125.0,
        ),
        WordProblem(
            "bird_trains",
            surface={"zigzag": 0.3, "bird": 0.2, "speed": 1.0, "duration": 1.0, "separation": 1.0},
            quantities={"gap": 120.0, "speed_a": 40.0, "speed_b": 80.0, "speed_runner": 100.0},
            # 120 / 120 = 1 h
            answer=100.0,
        ),
        WordProblem(
            "gull_boats",
            surface={"gull": 0.4, "waves": 0.1, "velocity": 1.0, "hours": 1.0, "length": 1.0},
            quantities={"gap": 30.0, "speed_a": 10.0, "speed_b": 5.0, "speed_runner": 45.0},
            # 30 / 15 = 2 h
            answer=90.0,
        ),
    ]


def analogy_fixture() -> tuple[list[Case], Taxonomy, list[WordProblem]]:
    return analogy_casebase(), analogy_taxonomy(), analogy_targets()


class AnalogyDomain(Domain):
    tag = "analogy"
    cost_model = {CLOSING: 1.0, ZIGZAG: 1.0, "rectangle_area": 1.0}

    def default_casebase(self):
        return analogy_casebase(), analogy_taxonomy()

    def make_problem(self, data, problem_id="problem"):
        problem = super().make_problem(data, problem_id)
        missing = [q for q in QUANTITIES if q not in problem.params]
        if missing:
            raise ValueError(f"analogy problem missing quantities {missing}")
        if not problem.surface:
            raise ValueError("analogy problem needs surface features")
        return problem

    def builtin_candidates(self, problem, casebase, taxonomy, round_index):
        # following the fly leg by leg: hopeless odds for the time it takes
        return [Candidate(ZIGZAG, 0.05, 1000.0, "domain_builtin", ZIGZAG)]

    def execute(self, problem, candidate, rng):
        method = candidate.payload or candidate.id
        if method == CLOSING:
            return Attempt(True, closing_distance(problem.params))
        if method == ZIGZAG:
            return Attempt(True, zigzag_distance(problem.params))
        return Attempt(note=f"method {method!r} does not fit this problem")

    def goal_check(self, problem, solution):
        if "answer" not in problem.params:
            return solution is not None
        answer = float(problem.params["answer"])
        return solution is not None and math.isclose(solution, answer, rel_tol=1e-9, abs_tol=1e-9)
