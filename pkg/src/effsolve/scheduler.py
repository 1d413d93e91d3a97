"""
Optimal ordering of solution candidates.

Each candidate succeeds independently with probability ``p`` and costs
``t`` to generate and test. Testing in non-increasing ``p / t`` minimises
the expected time to the first success. ``verify_optimal`` checks this by
brute force over every permutation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from .errors import NonPositiveCost, TooManyCandidates

SOURCES = ("recalled_surface", "recalled_gist", "associated", "constructed", "domain_builtin")
MAX_BRUTE_FORCE = 8
TOLERANCE = 1e-9


@dataclass(frozen=True)
class Candidate:
    id: str
    p: float
    t: float
    source: str = "domain_builtin"
    payload: Any = None
    # False for gist-level recalls the solver cannot justify on the surface
    explained: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"candidate {self.id!r}: p must be in [0, 1], got {self.p}")
        if self.source not in SOURCES:
            raise ValueError(f"candidate {self.id!r}: unknown source {self.source!r}")

    @property
    def ratio(self) -> float:
        return ratio(self)

    def with_cost(self, t: float) -> "Candidate":
        return replace(self, t=t)


@dataclass(frozen=True)
class Schedule:
    order: tuple[Candidate, ...] = field(default_factory=tuple)
    expected_time: float = 0.0

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.order]


def ratio(c: Candidate) -> float:
    if not c.t > 0:
        raise NonPositiveCost(f"candidate {c.id!r} has cost {c.t}")
    return c.p / c.t


def expected_time(order: Sequence[Candidate]) -> float:
    """Expected time until the first success, counting full cost if all fail."""
    total = 0.0
    survive = 1.0
    for c in order:
        if not c.t > 0:
            raise NonPositiveCost(f"candidate {c.id!r} has cost {c.t}")
        total += survive * c.t
        survive *= 1.0 - c.p
    return total


def schedule(cands: Sequence[Candidate]) -> Schedule:
    order = tuple(sorted(cands, key=lambda c: (-ratio(c), c.id)))
    return Schedule(order, expected_time(order))


def permutation_times(cands: Sequence[Candidate]) -> tuple[np.ndarray, np.ndarray]:
    """Expected time of every permutation, as (perms, times) arrays."""
    n = len(cands)
    if n == 0:
        return np.zeros((1, 0), dtype=int), np.zeros(1)
    p = np.array([c.p for c in cands], dtype=float)
    t = np.array([c.t for c in cands], dtype=float)
    perms = np.array(list(itertools.permutations(range(n))), dtype=int)
    fail = 1.0 - p[perms]
    survive = np.ones_like(fail)
    survive[:, 1:] = np.cumprod(fail[:, :-1], axis=1)
    return perms, (survive * t[perms]).sum(axis=1)


def verify_optimal(cands: Sequence[Candidate]) -> bool:
    if len(cands) > MAX_BRUTE_FORCE:
        raise TooManyCandidates(f"{len(cands)} candidates; brute force limited to {MAX_BRUTE_FORCE}")
    for c in cands:
        ratio(c)
    best = schedule(cands).expected_time
    _, times = permutation_times(cands)
    return bool(best <= times.min() + TOLERANCE)


def exchange_gain(prefix_survival: float, first: Candidate, second: Candidate) -> float:
    """Change in expected time from testing ``second`` before ``first``.

    Positive means the given order (``first`` then ``second``) is faster.
    """
    return prefix_survival * (first.p * second.t - second.p * first.t)


def is_ratio_sorted(order: Sequence[Candidate]) -> bool:
    rs = [ratio(c) for c in order]
    return all(a >= b or math.isclose(a, b, rel_tol=0, abs_tol=1e-15) for a, b in zip(rs, rs[1:]))
