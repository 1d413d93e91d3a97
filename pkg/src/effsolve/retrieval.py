"""
Case retrieval over weighted feature sets.

Feature sets are plain ``dict[str, float]`` mappings from feature name to
salience weight. Similarity is the weighted Jaccard index. Abstraction
drops low-salience features and lifts the rest up an is-a taxonomy to form
a problem's gist; a gist-level match with weak surface support is flagged
as unexplained (intuition).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .memory import MemoryGraph

FeatureSet = dict[str, float]

LEVELS = ("surface", "generalized", "gist")
MODES = ("surface_only", "with_abstraction")


def check_features(fs: Mapping[str, float]) -> FeatureSet:
    out = {}
    for name, weight in fs.items():
        weight = float(weight)
        if not weight > 0:
            raise ValueError(f"feature {name!r} has non-positive weight {weight}")
        out[str(name)] = weight
    return out


@dataclass(frozen=True)
class Case:
    id: str
    surface: FeatureSet
    gist: FeatureSet
    method: str
    confidence: float = 1.0
    cost_estimate: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "surface", check_features(self.surface))
        object.__setattr__(self, "gist", check_features(self.gist))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"case {self.id!r}: confidence must be in [0, 1]")
        if not self.cost_estimate > 0:
            raise ValueError(f"case {self.id!r}: cost_estimate must be > 0")


@dataclass(frozen=True)
class Taxonomy:
    """A forest of is-a links, child -> parent."""

    parent: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for start in self.parent:
            seen = {start}
            node = start
            while node in self.parent:
                node = self.parent[node]
                if node in seen:
                    raise ValueError(f"is_a cycle through {start!r}")
                seen.add(node)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[str]]) -> "Taxonomy":
        parent: dict[str, str] = {}
        for child, par in pairs:
            if child in parent and parent[child] != par:
                raise ValueError(f"{child!r} has more than one parent")
            parent[child] = par
        return cls(parent)

    def pairs(self) -> list[list[str]]:
        return [[c, p] for c, p in sorted(self.parent.items())]

    def ancestor(self, name: str, levels: int) -> str:
        for _ in range(levels):
            if name not in self.parent:
                break
            name = self.parent[name]
        return name


@dataclass(frozen=True)
class RetrievalResult:
    case_id: str
    score: float
    level: str = "surface"
    explained: bool = True


@dataclass(frozen=True)
class RetrievalConfig:
    mode: str = "with_abstraction"
    top_k: int = 5
    salience_floor: float = 0.5
    gist_levels: int = 1
    intuition_threshold: float = 0.2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown retrieval mode {self.mode!r}")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.salience_floor < 0 or self.gist_levels < 0:
            raise ValueError("salience_floor and gist_levels must be >= 0")


def similarity(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Weighted Jaccard index; two empty sets score 0."""
    # sorted so float summation order does not depend on string hashing
    names = sorted(set(a) | set(b))
    lo = sum(min(a.get(n, 0.0), b.get(n, 0.0)) for n in names)
    hi = sum(max(a.get(n, 0.0), b.get(n, 0.0)) for n in names)
    return lo / hi if hi > 0 else 0.0


def generalize(fs: Mapping[str, float], tax: Taxonomy, levels: int) -> FeatureSet:
    out: FeatureSet = {}
    for name, weight in fs.items():
        up = tax.ancestor(name, levels)
        out[up] = out.get(up, 0.0) + weight
    return out


def specify(fs: Mapping[str, float], constraints: Mapping[str, float]) -> FeatureSet:
    return {**fs, **constraints}


def abstract_gist(fs: Mapping[str, float], tax: Taxonomy, salience_floor: float, levels: int) -> FeatureSet:
    if salience_floor < 0:
        raise ValueError("salience_floor must be >= 0")
    kept = {n: w for n, w in fs.items() if w >= salience_floor}
    return generalize(kept, tax, levels)


def retrieve(
    problem: Mapping[str, float],
    casebase: Iterable[Case],
    tax: Taxonomy | None = None,
    k: int = 5,
    mode: str = "with_abstraction",
    config: RetrievalConfig | None = None,
) -> list[RetrievalResult]:
    """Rank cases against a problem's features, best first.

    In ``with_abstraction`` mode each case is scored at three levels
    (surface, both sides generalized, problem gist vs case gist) and keeps
    its best; ties prefer the shallower level.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in MODES:
        raise ValueError(f"unknown retrieval mode {mode!r}")
    cfg = config or RetrievalConfig()
    tax = tax or Taxonomy()
    if mode == "with_abstraction":
        lifted = generalize(problem, tax, cfg.gist_levels)
        gist = abstract_gist(problem, tax, cfg.salience_floor, cfg.gist_levels)

    results = []
    for case in casebase:
        surface = similarity(problem, case.surface)
        level, score = "surface", surface
        if mode == "with_abstraction":
            for lvl, s in (
                ("generalized", similarity(lifted, generalize(case.surface, tax, cfg.gist_levels))),
                ("gist", similarity(gist, case.gist)),
            ):
                if s > score:
                    level, score = lvl, s
        explained = not (level == "gist" and surface < cfg.intuition_threshold)
        results.append(RetrievalResult(case.id, score, level, explained))
    results.sort(key=lambda r: (-r.score, r.case_id))
    return results[:k]


def recall_associated(graph: MemoryGraph, features: Iterable[str]) -> list[tuple[str, float]]:
    """Focus on the problem's features, spread activation from them and recall."""
    seeds = set(features)
    graph.set_focus(seeds)
    graph.activate(seeds)
    return graph.recall()


# -- casebase files ----------------------------------------------------------


def case_to_dict(case: Case) -> dict:
    return {
        "id": case.id,
        "surface": dict(case.surface),
        "gist": dict(case.gist),
        "method": case.method,
        "confidence": case.confidence,
        "cost_estimate": case.cost_estimate,
    }


def casebase_to_dict(cases: Iterable[Case], tax: Taxonomy | None = None) -> dict:
    return {
        "cases": [case_to_dict(c) for c in cases],
        "taxonomy": {"is_a": (tax or Taxonomy()).pairs()},
    }


def casebase_from_dict(data: Mapping) -> tuple[list[Case], Taxonomy]:
    cases = [
        Case(
            id=c["id"],
            surface=c.get("surface", {}),
            gist=c.get("gist", {}),
            method=c["method"],
            confidence=float(c.get("confidence", 1.0)),
            cost_estimate=float(c.get("cost_estimate", 1.0)),
        )
        for c in data.get("cases", [])
    ]
    ids = [c.id for c in cases]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate case ids in casebase")
    tax = Taxonomy.from_pairs(data.get("taxonomy", {}).get("is_a", []))
    return cases, tax


def load_casebase(path: str | Path) -> tuple[list[Case], Taxonomy]:
    return casebase_from_dict(json.loads(Path(path).read_text()))
