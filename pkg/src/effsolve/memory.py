"""
Semantic memory: a weighted concept graph with Hebbian strengthening,
spreading activation, context focus and decay.

Activation is bounded in [0, 1]. Contributions arriving at a node are
combined by ``max`` rather than summed, so no renormalisation is needed.
"""

from __future__ import annotations

import copy
import json
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DuplicateId, SelfLoop, UnknownConcept

CONCEPT_KINDS = ("feature", "method", "case", "goal")
ASSOCIATION_KINDS = ("assoc", "is_a")


@dataclass(frozen=True)
class ActivationParams:
    damping: float = 0.5
    threshold: float = 0.01
    recall_threshold: float = 0.1
    hebb_rate: float = 0.1
    decay: float = 0.5
    focus_boost: float = 2.0

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must be in (0, 1], got {self.damping}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold}")
        if not 0 < self.recall_threshold < 1:
            raise ValueError(f"recall_threshold must be in (0, 1), got {self.recall_threshold}")
        if self.recall_threshold < self.threshold:
            raise ValueError("recall_threshold must be >= threshold")
        if not 0 < self.hebb_rate < 1:
            raise ValueError(f"hebb_rate must be in (0, 1), got {self.hebb_rate}")
        if not 0 < self.decay < 1:
            raise ValueError(f"decay must be in (0, 1), got {self.decay}")
        if not self.focus_boost >= 1:
            raise ValueError(f"focus_boost must be >= 1, got {self.focus_boost}")


@dataclass
class Concept:
    id: str
    label: str = ""
    kind: str = "feature"
    activation: float = 0.0

    def __post_init__(self):
        if self.kind not in CONCEPT_KINDS:
            raise ValueError(f"unknown concept kind {self.kind!r}")
        if not self.label:
            self.label = self.id


@dataclass
class Association:
    source: str
    target: str
    weight: float
    kind: str = "assoc"

    def __post_init__(self):
        if self.kind not in ASSOCIATION_KINDS:
            raise ValueError(f"unknown association kind {self.kind!r}")
        if self.source == self.target:
            raise SelfLoop(self.source)
        if not 0 < self.weight < 1:
            raise ValueError(f"association weight must be in (0, 1), got {self.weight}")


@dataclass
class MemoryGraph:
    """Concept graph plus the focus set used to bias spreading activation.

    Mutating methods modify the graph in place and return it, so calls can
    be chained.
    """

    params: ActivationParams = field(default_factory=ActivationParams)
    concepts: dict[str, Concept] = field(default_factory=dict)
    # keyed by (source, target, kind)
    associations: dict[tuple[str, str, str], Association] = field(default_factory=dict)
    focus: set[str] = field(default_factory=set)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def __len__(self) -> int:
        return len(self.concepts)

    def copy(self) -> "MemoryGraph":
        return copy.deepcopy(self)

    def _require(self, ids: Iterable[str]) -> None:
        for cid in ids:
            if cid not in self.concepts:
                raise UnknownConcept(cid)

    def add_concept(self, concept: Concept | str, kind: str = "feature") -> "MemoryGraph":
        if isinstance(concept, str):
            concept = Concept(concept, kind=kind)
        if concept.id in self.concepts:
            raise DuplicateId(concept.id)
        self.concepts[concept.id] = Concept(concept.id, concept.label, concept.kind, 0.0)
        return self

    def ensure_concept(self, concept_id: str, kind: str = "feature") -> "MemoryGraph":
        if concept_id not in self.concepts:
            self.add_concept(concept_id, kind=kind)
        return self

    def add_association(self, source: str, target: str, weight: float, kind: str = "assoc") -> "MemoryGraph":
        self._require((source, target))
        edge = Association(source, target, weight, kind)
        self.associations[(source, target, kind)] = edge
        return self

    def weight(self, source: str, target: str, kind: str = "assoc") -> float:
        edge = self.associations.get((source, target, kind))
        return edge.weight if edge is not None else 0.0

    def hebb_update(self, a: str, b: str) -> "MemoryGraph":
        """Strengthen the symmetric association between two co-active concepts.

        ``w <- w + rate * (1 - w)``; an absent edge starts at ``w = 0``.
        """
        if a == b:
            raise SelfLoop(a)
        self._require((a, b))
        rate = self.params.hebb_rate
        for src, dst in ((a, b), (b, a)):
            w = self.weight(src, dst)
            self.associations[(src, dst, "assoc")] = Association(src, dst, w + rate * (1.0 - w))
        return self

    def _neighbours(self) -> dict[str, list[tuple[str, float]]]:
        out: dict[str, list[tuple[str, float]]] = {}
        for (src, dst, _kind), edge in sorted(self.associations.items()):
            out.setdefault(src, []).append((dst, edge.weight))
        return out

    def activate(self, seeds: Iterable[str]) -> "MemoryGraph":
        """Set seeds to 1 and spread activation outward.

        A node reached from ``u`` over an edge of weight ``w`` receives
        ``a_u * w * damping`` (times ``focus_boost`` if the node is in focus,
        clamped to 1). Contributions below ``threshold`` are dropped. Each
        node keeps the maximum of what it received and what it already held.
        """
        seeds = sorted(set(seeds))
        self._require(seeds)
        p = self.params
        adj = self._neighbours()
        wave: dict[str, float] = {s: 1.0 for s in seeds}
        queue = deque(seeds)
        # label-correcting: a node is re-expanded whenever its level rises,
        # which is needed because the focus boost can make a hop amplifying
        while queue:
            u = queue.popleft()
            a_u = wave[u]
            for v, w in adj.get(u, ()):
                c = a_u * w * p.damping
                if v in self.focus:
                    c *= p.focus_boost
                c = min(c, 1.0)
                if c < p.threshold:
                    continue
                if c > wave.get(v, 0.0):
                    wave[v] = c
                    queue.append(v)
        for cid, a in wave.items():
            node = self.concepts[cid]
            node.activation = max(node.activation, a)
        return self

    def recall(self) -> list[tuple[str, float]]:
        """Concepts at or above the recall threshold, strongest first."""
        rho = self.params.recall_threshold
        hits = [(c.id, c.activation) for c in self.concepts.values() if c.activation >= rho]
        return sorted(hits, key=lambda item: (-item[1], item[0]))

    def decay_tick(self) -> "MemoryGraph":
        for node in self.concepts.values():
            node.activation *= self.params.decay
        self.focus = set()
        return self

    def set_focus(self, ids: Iterable[str]) -> "MemoryGraph":
        ids = set(ids)
        self._require(ids)
        self.focus = ids
        return self

    def reset_activation(self) -> "MemoryGraph":
        for node in self.concepts.values():
            node.activation = 0.0
        return self

    def activations(self) -> dict[str, float]:
        return {cid: c.activation for cid, c in self.concepts.items()}

    # -- snapshots ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "concepts": [asdict(c) for c in self.concepts.values()],
            "associations": [
                {"from": e.source, "to": e.target, "weight": e.weight, "kind": e.kind}
                for e in self.associations.values()
            ],
            "params": asdict(self.params),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MemoryGraph":
        graph = cls(params=ActivationParams(**data.get("params", {})))
        for c in data.get("concepts", []):
            graph.add_concept(Concept(c["id"], c.get("label", ""), c.get("kind", "feature")))
            activation = float(c.get("activation", 0.0))
            if not 0.0 <= activation <= 1.0:
                raise ValueError(f"activation of {c['id']!r} outside [0, 1]")
            graph.concepts[c["id"]].activation = activation
        for e in data.get("associations", []):
            graph.add_association(e["from"], e["to"], float(e["weight"]), e.get("kind", "assoc"))
        return graph

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "MemoryGraph":
        return cls.from_dict(json.loads(Path(path).read_text()))


def memory_from_casebase(cases, params: ActivationParams | None = None, reinforcement: int = 10) -> MemoryGraph:
    """Build an experience graph linking each case's surface features to its method.

    Every (feature, method) pair is strengthened ``reinforcement`` times, as if
    the solver had met that pairing that many times.
    """
    graph = MemoryGraph(params=params or ActivationParams())
    for case in cases:
        graph.ensure_concept(case.method, kind="method")
        for feature in sorted(case.surface):
            graph.ensure_concept(feature, kind="feature")
            for _ in range(reinforcement):
                graph.hebb_update(feature, case.method)
    return graph
