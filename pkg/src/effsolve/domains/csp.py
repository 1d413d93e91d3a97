"""
House puzzles in the style of the Zebra puzzle.

A puzzle has ``n`` houses in a row and several attributes, each with ``n``
distinct values spread one per house. A candidate solution assigns, for
every attribute, a permutation of its values to the houses. Two solvers
are provided: blind enumeration of every candidate in lexicographic order,
and elimination, which prunes impossible placements by propagation and
only goal-checks complete assignments that survive.

Positions are 0-based.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import TooLarge
from ..retrieval import Case, Taxonomy
from ..scheduler import Candidate
from .base import Attempt, Domain

BLIND = "csp_blind"
ELIMINATE = "csp_eliminate"
CONSTRAINT_KINDS = ("same_house", "adjacent", "left_of", "fixed")
BLIND_LIMIT = 10**6

Assignment = dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class Constraint:
    """One clue. Binary kinds take ``[attr1, value1, attr2, value2]``;
    ``fixed`` takes ``[attr, value, position]``.

    ``left_of`` means immediately to the left.
    """

    kind: str
    args: tuple

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        arity = 3 if self.kind == "fixed" else 4
        if len(self.args) != arity:
            raise ValueError(f"{self.kind} takes {arity} args, got {list(self.args)}")
        object.__setattr__(self, "args", tuple(self.args))

    def holds(self, pos1: int, pos2: int | None = None) -> bool:
        if self.kind == "fixed":
            return pos1 == self.args[2]
        if self.kind == "same_house":
            return pos1 == pos2
        if self.kind == "adjacent":
            return abs(pos1 - pos2) == 1
        return pos1 + 1 == pos2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "args": list(self.args)}


@dataclass(frozen=True)
class CspInstance:
    attributes: dict[str, tuple[str, ...]]
    constraints: tuple[Constraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        attrs = {str(a): tuple(str(v) for v in vals) for a, vals in self.attributes.items()}
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        sizes = {len(v) for v in attrs.values()}
        if len(sizes) > 1:
            raise ValueError("every attribute needs the same number of values")
        for name, vals in attrs.items():
            if len(set(vals)) != len(vals):
                raise ValueError(f"attribute {name!r} has repeated values")
        for c in self.constraints:
            pairs = [c.args[:2]] if c.kind == "fixed" else [c.args[:2], c.args[2:]]
            for attr, val in pairs:
                if attr not in attrs or val not in attrs[attr]:
                    raise ValueError(f"constraint {c.to_dict()} names unknown {attr}={val}")
            if c.kind == "fixed" and not 0 <= c.args[2] < self.houses:
                raise ValueError(f"fixed position {c.args[2]} outside 0..{self.houses - 1}")

    @property
    def houses(self) -> int:
        return len(next(iter(self.attributes.values()), ()))

    @property
    def search_space(self) -> int:
        return math.factorial(self.houses) ** len(self.attributes)

    @classmethod
    def from_dict(cls, data: Mapping) -> "CspInstance":
        inst = cls(
            attributes=data["attributes"],
            constraints=tuple(Constraint(c["kind"], tuple(c["args"])) for c in data.get("constraints", [])),
        )
        if "houses" in data and int(data["houses"]) != inst.houses:
            raise ValueError(f"houses={data['houses']} but attributes have {inst.houses} values")
        return inst

    def to_dict(self) -> dict:
        return {
            "houses": self.houses,
            "attributes": {a: list(v) for a, v in self.attributes.items()},
            "constraints": [c.to_dict() for c in self.constraints],
        }


@dataclass
class CspResult:
    solution: Assignment | None
    tested: int

    @property
    def satisfiable(self) -> bool:
        return self.solution is not None


def is_satisfied(instance: CspInstance, assignment: Assignment) -> bool:
    """Goal check of one complete assignment against every clue."""
    where = {
        (attr, val): perm.index(val) for attr, perm in assignment.items() for val in perm
    }
    for c in instance.constraints:
        if c.kind == "fixed":
            if not c.holds(where[(c.args[0], c.args[1])]):
                return False
        elif not c.holds(where[(c.args[0], c.args[1])], where[(c.args[2], c.args[3])]):
            return False
    return True


def csp_enumerate_blind(instance: CspInstance, limit: int = BLIND_LIMIT) -> CspResult:
    if instance.search_space > limit:
        raise TooLarge(f"{instance.search_space} candidates exceeds the blind-search limit {limit}")
    names = list(instance.attributes)
    tested = 0
    for perms in itertools.product(*(itertools.permutations(instance.attributes[a]) for a in names)):
        tested += 1
        assignment = dict(zip(names, perms))
        if is_satisfied(instance, assignment):
            return CspResult(assignment, tested)
    return CspResult(None, tested)


# -- elimination -------------------------------------------------------------

Var = tuple[str, str]


class _Propagator:
    def __init__(self, instance: CspInstance):
        self.instance = instance
        self.n = instance.houses
        self.binary: list[tuple[Var, Var, Constraint]] = []
        self.unary: list[tuple[Var, int]] = []
        for c in instance.constraints:
            if c.kind == "fixed":
                self.unary.append(((c.args[0], c.args[1]), c.args[2]))
            else:
                self.binary.append(((c.args[0], c.args[1]), (c.args[2], c.args[3]), c))

    def initial(self) -> dict[Var, set[int]] | None:
        domains = {
            (a, v): set(range(self.n)) for a, vals in self.instance.attributes.items() for v in vals
        }
        for var, pos in self.unary:
            domains[var] &= {pos}
        return self.propagate(domains)

    def propagate(self, domains: dict[Var, set[int]]) -> dict[Var, set[int]] | None:
        """Prune to a fixpoint; ``None`` if some placement becomes impossible."""
        changed = True
        while changed:
            changed = False
            for x, y, c in self.binary:
                dx, dy = domains[x], domains[y]
                keep_x = {px for px in dx if any(c.holds(px, py) for py in dy)}
                keep_y = {py for py in dy if any(c.holds(px, py) for px in keep_x)}
                if keep_x != dx or keep_y != dy:
                    domains[x], domains[y] = keep_x, keep_y
                    changed = True
            for attr, vals in self.instance.attributes.items():
                for v in vals:
                    d = domains[(attr, v)]
                    if len(d) == 1:
                        (pos,) = d
                        for other in vals:
                            if other != v and pos in domains[(attr, other)]:
                                domains[(attr, other)] = domains[(attr, other)] - {pos}
                                changed = True
                for pos in range(self.n):
                    holders = [v for v in vals if pos in domains[(attr, v)]]
                    if len(holders) == 1 and len(domains[(attr, holders[0])]) > 1:
                        domains[(attr, holders[0])] = {pos}
                        changed = True
            if any(not d for d in domains.values()):
                return None
        return domains


def _eliminate_search(instance: CspInstance, stop_after: int | None):
    """Depth-first search in the same order blind enumeration uses.

    Slots are (attribute, house) pairs in attribute-major order and values
    are tried in their listed order, so pruning never reorders solutions:
    the first one found is the lexicographically first.
    """
    prop = _Propagator(instance)
    names = list(instance.attributes)
    slots = [(a, h) for a in names for h in range(instance.houses)]
    solutions: list[Assignment] = []
    tested = 0

    def to_assignment(domains) -> Assignment:
        out = {}
        for a in names:
            row = [None] * instance.houses
            for v in instance.attributes[a]:
                (pos,) = domains[(a, v)]
                row[pos] = v
            out[a] = tuple(row)
        return out

    def dfs(domains, i) -> bool:
        nonlocal tested
        if i == len(slots):
            tested += 1
            assignment = to_assignment(domains)
            if is_satisfied(instance, assignment):
                solutions.append(assignment)
                return stop_after is not None and len(solutions) >= stop_after
            return False
        attr, house = slots[i]
        for v in instance.attributes[attr]:
            if house not in domains[(attr, v)]:
                continue
            trial = {k: set(d) for k, d in domains.items()}
            trial[(attr, v)] = {house}
            trial = prop.propagate(trial)
            if trial is not None and dfs(trial, i + 1):
                return True
        return False

    start = prop.initial()
    if start is not None:
        dfs(start, 0)
    return solutions, tested


def csp_eliminate(instance: CspInstance) -> CspResult:
    solutions, tested = _eliminate_search(instance, stop_after=1)
    return CspResult(solutions[0] if solutions else None, tested)


def count_solutions(instance: CspInstance, cap: int | None = None) -> int:
    solutions, _ = _eliminate_search(instance, stop_after=cap)
    return len(solutions)


# -- fixtures ----------------------------------------------------------------


def zebra_puzzle() -> CspInstance:
    attrs = {
        "color": ("red", "green", "ivory", "yellow", "blue"),
        "nationality": ("english", "spaniard", "ukrainian", "norwegian", "japanese"),
        "drink": ("coffee", "tea", "milk", "orange_juice", "water"),
        "smoke": ("old_gold", "kools", "chesterfield", "lucky_strike", "parliament"),
        "pet": ("dog", "snails", "fox", "horse", "zebra"),
    }
    clues = [
        ("same_house", ("nationality", "english", "color", "red")),
        ("same_house", ("nationality", "spaniard", "pet", "dog")),
        ("same_house", ("drink", "coffee", "color", "green")),
        ("same_house", ("nationality", "ukrainian", "drink", "tea")),
        ("left_of", ("color", "ivory", "color", "green")),
        ("same_house", ("smoke", "old_gold", "pet", "snails")),
        ("same_house", ("smoke", "kools", "color", "yellow")),
        ("fixed", ("drink", "milk", 2)),
        ("fixed", ("nationality", "norwegian", 0)),
        ("adjacent", ("smoke", "chesterfield", "pet", "fox")),
        ("adjacent", ("smoke", "kools", "pet", "horse")),
        ("same_house", ("smoke", "lucky_strike", "drink", "orange_juice")),
        ("same_house", ("nationality", "japanese", "smoke", "parliament")),
        ("adjacent", ("nationality", "norwegian", "color", "blue")),
    ]
    return CspInstance(attrs, tuple(Constraint(k, a) for k, a in clues))


def small_attributes(houses: int = 3, count: int = 3) -> dict[str, tuple[str, ...]]:
    return {f"a{i}": tuple(f"a{i}v{j}" for j in range(houses)) for i in range(count)}


def random_instance(rng: random.Random, houses: int = 3, attributes: int = 3, clues: tuple[int, int] = (2, 5)) -> CspInstance:
    """A random satisfiable puzzle: clues are drawn true of a hidden solution."""
    attrs = small_attributes(houses, attributes)
    names = list(attrs)
    hidden = {a: tuple(rng.sample(attrs[a], houses)) for a in names}
    pos = {(a, v): hidden[a].index(v) for a in names for v in attrs[a]}
    wanted = rng.randint(*clues)
    constraints: list[Constraint] = []
    while len(constraints) < wanted:
        kind = rng.choice(CONSTRAINT_KINDS)
        a1 = rng.choice(names)
        v1 = rng.choice(attrs[a1])
        if kind == "fixed":
            c = Constraint(kind, (a1, v1, pos[(a1, v1)]))
        else:
            a2 = rng.choice(names)
            v2 = rng.choice(attrs[a2])
            if (a1, v1) == (a2, v2):
                continue
            c = Constraint(kind, (a1, v1, a2, v2))
            if not c.holds(pos[(a1, v1)], pos[(a2, v2)]):
                continue
        constraints.append(c)
    return CspInstance(attrs, tuple(constraints))


def csp_casebase() -> tuple[list[Case], Taxonomy]:
    cases = [
        Case(
            "einstein_riddle",
            surface={"houses": 1.0, "attributes": 1.0, "clues": 1.0, "logic_grid": 0.8},
            gist={"constraint_satisfaction": 1.0},
            method=ELIMINATE,
            confidence=0.95,
            cost_estimate=1.0,
        )
    ]
    return cases, Taxonomy()


CSP_SURFACE = {"houses": 1.0, "attributes": 1.0, "clues": 1.0}


class CspDomain(Domain):
    tag = "csp"

    def default_surface(self, params):
        return dict(CSP_SURFACE)

    def default_casebase(self):
        return csp_casebase()

    def make_problem(self, data, problem_id="problem"):
        problem = super().make_problem(data, problem_id)
        params = problem.params
        if params.get("puzzle") == "zebra":
            problem.params["instance"] = zebra_puzzle()
        else:
            problem.params["instance"] = CspInstance.from_dict(params)
        return problem

    def cost_scale(self, method, problem):
        inst: CspInstance = problem.params["instance"]
        if method == BLIND:
            return float(inst.search_space)
        if method == ELIMINATE:
            return float(inst.houses * len(inst.attributes))
        return 1.0

    def builtin_candidates(self, problem, casebase, taxonomy, round_index):
        inst: CspInstance = problem.params["instance"]
        if inst.search_space > BLIND_LIMIT:
            return []
        return [Candidate(BLIND, 1.0, float(inst.search_space), "domain_builtin", BLIND)]

    def execute(self, problem, candidate, rng):
        inst: CspInstance = problem.params["instance"]
        method = candidate.payload or candidate.id
        if method == BLIND:
            res = csp_enumerate_blind(inst)
        elif method == ELIMINATE:
            res = csp_eliminate(inst)
        else:
            return Attempt(note=f"method {method!r} does not apply")
        note = f"{res.tested} assignments checked"
        if res.solution is None:
            return Attempt(note=note + "; unsatisfiable")
        return Attempt(True, res.solution, note=note)

    def goal_check(self, problem, solution):
        return solution is not None and is_satisfied(problem.params["instance"], solution)

    def solution_to_json(self, solution):
        return {a: list(v) for a, v in solution.items()} if solution else solution
