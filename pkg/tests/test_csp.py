import itertools
import json
import random

import pytest

from effsolve.domains.csp import (
    BLIND,
    ELIMINATE,
    Constraint,
    CspDomain,
    CspInstance,
    count_solutions,
    csp_eliminate,
    csp_enumerate_blind,
    is_satisfied,
    random_instance,
    small_attributes,
    zebra_puzzle,
)
from effsolve.errors import TooLarge


def unique_fixture():
    attrs = small_attributes()
    clues = [
        Constraint("fixed", ("a0", "a0v0", 0)),
        Constraint("adjacent", ("a2", "a2v1", "a1", "a1v2")),
        Constraint("fixed", ("a2", "a2v2", 1)),
        Constraint("same_house", ("a2", "a2v1", "a0", "a0v1")),
        Constraint("fixed", ("a1", "a1v1", 0)),
    ]
    return CspInstance(attrs, tuple(clues))


def all_solutions(inst):
    names = list(inst.attributes)
    product = itertools.product(*(itertools.permutations(inst.attributes[a]) for a in names))
    return [dict(zip(names, p)) for p in product if is_satisfied(inst, dict(zip(names, p)))]


def lex_position(inst, assignment):
    names = list(inst.attributes)
    product = itertools.product(*(itertools.permutations(inst.attributes[a]) for a in names))
    return [dict(zip(names, p)) for p in product].index(assignment) + 1


def test_fixture_is_unique():
    assert len(all_solutions(unique_fixture())) == 1


def test_blind_tested_is_lex_position():
    inst = unique_fixture()
    res = csp_enumerate_blind(inst)
    assert res.solution == all_solutions(inst)[0]
    assert res.tested == lex_position(inst, res.solution)


def test_blind_unsatisfiable_tests_everything():
    inst = CspInstance(small_attributes(), (
        Constraint("fixed", ("a0", "a0v0", 0)),
        Constraint("fixed", ("a0", "a0v1", 0)),
    ))
    res = csp_enumerate_blind(inst)
    assert res.solution is None
    assert res.tested == 216


def test_one_house():
    inst = CspInstance({"color": ("red",), "pet": ("dog",)})
    assert csp_enumerate_blind(inst).tested == 1
    assert csp_eliminate(inst).solution == {"color": ("red",), "pet": ("dog",)}


def test_blind_too_large():
    with pytest.raises(TooLarge):
        csp_enumerate_blind(zebra_puzzle())


def test_eliminate_matches_blind_with_fewer_tests():
    inst = unique_fixture()
    blind, elim = csp_enumerate_blind(inst), csp_eliminate(inst)
    assert elim.solution == blind.solution
    assert blind.tested >= 10 * elim.tested


def test_eliminate_all_fixed_tests_once():
    attrs = small_attributes()
    clues = tuple(Constraint("fixed", (a, v, i)) for a, vals in attrs.items() for i, v in enumerate(vals))
    res = csp_eliminate(CspInstance(attrs, clues))
    assert res.tested == 1
    assert res.solution == {a: vals for a, vals in attrs.items()}


def test_eliminate_unsatisfiable():
    inst = CspInstance(small_attributes(), (
        Constraint("left_of", ("a0", "a0v0", "a0", "a0v1")),
        Constraint("left_of", ("a0", "a0v1", "a0", "a0v0")),
    ))
    assert csp_eliminate(inst).solution is None


def test_zebra_solved_uniquely():
    inst = zebra_puzzle()
    res = csp_eliminate(inst)
    assert res.tested < 10**4
    assert is_satisfied(inst, res.solution)
    zebra_house = res.solution["pet"].index("zebra")
    assert res.solution["nationality"][zebra_house] == "japanese"
    water_house = res.solution["drink"].index("water")
    assert res.solution["nationality"][water_house] == "norwegian"
    assert count_solutions(inst, cap=2) == 1


def test_random_instances_sound_and_no_worse():
    rng = random.Random(11)
    for _ in range(100):
        inst = random_instance(rng)
        blind, elim = csp_enumerate_blind(inst), csp_eliminate(inst)
        assert elim.solution == blind.solution
        assert elim.tested <= blind.tested
        if blind.tested > 1:
            assert elim.tested < blind.tested
        assert count_solutions(inst) == len(all_solutions(inst))


def test_instance_validation():
    with pytest.raises(ValueError):
        CspInstance({"a": ("x", "y"), "b": ("x",)})
    with pytest.raises(ValueError):
        CspInstance({"a": ("x", "x")})
    with pytest.raises(ValueError):
        CspInstance({"a": ("x", "y")}, (Constraint("fixed", ("a", "z", 0)),))
    with pytest.raises(ValueError):
        Constraint("between", ("a", "x", "a", "y"))


def test_instance_json_round_trip():
    inst = zebra_puzzle()
    data = json.loads(json.dumps(inst.to_dict()))
    assert CspInstance.from_dict(data) == inst


def test_domain_prefers_elimination():
    domain = CspDomain()
    problem = domain.make_problem({"params": unique_fixture().to_dict()})
    assert domain.cost_scale(BLIND, problem) == 216
    assert domain.cost_scale(ELIMINATE, problem) == 9
    assert [c.id for c in domain.builtin_candidates(problem, [], None, 1)] == [BLIND]
    zebra = domain.make_problem({"params": {"puzzle": "zebra"}})
    assert domain.builtin_candidates(zebra, [], None, 1) == []
