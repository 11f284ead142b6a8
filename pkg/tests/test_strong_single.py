from __future__ import annotations

from fractions import Fraction

import pytest
from oracles import grid_single_agent, oracle_equilibria

from strongimpl.corpus import exhaustive_single_agent
from strongimpl.errors import NotSingleAgent
from strongimpl.fixtures import constant_scf
from strongimpl.instance import conditional_beliefs, validate_instance
from strongimpl.lp import check_point, validate_refutation
from strongimpl.mechanism import direct_mechanism, enumerate_equilibria, truthful_profile
from strongimpl.strong_single import build_single_system, decide_strong_single


def test_constant_f_has_no_strict_rows():
    inst = validate_instance(constant_scf((3,)))
    sys_ = build_single_system(inst)
    assert not any(r.strict for r in sys_.constraints)
    assert check_point(sys_, [Fraction(0)] * 3)


def test_fixture_a(fixture_a):
    sys_ = build_single_system(fixture_a)
    assert sum(r.strict for r in sys_.constraints) == 2 and len(sys_.constraints) == 2
    v = decide_strong_single(fixture_a)
    assert v.implementable and v.payments == {(0,): (0,), (1,): (0,)} and v.strict_slack == 1


def test_fixture_b(fixture_b):
    sys_ = build_single_system(fixture_b)
    strict = [r for r in sys_.constraints if r.strict]
    # P(t2) - P(t1) < 1 and P(t1) - P(t2) < -1: the sum reads 0 < 0
    assert sorted(tuple(sorted(r.coefficients.items())) for r in strict) == [((0, -1), (1, 1)), ((0, 1), (1, -1))]
    assert sum(r.bound for r in strict) == 0
    v = decide_strong_single(fixture_b)
    assert not v.implementable and v.refutation == (1, 1)
    assert validate_refutation(sys_, v.refutation)


def test_fixture_c(fixture_c):
    v = decide_strong_single(fixture_c)
    assert not v.implementable
    assert validate_refutation(v.system, v.refutation)


def test_rejects_two_agents(fixture_d):
    with pytest.raises(NotSingleAgent):
        decide_strong_single(fixture_d)


def test_exhaustive_against_grid_and_enumeration():
    for inst in exhaustive_single_agent():
        v = decide_strong_single(inst)
        assert v.implementable == (grid_single_agent(inst) is not None)
        if v.implementable:
            assert check_point(v.system, [v.payments[t][0] for t in inst.profiles])
            mech = direct_mechanism(inst, v.payments)
            reps = enumerate_equilibria(inst, conditional_beliefs(inst), mech)
            assert reps and all(r.classification == "good" for r in reps)
            assert truthful_profile(inst) in oracle_equilibria(inst, mech)
        else:
            assert validate_refutation(v.system, v.refutation)
