"""Property-based checks of the invariants stated for each module."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from strongimpl.corpus import random_raw_instance
from strongimpl.instance import conditional_beliefs, instance_to_dict, validate_instance
from strongimpl.lp import LinearSystem, StrictlyFeasible, check_point, constraint, solve_mixed_system, validate_refutation
from strongimpl.mechanism import direct_mechanism, enumerate_equilibria, expected_utility, truthful_profile
from strongimpl.strong_general import decide_strong, verify_certificate
from strongimpl.weak import decide_weak

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)
seeds = st.integers(min_value=0, max_value=10**6)


def instance_from(seed, **kwargs):
    return validate_instance(random_raw_instance(random.Random(seed), **kwargs))


@st.composite
def systems(draw):
    n = draw(st.integers(1, 3))
    rows = []
    for _ in range(draw(st.integers(0, 5))):
        coeffs = {j: draw(st.integers(-3, 3)) for j in range(n)}
        rows.append(constraint(coeffs, draw(st.integers(-3, 3)), draw(st.booleans())))
    return LinearSystem(n, tuple(rows))


@given(systems())
@settings(max_examples=150, deadline=None)
def test_lp_outcome_always_validates(sys_):
    out = solve_mixed_system(sys_)
    if isinstance(out, StrictlyFeasible):
        assert check_point(sys_, out.point)
    else:
        assert validate_refutation(sys_, out.multipliers)
    assert solve_mixed_system(sys_) == out


@given(seeds, rationals)
@settings(max_examples=40, deadline=None)
def test_payment_shift_keeps_equilibria(seed, shift):
    inst = instance_from(seed, agents=2, max_outcomes=2)
    rng = random.Random(seed)
    pay = {th: tuple(Fraction(rng.randint(-2, 2)) for _ in range(2)) for th in inst.profiles}
    shifted = {th: (v[0] + shift, v[1]) for th, v in pay.items()}
    q = conditional_beliefs(inst)
    a = [r.profile for r in enumerate_equilibria(inst, q, direct_mechanism(inst, pay))]
    b = [r.profile for r in enumerate_equilibria(inst, q, direct_mechanism(inst, shifted))]
    assert a == b


@given(seeds, rationals)
@settings(max_examples=40, deadline=None)
def test_utility_is_affine_in_one_payment(seed, delta):
    inst = instance_from(seed, agents=2)
    q = conditional_beliefs(inst)
    alpha = truthful_profile(inst)
    base = {th: (Fraction(0),) * inst.n for th in inst.profiles}
    target = inst.profiles[seed % len(inst.profiles)]
    bumped = dict(base)
    bumped[target] = (delta,) + base[target][1:]
    m0, m1 = direct_mechanism(inst, base), direct_mechanism(inst, bumped)
    for own in range(len(inst.types[0])):
        for bid in range(len(inst.types[0])):
            # weight of the bumped entry: belief of the co-profile that lands there
            weight = sum(
                (q(0, own, co) for co in inst.co_profiles(0) if inst.join(0, co, bid) == target), Fraction(0)
            )
            u0 = expected_utility(inst, q, m0, alpha, 0, own, bid)
            u1 = expected_utility(inst, q, m1, alpha, 0, own, bid)
            assert u1 - u0 == weight * delta


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_instance_round_trip_and_belief_rows(seed):
    inst = instance_from(seed)
    assert validate_instance(instance_to_dict(inst)) == inst
    assert validate_instance(inst) == inst
    q = conditional_beliefs(inst)
    for i in range(inst.n):
        for own in range(len(inst.types[i])):
            assert sum(q(i, own, co) for co in inst.co_profiles(i)) == 1


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_strong_implies_weak_and_certificates_verify(seed):
    inst = instance_from(seed)
    result = decide_strong(inst)
    if result.implementable:
        assert decide_weak(inst).implementable
        assert verify_certificate(inst, conditional_beliefs(inst), result.certificate)
    assert decide_strong(inst) == result
