from __future__ import annotations

from fractions import Fraction

import pytest

from strongimpl.errors import (
    InputError,
    MissingEntry,
    NegativePrior,
    PriorNotNormalized,
    UnknownLabel,
    ZeroMarginal,
)
from strongimpl.fixtures import fixture_a, fixture_d
from strongimpl.instance import (
    bit_length,
    conditional_beliefs,
    format_rational,
    instance_to_dict,
    marginal,
    parse_rational,
    validate_instance,
)


def two_by_two(prior):
    raw = fixture_d(lambda i, x, k: 0, lambda k: "a")
    raw["prior"] = prior
    return raw


def test_fixture_a_accepted():
    inst = validate_instance(fixture_a())
    assert inst.n == 1
    assert inst.outcomes == ("a", "b")
    assert sum(inst.prior.values()) == 1


def test_prior_not_normalized():
    raw = fixture_a()
    raw["prior"] = {"t1": "1/2", "t2": "1/4"}
    with pytest.raises(PriorNotNormalized):
        validate_instance(raw)


def test_negative_prior():
    raw = fixture_a()
    raw["prior"] = {"t1": "3/2", "t2": "-1/2"}
    with pytest.raises(NegativePrior):
        validate_instance(raw)


def test_zero_marginal():
    raw = two_by_two({"t1,u1": "1/2", "t1,u2": "1/2", "t2,u1": "0", "t2,u2": "0"})
    with pytest.raises(ZeroMarginal):
        validate_instance(raw)


def test_zero_mass_profile_allowed():
    inst = validate_instance(two_by_two({"t1,u1": "1/2", "t1,u2": "1/4", "t2,u1": "1/4", "t2,u2": "0"}))
    assert inst.prior[(1, 1)] == 0


def test_missing_and_unknown_entries():
    raw = fixture_a()
    del raw["scf"]["t2"]
    with pytest.raises(MissingEntry):
        validate_instance(raw)
    raw = fixture_a()
    raw["scf"]["t2"] = "zz"
    with pytest.raises(UnknownLabel):
        validate_instance(raw)
    raw = fixture_a()
    raw["prior"]["t3"] = "0"
    with pytest.raises(UnknownLabel):
        validate_instance(raw)


def test_single_agent_prior_optional():
    raw = fixture_a()
    del raw["prior"]
    inst = validate_instance(raw)
    assert inst.prior[(0,)] == Fraction(1, 2)


@pytest.mark.parametrize("text,value", [("3/6", Fraction(1, 2)), ("-4", Fraction(-4)), (7, Fraction(7))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "1/-2", 0.5, "x", True])
def test_parse_rational_rejects(bad):
    with pytest.raises(InputError):
        parse_rational(bad)


def test_format_and_bits():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(5)) == "5"
    assert bit_length(Fraction(0)) == 1
    assert bit_length(Fraction(-3, 4)) == 2 + 3


def test_marginal_and_beliefs():
    inst = validate_instance(two_by_two({"t1,u1": "1/2", "t1,u2": "1/4", "t2,u1": "1/4", "t2,u2": "0"}))
    assert marginal(inst, 0, 0) == Fraction(3, 4)
    q = conditional_beliefs(inst)
    assert q(0, 0, (0,)) == Fraction(2, 3)
    assert q(0, 0, (1,)) == Fraction(1, 3)
    for i in range(2):
        for own in range(2):
            assert sum(q(i, own, co) for co in inst.co_profiles(i)) == 1


def test_uniform_beliefs_and_single_agent_degenerate():
    inst = validate_instance(fixture_d(lambda i, x, k: 0, lambda k: "a"))
    q = conditional_beliefs(inst)
    assert {q(i, own, co) for i in range(2) for own in range(2) for co in inst.co_profiles(i)} == {Fraction(1, 2)}
    assert all(marginal(inst, i, own) == Fraction(1, 2) for i in range(2) for own in range(2))
    single = validate_instance(fixture_a())
    assert conditional_beliefs(single)(0, 1, ()) == 1
    assert marginal(single, 0, 1) == single.prior[(1,)]


def test_idempotent_and_round_trip():
    inst = validate_instance(fixture_d(lambda i, x, k: i - len(k) % 3, lambda k: "b" if "t2" in k else "a"))
    assert validate_instance(inst) == inst
    assert validate_instance(instance_to_dict(inst)) == inst
