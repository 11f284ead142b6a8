from __future__ import annotations

import random
from fractions import Fraction

import pytest
from oracles import fourier_motzkin_feasible

from strongimpl.errors import DimensionMismatch
from strongimpl.lp import (
    Infeasible,
    LinearSystem,
    StrictlyFeasible,
    check_point,
    constraint,
    dump_system,
    solve_mixed_system,
    validate_refutation,
)


def system(n, *rows):
    return LinearSystem(n, tuple(constraint(c, b, s) for c, b, s in rows))


def test_half_open_interval_feasible():
    out = solve_mixed_system(system(1, ({0: -1}, 0, False), ({0: 1}, 1, True)))
    assert isinstance(out, StrictlyFeasible)
    assert 0 <= out.point[0] < 1
    assert out.min_strict_slack > 0


def test_nonstrict_contradiction():
    sys_ = system(1, ({0: 1}, 0, False), ({0: -1}, -1, False))
    out = solve_mixed_system(sys_)
    assert isinstance(out, Infeasible)
    assert out.multipliers == (1, 1)
    assert validate_refutation(sys_, (1, 1))
    assert not validate_refutation(sys_, (1, 0))


def test_strict_contradiction():
    out = solve_mixed_system(system(1, ({0: 1}, 0, True), ({0: -1}, 0, True)))
    assert isinstance(out, Infeasible)
    assert out.multipliers == (1, 1)


def test_nonstrict_touching_is_not_refuted_without_strict_weight():
    # x <= 0 and -x <= 0 is feasible at x = 0
    out = solve_mixed_system(system(1, ({0: 1}, 0, False), ({0: -1}, 0, False)))
    assert isinstance(out, StrictlyFeasible)
    assert out.point == (0,)


def test_empty_system():
    sys_ = LinearSystem(2, ())
    assert isinstance(solve_mixed_system(sys_), StrictlyFeasible)
    assert check_point(sys_, [Fraction(5), Fraction(-1)])


def test_dimension_mismatch():
    sys_ = system(2, ({0: 1}, 0, False))
    with pytest.raises(DimensionMismatch):
        check_point(sys_, [0])
    with pytest.raises(DimensionMismatch):
        validate_refutation(sys_, [1, 1])


def test_unknown_variable_rejected():
    with pytest.raises(ValueError):
        system(1, ({3: 1}, 0, False))


def test_dump_is_readable():
    text = dump_system(system(2, ({0: 1, 1: Fraction(-1, 2)}, 3, True)))
    assert "<" in text and "1/2" in text


def random_system(rng, nvars, nrows, coef=3):
    rows = []
    for _ in range(nrows):
        coeffs = {j: rng.randint(-coef, coef) for j in range(nvars)}
        rows.append((coeffs, rng.randint(-coef, coef), rng.random() < 0.5))
    return system(nvars, *rows)


@pytest.mark.parametrize("seed", range(6))
def test_against_fourier_motzkin(seed):
    rng = random.Random(seed)
    for _ in range(60):
        sys_ = random_system(rng, rng.randint(1, 3), rng.randint(1, 6))
        out = solve_mixed_system(sys_)
        assert isinstance(out, StrictlyFeasible) == fourier_motzkin_feasible(sys_)
        if isinstance(out, StrictlyFeasible):
            assert check_point(sys_, out.point)
        else:
            assert validate_refutation(sys_, out.multipliers)


def test_scaling_rows_keeps_verdict():
    rng = random.Random(11)
    for _ in range(40):
        sys_ = random_system(rng, 2, 4)
        scaled = LinearSystem(
            sys_.variable_count,
            tuple(
                constraint({j: c * k for j, c in r.coefficients.items()}, r.bound * k, r.strict)
                for r, k in zip(sys_.constraints, (Fraction(1, 3), 2, 5, Fraction(7, 2)))
            ),
        )
        a, b = solve_mixed_system(sys_), solve_mixed_system(scaled)
        assert type(a) is type(b)


def test_deterministic():
    rng = random.Random(3)
    sys_ = random_system(rng, 3, 5)
    assert solve_mixed_system(sys_) == solve_mixed_system(sys_)
