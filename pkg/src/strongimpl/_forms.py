"""Interim utilities of the direct mechanism as affine forms in the payments."""

from __future__ import annotations

from fractions import Fraction

from .instance import Beliefs, Instance, Profile
from .lp import LinearConstraint, constraint
from .mechanism import StrategyProfile, co_bids

Form = tuple[dict[int, Fraction], Fraction]


def payment_var(inst: Instance, i: int, theta: Profile) -> int:
    """Column of P_i(theta): agents in blocks of |Theta| profiles."""
    return i * len(inst.profiles) + inst.profile_index[theta]


def payment_variable_names(inst: Instance) -> tuple[str, ...]:
    return tuple(
        f"P{i}[{inst.profile_key(th)}]" for i in range(inst.n) for th in inst.profiles
    )


def utility_form(
    inst: Instance, beliefs: Beliefs, alpha: StrategyProfile, i: int, own: int, report: int
) -> Form:
    """Expected utility of agent ``i`` (type ``own``) reporting ``report`` in
    Gamma_(f,P) while the others play ``alpha``."""
    coeffs: dict[int, Fraction] = {}
    const = Fraction(0)
    for co in inst.co_profiles(i):
        q = beliefs(i, own, co)
        if not q:
            continue
        reported = inst.join(i, co_bids(alpha, i, co), report)
        const += q * inst.value(i, inst.scf[reported], inst.join(i, co, own))
        col = payment_var(inst, i, reported)
        coeffs[col] = coeffs.get(col, Fraction(0)) + q
    return coeffs, const


def difference(lo: Form, hi: Form, strict: bool) -> LinearConstraint:
    """Row ``lo <= hi`` (``lo < hi`` when strict) as ``(lo - hi) . z <= const``."""
    coeffs = dict(lo[0])
    for j, c in hi[0].items():
        coeffs[j] = coeffs.get(j, Fraction(0)) - c
    return constraint(coeffs, hi[1] - lo[1], strict)


def comparison_row(
    inst: Instance,
    beliefs: Beliefs,
    alpha: StrategyProfile,
    i: int,
    own: int,
    hi: int,
    lo: int,
    strict: bool,
) -> LinearConstraint:
    """Agent ``i`` of type ``own`` weakly (strictly) prefers reporting ``hi`` to ``lo``."""
    return difference(
        utility_form(inst, beliefs, alpha, i, own, lo),
        utility_form(inst, beliefs, alpha, i, own, hi),
        strict,
    )
