"""Independent reference implementations used to cross-check the solvers.

None of these import the solver internals: they work from raw rows, raw
priors and raw valuations, and favour obviousness over speed.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from strongimpl.lp import LinearSystem

# ---------------------------------------------------------------- feasibility


def fourier_motzkin_feasible(system: LinearSystem) -> bool:
    """Strict/non-strict feasibility by Fourier-Motzkin elimination.

    A combined row is strict when either parent is strict; after all
    variables are gone the system is feasible iff every ``0 <= b`` has
    ``b >= 0`` and every ``0 < b`` has ``b > 0``.
    """
    rows = [
        ([Fraction(row.coefficients.get(j, 0)) for j in range(system.variable_count)], Fraction(row.bound), row.strict)
        for row in system.constraints
    ]
    for var in range(system.variable_count):
        pos = [r for r in rows if r[0][var] > 0]
        neg = [r for r in rows if r[0][var] < 0]
        rest = [r for r in rows if r[0][var] == 0]
        for (ap, bp, sp), (an, bn, sn) in itertools.product(pos, neg):
            lp, ln = -an[var], ap[var]
            coeffs = [lp * x + ln * y for x, y in zip(ap, an)]
            rest.append((coeffs, lp * bp + ln * bn, sp or sn))
        rows = rest
    return all((b > 0) if strict else (b >= 0) for _, b, strict in rows)


# ---------------------------------------------------------------- equilibria


def oracle_utility(inst, mech, alpha, i, own, bid):
    """Interim utility computed from the joint prior directly (no beliefs)."""
    num = Fraction(0)
    den = Fraction(0)
    for theta, p in inst.prior.items():
        if theta[i] != own or not p:
            continue
        den += p
        bids = tuple(bid if j == i else alpha[j][theta[j]] for j in range(inst.n))
        num += p * (inst.valuations[i][(mech.outcome[bids], theta)] + mech.payments[bids][i])
    return num / den


def oracle_equilibria(inst, mech):
    """All pure equilibria, by direct enumeration, as sorted profile tuples."""
    per_agent = [
        list(itertools.product(range(len(mech.bids[i])), repeat=len(inst.types[i]))) for i in range(inst.n)
    ]
    out = []
    for alpha in itertools.product(*per_agent):
        ok = True
        for i in range(inst.n):
            for own in range(len(inst.types[i])):
                here = oracle_utility(inst, mech, alpha, i, own, alpha[i][own])
                if any(oracle_utility(inst, mech, alpha, i, own, b) > here for b in range(len(mech.bids[i]))):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(alpha)
    return out


def oracle_strongly_implements(inst, mech) -> bool:
    eqs = oracle_equilibria(inst, mech)
    if not eqs:
        return False
    for alpha in eqs:
        for theta in inst.profiles:
            bids = tuple(alpha[j][theta[j]] for j in range(inst.n))
            if mech.outcome[bids] != inst.scf[theta]:
                return False
    return True


# ---------------------------------------------------------------- payment grid


def grid_values(bound: int, max_den: int = 4) -> list[Fraction]:
    vals = {Fraction(n, d) for d in range(1, max_den + 1) for n in range(-bound * d, bound * d + 1)}
    return sorted(vals)


def grid_single_agent(inst) -> dict | None:
    """Search payments on a rational grid for a single-agent direct mechanism
    that is incentive compatible and has no bad equilibrium.

    Payments are shift invariant for one agent, so ``P(first type) = 0``.
    """
    from strongimpl.mechanism import direct_mechanism  # only to package the mechanism

    vmax = max((abs(v) for v in inst.valuations[0].values()), default=0)
    grid = grid_values(max(1, 4 * int(vmax)))
    types = inst.profiles
    for rest in itertools.product(grid, repeat=len(types) - 1):
        pay = {types[0]: (Fraction(0),)}
        pay.update({t: (v,) for t, v in zip(types[1:], rest)})
        mech = direct_mechanism(inst, pay)
        truthful = (tuple(range(len(types))),)
        if truthful in oracle_equilibria(inst, mech) and oracle_strongly_implements(inst, mech):
            return pay
    return None
