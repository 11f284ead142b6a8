"""Single-agent strong implementability in polynomial time.

With one agent no bad equilibrium can ever be selectively eliminated, so ``f``
is strongly implementable iff some incentive compatible direct mechanism has
no bad equilibrium at all. That is one strict/non-strict LP in the payments
``P(theta)``:

* strict: ``V(f(t'), t) + P(t') < V(f(t), t) + P(t)`` whenever ``f(t) != f(t')``
* non-strict: the same with ``<=`` for ``t != t'`` with ``f(t) == f(t')``

(the non-strict row of a pair with different outcomes is implied by its
strict row and is left out, as are the tautological self pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSingleAgent
from .instance import Instance, Profile
from .lp import Infeasible, LinearSystem, StrictlyFeasible, constraint, solve_mixed_system


def _require_single(inst: Instance) -> None:
    if inst.n != 1:
        raise NotSingleAgent(f"instance has {inst.n} agents")


def build_single_system(inst: Instance) -> LinearSystem:
    _require_single(inst)
    types = inst.profiles  # 1-tuples
    rows = []
    for t in types:
        for u in types:
            if u == t:
                continue
            strict = inst.scf[t] != inst.scf[u]
            # V(f(u), t) + P(u) (<|<=) V(f(t), t) + P(t)
            k_t, k_u = inst.profile_index[t], inst.profile_index[u]
            bound = inst.value(0, inst.scf[t], t) - inst.value(0, inst.scf[u], t)
            rows.append(constraint({k_u: 1, k_t: -1}, bound, strict))
    names = tuple(f"P[{inst.profile_key(t)}]" for t in types)
    return LinearSystem(len(types), tuple(rows), names)


@dataclass(frozen=True)
class SingleVerdict:
    implementable: bool
    payments: dict[Profile, tuple[Fraction, ...]] | None
    strict_slack: Fraction | None
    refutation: tuple[Fraction, ...] | None
    system: LinearSystem


def decide_strong_single(inst: Instance) -> SingleVerdict:
    system = build_single_system(inst)
    outcome = solve_mixed_system(system)
    if isinstance(outcome, StrictlyFeasible):
        payments = {t: (outcome.point[inst.profile_index[t]],) for t in inst.profiles}
        return SingleVerdict(True, payments, outcome.min_strict_slack, None, system)
    assert isinstance(outcome, Infeasible)
    return SingleVerdict(False, None, None, outcome.multipliers, system)
