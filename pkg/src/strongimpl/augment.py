"""Augmented revelation mechanisms built from an arbitrary mechanism and one of
its equilibria.

Given ``Gamma = (S, g, P)`` and an equilibrium ``alpha``, agent ``i`` keeps a
type bid for every type plus a flag for every bid ``alpha_i`` never uses.
Bids are translated back by ``phi_i`` (type ``t`` -> ``alpha_i(t)``, flag ->
itself) and the new outcome and payment functions are ``g o phi`` and
``P o phi``, so truthful reporting reproduces ``alpha``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any

from .errors import NotAnEquilibrium
from .instance import Beliefs, Instance
from .mechanism import (
    DEFAULT_BUDGET,
    Mechanism,
    StrategyProfile,
    is_equilibrium,
    make_mechanism,
    mechanism_to_dict,
    profile_count,
    truthful_profile,
    verify_strong_implementation,
)

FLAG_PREFIX = "flag:"


@dataclass(frozen=True)
class AugmentationResult:
    mechanism: Mechanism
    # bid_map[i][k] = index in the original S_i of augmented bid k
    bid_map: tuple[tuple[int, ...], ...]
    # flags[i] = original bid indices kept as flags (T_i)
    flags: tuple[tuple[int, ...], ...]
    truthful_equilibrium: bool
    source_implements: bool | None = None


def augment_from_mechanism(
    inst: Instance,
    beliefs: Beliefs,
    mech: Mechanism,
    alpha: StrategyProfile,
    budget: int = DEFAULT_BUDGET,
) -> AugmentationResult:
    if not is_equilibrium(inst, beliefs, mech, alpha).is_equilibrium:
        raise NotAnEquilibrium("the chosen strategy profile is not an equilibrium of the mechanism")
    source_ok = None
    if profile_count(inst, mech) <= budget:
        source_ok = verify_strong_implementation(inst, beliefs, mech, budget).implements

    bids, phi, flags = [], [], []
    for i in range(inst.n):
        used = set(alpha[i])
        t_i = tuple(s for s in range(len(mech.bids[i])) if s not in used)
        flags.append(t_i)
        bids.append(tuple(inst.types[i]) + tuple(FLAG_PREFIX + mech.bids[i][s] for s in t_i))
        phi.append(tuple(alpha[i]) + t_i)

    outcome, payments = {}, {}
    for sbar in itertools.product(*(range(len(b)) for b in bids)):
        s = tuple(phi[i][k] for i, k in enumerate(sbar))
        outcome[sbar] = mech.outcome[s]
        payments[sbar] = mech.payments[s]
    result = make_mechanism(inst, bids, outcome, payments)
    truthful = is_equilibrium(inst, beliefs, result, truthful_profile(inst)).is_equilibrium
    return AugmentationResult(result, tuple(phi), tuple(flags), truthful, source_ok)


def augmentation_to_dict(inst: Instance, source: Mechanism, result: AugmentationResult) -> dict[str, Any]:
    out = mechanism_to_dict(inst, result.mechanism)
    out["flags"] = [[FLAG_PREFIX + source.bids[i][s] for s in t_i] for i, t_i in enumerate(result.flags)]
    out["bidMap"] = [
        {result.mechanism.bids[i][k]: source.bids[i][s] for k, s in enumerate(phi_i)}
        for i, phi_i in enumerate(result.bid_map)
    ]
    return out
