"""Instance and mechanism generators for property tests and acceptance runs.

Everything is driven by an explicit ``random.Random`` so a seed pins the
corpus exactly.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Any, Iterator

from .instance import Instance, format_rational, validate_instance
from .mechanism import Mechanism, StrategyProfile, make_mechanism, truthful_profile

TYPE_NAMES = ("t", "u", "v")


def _keys(types: list[list[str]]) -> list[str]:
    return [",".join(p) for p in itertools.product(*types)]


def _random_prior(rng: random.Random, types: list[list[str]], keys: list[str]) -> dict[str, str]:
    """Random rational prior with every marginal positive; some profiles may
    carry zero mass."""
    while True:
        weights = [rng.randint(0, 4) for _ in keys]
        total = sum(weights)
        if not total:
            continue
        mass = dict(zip(keys, weights))
        ok = all(
            sum(w for k, w in mass.items() if k.split(",")[i] == t) > 0
            for i, ts in enumerate(types)
            for t in ts
        )
        if ok:
            return {k: format_rational(Fraction(w, total)) for k, w in mass.items()}


def _product_prior(rng: random.Random, types: list[list[str]], keys: list[str]) -> dict[str, str]:
    marginals = []
    for ts in types:
        w = [rng.randint(1, 4) for _ in ts]
        marginals.append({t: Fraction(x, sum(w)) for t, x in zip(ts, w)})
    prior = {}
    for k in keys:
        p = Fraction(1)
        for i, t in enumerate(k.split(",")):
            p *= marginals[i][t]
        prior[k] = format_rational(p)
    return prior


def random_raw_instance(
    rng: random.Random,
    agents: int | None = None,
    max_types: int = 2,
    max_outcomes: int = 3,
    value_range: int = 2,
    product: bool = False,
) -> dict[str, Any]:
    n = agents if agents is not None else rng.choice((1, 2))
    types = [[f"{TYPE_NAMES[i]}{k + 1}" for k in range(rng.randint(1, max_types))] for i in range(n)]
    outcomes = ["a", "b", "c"][: rng.randint(1, max_outcomes)]
    keys = _keys(types)
    prior = _product_prior(rng, types, keys) if product else _random_prior(rng, types, keys)
    return {
        "agents": n,
        "outcomes": outcomes,
        "types": types,
        "prior": prior,
        "valuations": [
            {x: {k: str(rng.randint(-value_range, value_range)) for k in keys} for x in outcomes}
            for _ in range(n)
        ],
        "scf": {k: rng.choice(outcomes) for k in keys},
    }


def random_corpus(seed: int, count: int, **kwargs: Any) -> Iterator[Instance]:
    rng = random.Random(seed)
    for _ in range(count):
        yield validate_instance(random_raw_instance(rng, **kwargs))


def desk_scale_corpus(seed: int, count: int) -> Iterator[Instance]:
    """Two agents, two types each, two outcomes."""
    rng = random.Random(seed)
    for _ in range(count):
        raw = random_raw_instance(rng, agents=2, max_types=2, max_outcomes=2)
        while len(raw["outcomes"]) != 2 or any(len(t) != 2 for t in raw["types"]):
            raw = random_raw_instance(rng, agents=2, max_types=2, max_outcomes=2)
        yield validate_instance(raw)


def exhaustive_single_agent() -> Iterator[Instance]:
    """Every single-agent instance with two types, two outcomes, valuations
    in {-1, 0, 1} and any social choice function: 3^4 * 4 instances."""
    types, outcomes = ["t1", "t2"], ["a", "b"]
    for vals in itertools.product((-1, 0, 1), repeat=4):
        for f in itertools.product(outcomes, repeat=2):
            yield validate_instance(
                {
                    "agents": 1,
                    "outcomes": outcomes,
                    "types": [types],
                    "valuations": [
                        {
                            "a": {"t1": str(vals[0]), "t2": str(vals[1])},
                            "b": {"t1": str(vals[2]), "t2": str(vals[3])},
                        }
                    ],
                    "scf": dict(zip(types, f)),
                }
            )


def extended_mechanism(
    inst: Instance,
    payments: dict,
    extra: int,
    penalty: Fraction,
    rng: random.Random,
    shuffle: bool = True,
) -> tuple[Mechanism, StrategyProfile]:
    """Direct mechanism ``Gamma_(f,P)`` with its bids relabeled and shuffled
    and ``extra`` additional bids per agent.

    Extra bids copy the row of a random type bid (outcomes and payments),
    minus ``penalty`` in payment; with a large penalty they are strictly
    dominated, with ``penalty == 0`` they duplicate a type bid exactly.
    Returns the mechanism and the equilibrium mirroring truthful play.
    """
    bids, origin = [], []
    for i, ts in enumerate(inst.types):
        src = list(range(len(ts))) + [rng.randrange(len(ts)) for _ in range(extra)]
        order = list(range(len(src)))
        if shuffle:
            rng.shuffle(order)
        origin.append([src[k] for k in order])
        bids.append([f"s{i}_{k}" if order[k] < len(ts) else f"x{i}_{k}" for k in range(len(src))])
    outcome, pays = {}, {}
    for s in itertools.product(*(range(len(b)) for b in bids)):
        theta = tuple(origin[i][k] for i, k in enumerate(s))
        outcome[s] = inst.scf[theta]
        vec = list(payments[theta])
        for i, k in enumerate(s):
            if not bids[i][k].startswith("s"):
                vec[i] -= penalty
        pays[s] = tuple(vec)
    mech = make_mechanism(inst, bids, outcome, pays)
    alpha = []
    for i, ts in enumerate(inst.types):
        pick = []
        for t in range(len(ts)):
            pick.append(next(k for k in range(len(bids[i])) if origin[i][k] == t and bids[i][k].startswith("s")))
        alpha.append(tuple(pick))
    alpha = tuple(alpha)
    if not shuffle and extra == 0:
        assert alpha == truthful_profile(inst)
    return mech, alpha
