"""Finite mechanisms, pure strategy profiles, interim expected utilities and
brute-force Bayesian equilibrium enumeration.

Everything in here is deliberately naive: it is the ground truth the LP based
deciders are checked against.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, InputError, MissingEntry, UnknownLabel
from .instance import Beliefs, Instance, Profile, format_rational, parse_rational

BidProfile = tuple[int, ...]
Strategy = tuple[int, ...]
StrategyProfile = tuple[Strategy, ...]

DEFAULT_BUDGET = 10**6

GOOD = "good"
BAD = "bad"


@dataclass(frozen=True)
class Mechanism:
    bids: tuple[tuple[str, ...], ...]
    outcome: Mapping[BidProfile, int]
    payments: Mapping[BidProfile, tuple[Fraction, ...]]
    direct: bool = False

    @property
    def n(self) -> int:
        return len(self.bids)

    @cached_property
    def bid_profiles(self) -> tuple[BidProfile, ...]:
        return tuple(itertools.product(*(range(len(b)) for b in self.bids)))

    def bid_key(self, s: BidProfile) -> str:
        return ",".join(self.bids[i][b] for i, b in enumerate(s))


def make_mechanism(
    inst: Instance,
    bids: Sequence[Sequence[str]],
    outcome: Mapping[BidProfile, int],
    payments: Mapping[BidProfile, Sequence[Fraction]],
) -> Mechanism:
    bids = tuple(tuple(b) for b in bids)
    if len(bids) != inst.n:
        raise InputError(f"mechanism has {len(bids)} bid sets for {inst.n} agents")
    for i, b in enumerate(bids):
        if not b or len(set(b)) != len(b):
            raise InputError(f"bid set of agent {i} must be non-empty and duplicate-free")
    out: dict[BidProfile, int] = {}
    pay: dict[BidProfile, tuple[Fraction, ...]] = {}
    for s in itertools.product(*(range(len(b)) for b in bids)):
        if s not in outcome or s not in payments:
            raise MissingEntry(f"mechanism undefined on bid profile {s}")
        x = outcome[s]
        if not 0 <= x < len(inst.outcomes):
            raise UnknownLabel(f"outcome index {x} out of range")
        p = tuple(Fraction(v) for v in payments[s])
        if len(p) != inst.n:
            raise InputError(f"payment vector at {s} has {len(p)} entries, expected {inst.n}")
        out[s] = x
        pay[s] = p
    return Mechanism(bids, out, pay, direct=bids == inst.types)


def direct_mechanism(inst: Instance, payments: Mapping[Profile, Sequence[Fraction]]) -> Mechanism:
    """The direct revelation mechanism Gamma_(f,P)."""
    return make_mechanism(inst, inst.types, inst.scf, payments)


def zero_payments(inst: Instance) -> dict[Profile, tuple[Fraction, ...]]:
    return {theta: (Fraction(0),) * inst.n for theta in inst.profiles}


def strategy_profiles(inst: Instance, mech: Mechanism) -> Iterator[StrategyProfile]:
    per_agent = [
        list(itertools.product(range(len(mech.bids[i])), repeat=len(inst.types[i])))
        for i in range(inst.n)
    ]
    return itertools.product(*per_agent)


def profile_count(inst: Instance, mech: Mechanism) -> int:
    return math.prod(len(mech.bids[i]) ** len(inst.types[i]) for i in range(inst.n))


def truthful_profile(inst: Instance) -> StrategyProfile:
    return tuple(tuple(range(len(t))) for t in inst.types)


def play(alpha: StrategyProfile, theta: Profile) -> BidProfile:
    return tuple(alpha[i][t] for i, t in enumerate(theta))


def co_bids(alpha: StrategyProfile, i: int, co: tuple[int, ...]) -> tuple[int, ...]:
    """Bids of the agents other than ``i`` when their types are ``co``."""
    others = [j for j in range(len(alpha)) if j != i]
    return tuple(alpha[j][t] for j, t in zip(others, co))


def expected_utility(
    inst: Instance,
    beliefs: Beliefs,
    mech: Mechanism,
    alpha: StrategyProfile,
    i: int,
    own: int,
    bid: int,
) -> Fraction:
    """Interim expected valuation plus payment of agent ``i`` with type ``own``
    bidding ``bid`` while the others follow ``alpha`` (``alpha[i]`` is ignored)."""
    total = Fraction(0)
    for co in inst.co_profiles(i):
        q = beliefs(i, own, co)
        if not q:
            continue
        s = inst.join(i, co_bids(alpha, i, co), bid)
        theta = inst.join(i, co, own)
        total += q * (inst.value(i, mech.outcome[s], theta) + mech.payments[s][i])
    return total


@dataclass(frozen=True)
class EquilibriumReport:
    profile: StrategyProfile
    is_equilibrium: bool
    violation: tuple[int, int, int] | None = None  # (agent, type, better bid)
    classification: str | None = None


def realizes(inst: Instance, mech: Mechanism, alpha: StrategyProfile) -> bool:
    """True iff g(alpha(theta)) = f(theta) for every type profile."""
    return all(mech.outcome[play(alpha, th)] == inst.scf[th] for th in inst.profiles)


def is_equilibrium(
    inst: Instance, beliefs: Beliefs, mech: Mechanism, alpha: StrategyProfile
) -> EquilibriumReport:
    for i in range(inst.n):
        for own in range(len(inst.types[i])):
            current = expected_utility(inst, beliefs, mech, alpha, i, own, alpha[i][own])
            for bid in range(len(mech.bids[i])):
                if bid != alpha[i][own] and (
                    expected_utility(inst, beliefs, mech, alpha, i, own, bid) > current
                ):
                    return EquilibriumReport(alpha, False, (i, own, bid))
    label = None
    if mech.direct:
        label = GOOD if realizes(inst, mech, alpha) else BAD
    return EquilibriumReport(alpha, True, None, label)


def enumerate_equilibria(
    inst: Instance, beliefs: Beliefs, mech: Mechanism, budget: int = DEFAULT_BUDGET
) -> list[EquilibriumReport]:
    count = profile_count(inst, mech)
    if count > budget:
        raise BudgetExceeded(
            f"{count} strategy profiles exceed the enumeration budget of {budget}",
            {"profiles": count, "budget": budget},
        )
    found = []
    for alpha in strategy_profiles(inst, mech):
        rep = is_equilibrium(inst, beliefs, mech, alpha)
        if rep.is_equilibrium:
            found.append(rep)
    return found


def is_incentive_compatible(
    inst: Instance, beliefs: Beliefs, payments: Mapping[Profile, Sequence[Fraction]]
) -> bool:
    mech = direct_mechanism(inst, payments)
    return is_equilibrium(inst, beliefs, mech, truthful_profile(inst)).is_equilibrium


@dataclass(frozen=True)
class StrongVerdict:
    implements: bool
    witness: EquilibriumReport | None = None
    reason: str | None = None  # "bad-equilibrium" | "no-equilibrium"
    equilibria: int = 0


def verify_strong_implementation(
    inst: Instance, beliefs: Beliefs, mech: Mechanism, budget: int = DEFAULT_BUDGET
) -> StrongVerdict:
    """Brute-force check that ``mech`` has an equilibrium and every
    equilibrium realizes the social choice function."""
    eqs = enumerate_equilibria(inst, beliefs, mech, budget)
    if not eqs:
        return StrongVerdict(False, None, "no-equilibrium", 0)
    for rep in eqs:
        if not realizes(inst, mech, rep.profile):
            return StrongVerdict(False, rep, "bad-equilibrium", len(eqs))
    return StrongVerdict(True, None, None, len(eqs))


# --- serialization -----------------------------------------------------------


def strategy_key(mech_bids: Sequence[Sequence[str]], alpha: StrategyProfile) -> str:
    return "|".join(",".join(mech_bids[i][b] for b in strat) for i, strat in enumerate(alpha))


def parse_strategy(inst: Instance, mech: Mechanism, key: str) -> StrategyProfile:
    parts = key.split("|")
    if len(parts) != inst.n:
        raise InputError(f"strategy {key!r} must list {inst.n} agents separated by '|'")
    alpha = []
    for i, part in enumerate(parts):
        labels = [s.strip() for s in part.split(",")]
        if len(labels) != len(inst.types[i]):
            raise InputError(f"strategy of agent {i} needs one bid per type")
        try:
            alpha.append(tuple(mech.bids[i].index(b) for b in labels))
        except ValueError as exc:
            raise UnknownLabel(f"unknown bid in strategy {key!r}") from exc
    return tuple(alpha)


def _payment_json(inst: Instance, vec: Sequence[Fraction]):
    if inst.n == 1:
        return format_rational(vec[0])
    return [format_rational(v) for v in vec]


def _parse_payment(inst: Instance, raw: Any) -> tuple[Fraction, ...]:
    if inst.n == 1 and not isinstance(raw, list):
        return (parse_rational(raw),)
    if not isinstance(raw, list) or len(raw) != inst.n:
        raise InputError(f"payment entries must list one rational per agent, got {raw!r}")
    return tuple(parse_rational(v) for v in raw)


def _parse_bid_profile(bids: Sequence[Sequence[str]], key: str) -> BidProfile:
    parts = key.split(",") if len(bids) > 1 else [key]
    if len(parts) != len(bids):
        raise UnknownLabel(f"bid profile key {key!r} does not name {len(bids)} bids")
    out = []
    for i, label in enumerate(parts):
        label = label.strip()
        if label not in bids[i]:
            raise UnknownLabel(f"unknown bid {label!r} for agent {i}")
        out.append(bids[i].index(label))
    return tuple(out)


def parse_mechanism(inst: Instance, raw: Mapping[str, Any]) -> Mechanism:
    """Read the mechanism file format; a file holding only ``payments``
    describes the direct mechanism Gamma_(f,P)."""
    if not isinstance(raw, Mapping) or "payments" not in raw:
        raise MissingEntry("mechanism must contain 'payments'")
    if "bids" in raw:
        bids = raw["bids"]
        if not isinstance(bids, list) or not all(isinstance(b, list) for b in bids):
            raise InputError("'bids' must be a list of per-agent label lists")
        bids = tuple(tuple(str(s) for s in b) for b in bids)
        if "outcome" not in raw:
            raise MissingEntry("mechanism with explicit bids needs 'outcome'")
    else:
        bids = inst.types
    outcome: dict[BidProfile, int] = {}
    if "outcome" in raw:
        for key, label in raw["outcome"].items():
            if label not in inst.outcomes:
                raise UnknownLabel(f"unknown outcome {label!r}")
            outcome[_parse_bid_profile(bids, key)] = inst.outcomes.index(label)
    else:
        outcome = dict(inst.scf)
    payments = {
        _parse_bid_profile(bids, key): _parse_payment(inst, val)
        for key, val in raw["payments"].items()
    }
    return make_mechanism(inst, bids, outcome, payments)


def mechanism_to_dict(inst: Instance, mech: Mechanism) -> dict[str, Any]:
    return {
        "bids": [list(b) for b in mech.bids],
        "outcome": {mech.bid_key(s): inst.outcomes[mech.outcome[s]] for s in mech.bid_profiles},
        "payments": {mech.bid_key(s): _payment_json(inst, mech.payments[s]) for s in mech.bid_profiles},
    }


def payments_to_dict(inst: Instance, payments: Mapping[Profile, Sequence[Fraction]]) -> dict[str, Any]:
    return {inst.profile_key(th): _payment_json(inst, payments[th]) for th in inst.profiles}


def load_mechanism(inst: Instance, path: str | Path) -> Mechanism:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return parse_mechanism(inst, raw)
