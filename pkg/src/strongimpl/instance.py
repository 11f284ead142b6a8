"""Problem instances: agents, types, outcomes, prior, valuations and the
social choice function, plus the beliefs derived from the prior.

All quantities are :class:`fractions.Fraction`. Labels are strings; internally
a type profile is a tuple of per-agent type indices in declaration order.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

from .errors import (
    InputError,
    MissingEntry,
    NegativePrior,
    PriorNotNormalized,
    UnknownLabel,
    ZeroMarginal,
)

Profile = tuple[int, ...]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value: Any) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a canonical Fraction.

    Floats are rejected: nothing in this package is allowed to round.
    """
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"rationals must be strings like '3/4', got {value!r}")
    m = _RATIONAL_RE.match(value)
    if m is None:
        raise InputError(f"not a rational: {value!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den <= 0:
        raise InputError(f"denominator must be positive: {value!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def bit_length(value: Fraction) -> int:
    """Encoding size of a rational: bits of |numerator| plus bits of denominator."""
    value = Fraction(value)
    return abs(value.numerator).bit_length() + value.denominator.bit_length()


@dataclass(frozen=True)
class Instance:
    outcomes: tuple[str, ...]
    types: tuple[tuple[str, ...], ...]
    prior: Mapping[Profile, Fraction]
    # valuations[i][(x, theta)] = V_i(x, theta)
    valuations: tuple[Mapping[tuple[int, Profile], Fraction], ...]
    scf: Mapping[Profile, int]
    prior_given: bool = field(default=True, compare=False)

    @property
    def n(self) -> int:
        return len(self.types)

    @cached_property
    def profiles(self) -> tuple[Profile, ...]:
        return tuple(itertools.product(*(range(len(t)) for t in self.types)))

    @cached_property
    def profile_index(self) -> dict[Profile, int]:
        return {theta: k for k, theta in enumerate(self.profiles)}

    def co_profiles(self, i: int) -> tuple[tuple[int, ...], ...]:
        """Type profiles of all agents except ``i``, lexicographic."""
        return tuple(
            itertools.product(*(range(len(t)) for j, t in enumerate(self.types) if j != i))
        )

    @staticmethod
    def join(i: int, co: tuple, own) -> tuple:
        return co[:i] + (own,) + co[i:]

    def value(self, i: int, x: int, theta: Profile) -> Fraction:
        return self.valuations[i][(x, theta)]

    def profile_key(self, theta: Profile) -> str:
        return ",".join(self.types[i][t] for i, t in enumerate(theta))

    def co_profile_key(self, i: int, co: tuple[int, ...]) -> str:
        others = [j for j in range(self.n) if j != i]
        return ",".join(self.types[j][t] for j, t in zip(others, co))

    def parse_profile(self, key: str) -> Profile:
        parts = key.split(",") if self.n > 1 else [key]
        if len(parts) != self.n:
            raise UnknownLabel(f"profile key {key!r} does not name {self.n} types")
        out = []
        for i, label in enumerate(parts):
            label = label.strip()
            if label not in self.types[i]:
                raise UnknownLabel(f"unknown type {label!r} for agent {i}")
            out.append(self.types[i].index(label))
        return tuple(out)

    def is_product_prior(self) -> bool:
        margs = [[marginal(self, i, t) for t in range(len(ts))] for i, ts in enumerate(self.types)]
        for theta in self.profiles:
            prod = Fraction(1)
            for i, t in enumerate(theta):
                prod *= margs[i][t]
            if prod != self.prior[theta]:
                return False
        return True


@dataclass(frozen=True)
class Beliefs:
    # q[i][theta_i][co_profile] = q_i(co_profile | theta_i)
    q: tuple[tuple[Mapping[tuple[int, ...], Fraction], ...], ...]

    def __call__(self, i: int, own: int, co: tuple[int, ...]) -> Fraction:
        return self.q[i][own][co]


def marginal(inst: Instance, i: int, own: int) -> Fraction:
    return sum(
        (inst.prior[inst.join(i, co, own)] for co in inst.co_profiles(i)), Fraction(0)
    )


def conditional_beliefs(inst: Instance) -> Beliefs:
    q = []
    for i in range(inst.n):
        rows = []
        for own in range(len(inst.types[i])):
            m = marginal(inst, i, own)
            rows.append({co: inst.prior[inst.join(i, co, own)] / m for co in inst.co_profiles(i)})
        q.append(tuple(rows))
    return Beliefs(tuple(q))


def _labels(raw: Any, what: str) -> tuple[str, ...]:
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{what} must be a non-empty list of labels")
    if not all(isinstance(s, str) for s in raw):
        raise InputError(f"{what} labels must be strings")
    if len(set(raw)) != len(raw):
        raise InputError(f"{what} labels must be distinct")
    return tuple(raw)


def _total_profile_map(inst: Instance, raw: Any, what: str) -> dict[Profile, Any]:
    if not isinstance(raw, Mapping):
        raise InputError(f"{what} must be an object keyed by type profiles")
    out: dict[Profile, Any] = {}
    for key, val in raw.items():
        theta = inst.parse_profile(key)
        if theta in out:
            raise InputError(f"{what}: duplicate entry for profile {key!r}")
        out[theta] = val
    for theta in inst.profiles:
        if theta not in out:
            raise MissingEntry(f"{what}: no entry for profile {inst.profile_key(theta)!r}")
    return out


def validate_instance(raw: Mapping[str, Any] | Instance) -> Instance:
    """Check a parsed instance description and return a canonical Instance."""
    if isinstance(raw, Instance):
        raw = instance_to_dict(raw)
    if not isinstance(raw, Mapping):
        raise InputError("instance must be a JSON object")
    for key in ("outcomes", "types", "valuations", "scf"):
        if key not in raw:
            raise MissingEntry(f"missing field {key!r}")
    outcomes = _labels(raw["outcomes"], "outcomes")
    if not isinstance(raw["types"], list) or not raw["types"]:
        raise InputError("types must be a non-empty list of per-agent label lists")
    types = tuple(_labels(t, f"types of agent {i}") for i, t in enumerate(raw["types"]))
    n = len(types)
    agents = raw.get("agents", n)
    if isinstance(agents, bool) or not isinstance(agents, int) or agents != n:
        raise InputError(f"agents={agents!r} does not match {n} type lists")

    # skeleton used only for label parsing and profile enumeration
    shell = Instance(outcomes, types, {}, tuple({} for _ in range(n)), {})

    prior_given = raw.get("prior") is not None
    if prior_given:
        prior = {
            theta: parse_rational(v)
            for theta, v in _total_profile_map(shell, raw["prior"], "prior").items()
        }
    elif n == 1:
        prior = {theta: Fraction(1, len(shell.profiles)) for theta in shell.profiles}
    else:
        raise MissingEntry("missing field 'prior' (only optional for a single agent)")
    for theta, v in prior.items():
        if v < 0:
            raise NegativePrior(f"prior of {shell.profile_key(theta)!r} is negative")
    total = sum(prior.values(), Fraction(0))
    if total != 1:
        raise PriorNotNormalized(f"prior sums to {format_rational(total)}, not 1")

    raw_vals = raw["valuations"]
    if not isinstance(raw_vals, list) or len(raw_vals) != n:
        raise InputError(f"valuations must be a list with one entry per agent ({n})")
    valuations = []
    for i, table in enumerate(raw_vals):
        if not isinstance(table, Mapping):
            raise InputError(f"valuations of agent {i} must be an object keyed by outcome")
        vi: dict[tuple[int, Profile], Fraction] = {}
        for label in table:
            if label not in outcomes:
                raise UnknownLabel(f"valuations of agent {i}: unknown outcome {label!r}")
        for x, label in enumerate(outcomes):
            if label not in table:
                raise MissingEntry(f"valuations of agent {i}: no entry for outcome {label!r}")
            per = _total_profile_map(shell, table[label], f"valuations[{i}][{label}]")
            for theta, v in per.items():
                vi[(x, theta)] = parse_rational(v)
        valuations.append(vi)

    scf = {}
    for theta, label in _total_profile_map(shell, raw["scf"], "scf").items():
        if label not in outcomes:
            raise UnknownLabel(f"scf maps {shell.profile_key(theta)!r} to unknown outcome {label!r}")
        scf[theta] = outcomes.index(label)

    inst = Instance(outcomes, types, prior, tuple(valuations), scf, prior_given)
    for i in range(n):
        for own, label in enumerate(types[i]):
            if marginal(inst, i, own) == 0:
                raise ZeroMarginal(f"marginal probability of type {label!r} of agent {i} is zero")
    return inst


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    out: dict[str, Any] = {
        "agents": inst.n,
        "outcomes": list(inst.outcomes),
        "types": [list(t) for t in inst.types],
    }
    if inst.prior_given:
        out["prior"] = {inst.profile_key(th): format_rational(inst.prior[th]) for th in inst.profiles}
    out["valuations"] = [
        {
            label: {
                inst.profile_key(th): format_rational(inst.valuations[i][(x, th)])
                for th in inst.profiles
            }
            for x, label in enumerate(inst.outcomes)
        }
        for i in range(inst.n)
    ]
    out["scf"] = {inst.profile_key(th): inst.outcomes[inst.scf[th]] for th in inst.profiles}
    return out


def load_instance(path: str | Path) -> Instance:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return validate_instance(raw)
