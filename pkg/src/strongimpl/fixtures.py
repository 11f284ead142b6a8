"""Canonical small instances, as raw JSON-shaped dicts.

A: each type values its own outcome.  B: both types prefer ``a``.
C: each type prefers the other type's outcome.  D: two agents, two types
each, uniform prior, valuations and social choice chosen by the caller.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any, Callable

from .instance import Instance, validate_instance


def _single(v_t1: tuple[int, int], v_t2: tuple[int, int]) -> dict[str, Any]:
    (a1, b1), (a2, b2) = v_t1, v_t2
    return {
        "agents": 1,
        "outcomes": ["a", "b"],
        "types": [["t1", "t2"]],
        "prior": {"t1": "1/2", "t2": "1/2"},
        "valuations": [{"a": {"t1": str(a1), "t2": str(a2)}, "b": {"t1": str(b1), "t2": str(b2)}}],
        "scf": {"t1": "a", "t2": "b"},
    }


def fixture_a() -> dict[str, Any]:
    return _single((1, 0), (0, 1))


def fixture_b() -> dict[str, Any]:
    return _single((1, 0), (1, 0))


def fixture_c() -> dict[str, Any]:
    return _single((0, 1), (1, 0))


D_TYPES = [["t1", "t2"], ["u1", "u2"]]
D_PROFILES = [f"{a},{b}" for a in D_TYPES[0] for b in D_TYPES[1]]


def fixture_d(
    valuation: Callable[[int, str, str], int | str],
    scf: Callable[[str], str],
    outcomes: tuple[str, ...] = ("a", "b"),
) -> dict[str, Any]:
    """``valuation(agent, outcome, profile_key)`` and ``scf(profile_key)``."""
    return {
        "agents": 2,
        "outcomes": list(outcomes),
        "types": [list(t) for t in D_TYPES],
        "prior": {k: "1/4" for k in D_PROFILES},
        "valuations": [
            {x: {k: str(valuation(i, x, k)) for k in D_PROFILES} for x in outcomes} for i in range(2)
        ],
        "scf": {k: scf(k) for k in D_PROFILES},
    }


def constant_scf(n_types: tuple[int, ...] = (2, 2), outcome: str = "a") -> dict[str, Any]:
    """Constant social choice function with arbitrary nonzero valuations."""
    import itertools

    types = [[f"t{i}{k}" for k in range(m)] for i, m in enumerate(n_types)]
    keys = [",".join(p) for p in itertools.product(*types)]
    outcomes = ["a", "b"]
    return {
        "agents": len(types),
        "outcomes": outcomes,
        "types": types,
        "prior": {k: f"1/{len(keys)}" for k in keys},
        "valuations": [
            {x: {k: str((i + 2 * j + 3 * xi) % 5 - 2) for j, k in enumerate(keys)} for xi, x in enumerate(outcomes)}
            for i in range(len(types))
        ],
        "scf": {k: outcome for k in keys},
    }


def load_bundled(name: str) -> Instance:
    """Load one of the JSON instances shipped in ``strongimpl/data``."""
    text = resources.files("strongimpl").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return validate_instance(json.loads(text))
