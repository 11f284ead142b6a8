"""Weak implementability: is there a payment scheme making truthful reporting
a Bayesian equilibrium of the direct mechanism?

The exact LP on the incentive constraints is authoritative. The classical
negative-cycle test on per-agent type graphs is offered as a fast cross-check,
valid only for product priors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._forms import comparison_row, payment_var, payment_variable_names
from .instance import Beliefs, Instance, Profile, conditional_beliefs
from .lp import Infeasible, LinearSystem, solve_mixed_system
from .mechanism import truthful_profile

AGREE = "agree"
DISAGREE = "disagree"
SKIPPED = "skipped"


def _ic_rows(inst: Instance, beliefs: Beliefs, i: int):
    truth = truthful_profile(inst)
    rows = []
    for own in range(len(inst.types[i])):
        for other in range(len(inst.types[i])):
            if other != own:
                rows.append(comparison_row(inst, beliefs, truth, i, own, own, other, False))
    return rows


def build_ic_system(inst: Instance, beliefs: Beliefs | None = None) -> LinearSystem:
    """One non-strict row per (agent, true type, misreport)."""
    beliefs = beliefs or conditional_beliefs(inst)
    rows = [r for i in range(inst.n) for r in _ic_rows(inst, beliefs, i)]
    return LinearSystem(inst.n * len(inst.profiles), tuple(rows), payment_variable_names(inst))


@dataclass(frozen=True)
class WeakVerdict:
    implementable: bool
    payments: dict[Profile, tuple[Fraction, ...]] | None
    refutation: tuple[Fraction, ...] | None
    system: LinearSystem
    cross_check: str = SKIPPED


def decide_weak(inst: Instance, beliefs: Beliefs | None = None, cross_check: bool = True) -> WeakVerdict:
    beliefs = beliefs or conditional_beliefs(inst)
    system = build_ic_system(inst, beliefs)
    nvars = system.variable_count
    values = [Fraction(0)] * nvars
    refutation = None
    offset = 0
    # rows only touch their own agent's payments, so agents are solved separately
    for i in range(inst.n):
        rows = _ic_rows(inst, beliefs, i)
        outcome = solve_mixed_system(LinearSystem(nvars, tuple(rows)))
        if isinstance(outcome, Infeasible):
            mult = [Fraction(0)] * len(system.constraints)
            mult[offset : offset + len(rows)] = outcome.multipliers
            refutation = tuple(mult)
            break
        for th in inst.profiles:
            col = payment_var(inst, i, th)
            values[col] = outcome.point[col]
        offset += len(rows)

    payments = None
    if refutation is None:
        payments = {
            th: tuple(values[payment_var(inst, i, th)] for i in range(inst.n))
            for th in inst.profiles
        }
    check = SKIPPED
    if cross_check and inst.is_product_prior():
        cycles = any(has_negative_cycle(type_graph(inst, beliefs, i)) for i in range(inst.n))
        check = AGREE if cycles == (refutation is not None) else DISAGREE
    return WeakVerdict(refutation is None, payments, refutation, system, check)


def type_graph(inst: Instance, beliefs: Beliefs, i: int) -> dict[tuple[int, int], Fraction]:
    """Complete digraph on agent ``i``'s types; the edge ``t -> u`` weighs the
    expected valuation lost by type ``t`` when reporting ``u``."""
    graph = {}
    for own in range(len(inst.types[i])):
        for other in range(len(inst.types[i])):
            if other == own:
                continue
            w = Fraction(0)
            for co in inst.co_profiles(i):
                q = beliefs(i, own, co)
                theta = inst.join(i, co, own)
                lie = inst.join(i, co, other)
                w += q * (inst.value(i, inst.scf[theta], theta) - inst.value(i, inst.scf[lie], theta))
            graph[(own, other)] = w
    return graph


def has_negative_cycle(graph: dict[tuple[int, int], Fraction]) -> bool:
    """Bellman-Ford from a virtual source joined to every node by 0-edges."""
    nodes = sorted({v for edge in graph for v in edge})
    if not nodes:
        return False
    dist = {v: Fraction(0) for v in nodes}
    for _ in range(len(nodes)):
        changed = False
        for (u, v), w in graph.items():
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            return False
    return True
