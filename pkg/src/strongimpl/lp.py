"""Exact feasibility of mixed strict / non-strict rational linear systems.

A system ``a_k . z (<= | <) b_k`` over free variables ``z`` is decided with a
single homogenized LP::

    maximize    eps
    subject to  a_k . z - b_k t + [k strict] eps <= 0
                eps - t <= 0
                eps <= 1,        t, eps >= 0

The origin is feasible, so no phase one is needed. ``eps* > 0`` yields the
strictly feasible point ``z / t``; ``eps* = 0`` means the system is
infeasible and the optimal dual restricted to the original rows is a
Motzkin-type refutation: ``y >= 0``, ``y^T A = 0`` and either ``y^T b < 0``
or ``y^T b = 0`` with weight on a strict row.

The simplex runs on sparse rows over exact rationals (``gmpy2.mpq`` when
installed, ``fractions.Fraction`` otherwise) with Bland's rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionMismatch, StrongImplError
from .instance import format_rational

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _num

    def _to_fraction(v) -> Fraction:
        return Fraction(int(v.numerator), int(v.denominator))

except ImportError:  # pragma: no cover
    _num = Fraction

    def _to_fraction(v) -> Fraction:
        return v


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coefficients[j] * z[j]) <= bound`` (``<`` when strict)."""

    coefficients: Mapping[int, Fraction]
    bound: Fraction
    strict: bool = False

    def lhs(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * point[j] for j, c in self.coefficients.items()), Fraction(0))


def constraint(coefficients: Mapping[int, Fraction], bound, strict: bool = False) -> LinearConstraint:
    coeffs = {j: Fraction(c) for j, c in sorted(coefficients.items()) if c}
    return LinearConstraint(coeffs, Fraction(bound), strict)


@dataclass(frozen=True)
class LinearSystem:
    variable_count: int
    constraints: tuple[LinearConstraint, ...]
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        for row in self.constraints:
            for j in row.coefficients:
                if not 0 <= j < self.variable_count:
                    raise DimensionMismatch(f"variable id {j} outside 0..{self.variable_count - 1}")

    @property
    def strict_rows(self) -> list[int]:
        return [k for k, row in enumerate(self.constraints) if row.strict]


@dataclass(frozen=True)
class StrictlyFeasible:
    point: tuple[Fraction, ...]
    min_strict_slack: Fraction


@dataclass(frozen=True)
class Infeasible:
    multipliers: tuple[Fraction, ...]


FeasibilityOutcome = StrictlyFeasible | Infeasible


class SolverFailure(StrongImplError):
    """The kernel produced an answer that failed its own exact re-check."""


def _simplex_max(rows, rhs, objective, n_cols):
    """Maximize ``objective . x`` over ``rows x <= rhs``, ``x >= 0``, ``rhs >= 0``.

    ``rows`` are sparse dicts over structural columns ``0..n_cols-1``; slack
    of row ``r`` is column ``n_cols + r``. Returns ``(value, x, duals)``, or
    ``None`` when unbounded.
    """
    m = len(rows)
    tab = []
    for r, row in enumerate(rows):
        d = {j: _num(v) for j, v in row.items() if v}
        d[n_cols + r] = _num(1)
        tab.append(d)
    b = [_num(v) for v in rhs]
    basis = [n_cols + r for r in range(m)]
    red = {j: _num(v) for j, v in objective.items() if v}
    value = _num(0)

    while True:
        entering = min((j for j, v in red.items() if v > 0), default=None)
        if entering is None:
            break
        leave = -1
        best = None
        for r in range(m):
            a = tab[r].get(entering)
            if a is None or a <= 0:
                continue
            ratio = b[r] / a
            if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                best, leave = ratio, r
        if leave < 0:
            return None
        prow = tab[leave]
        piv = prow[entering]
        if piv != 1:
            for j in prow:
                prow[j] /= piv
            b[leave] /= piv
        bl = b[leave]
        for r in range(m):
            if r == leave:
                continue
            row = tab[r]
            f = row.get(entering)
            if f is None:
                continue
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            b[r] -= f * bl
        f = red.get(entering)
        for j, v in prow.items():
            nv = red.get(j, 0) - f * v
            if nv:
                red[j] = nv
            else:
                red.pop(j, None)
        value += f * bl
        basis[leave] = entering

    x = [_num(0)] * n_cols
    for r, j in enumerate(basis):
        if j < n_cols:
            x[j] = b[r]
    duals = [-red.get(n_cols + r, 0) for r in range(m)]
    return value, x, duals


def _primitive(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Positive rescaling to coprime integers (canonical refutation form)."""
    nz = [v for v in vec if v]
    if not nz:
        return tuple(Fraction(0) for _ in vec)
    lcm = math.lcm(*(v.denominator for v in nz))
    ints = [v * lcm for v in vec]
    g = math.gcd(*(int(v) for v in ints if v))
    return tuple(Fraction(int(v) // g) for v in ints)


def min_strict_slack(system: LinearSystem, point: Sequence[Fraction]) -> Fraction:
    """Smallest ``bound - lhs`` over strict rows; 1 when there are none."""
    slacks = [row.bound - row.lhs(point) for row in system.constraints if row.strict]
    return min(slacks) if slacks else Fraction(1)


def solve_mixed_system(system: LinearSystem, verify: bool = True) -> FeasibilityOutcome:
    d = system.variable_count
    t_col, eps_col = 2 * d, 2 * d + 1
    rows = []
    for c in system.constraints:
        row = {}
        for j, a in c.coefficients.items():
            row[j] = a
            row[d + j] = -a
        if c.bound:
            row[t_col] = -c.bound
        if c.strict:
            row[eps_col] = 1
        rows.append(row)
    rows.append({t_col: -1, eps_col: 1})
    rows.append({eps_col: 1})
    rhs = [0] * (len(rows) - 1) + [1]

    result = _simplex_max(rows, rhs, {eps_col: 1}, 2 * d + 2)
    if result is None:  # pragma: no cover - eps is capped
        raise SolverFailure("homogenized LP reported unbounded")
    value, x, duals = result

    if value > 0:
        t = x[t_col]
        point = tuple(_to_fraction((x[j] - x[d + j]) / t) for j in range(d))
        outcome: FeasibilityOutcome = StrictlyFeasible(point, min_strict_slack(system, point))
        if verify and not (check_point(system, point) and outcome.min_strict_slack > 0):
            raise SolverFailure("returned point violates the system")
    else:
        mult = _primitive([_to_fraction(y) for y in duals[: len(system.constraints)]])
        outcome = Infeasible(mult)
        if verify and not validate_refutation(system, mult):
            raise SolverFailure("returned multipliers do not refute the system")
    return outcome


def is_strictly_feasible(system: LinearSystem) -> bool:
    return isinstance(solve_mixed_system(system, verify=False), StrictlyFeasible)


def check_point(system: LinearSystem, point: Sequence[Fraction]) -> bool:
    if len(point) != system.variable_count:
        raise DimensionMismatch(f"point has {len(point)} entries, system has {system.variable_count} variables")
    for row in system.constraints:
        lhs = row.lhs(point)
        if row.strict and not lhs < row.bound:
            return False
        if not row.strict and not lhs <= row.bound:
            return False
    return True


def validate_refutation(system: LinearSystem, multipliers: Sequence[Fraction]) -> bool:
    if len(multipliers) != len(system.constraints):
        raise DimensionMismatch(
            f"{len(multipliers)} multipliers for {len(system.constraints)} constraints"
        )
    if any(y < 0 for y in multipliers):
        return False
    combined: dict[int, Fraction] = {}
    rhs = Fraction(0)
    strict_weight = False
    for y, row in zip(multipliers, system.constraints):
        if not y:
            continue
        for j, a in row.coefficients.items():
            combined[j] = combined.get(j, Fraction(0)) + y * a
        rhs += y * row.bound
        strict_weight = strict_weight or row.strict
    if any(combined.values()):
        return False
    return rhs < 0 or (rhs == 0 and strict_weight)


def dump_system(system: LinearSystem) -> str:
    """Human readable ``coeff*var ... rel bound`` listing, one row per line."""
    names = system.names or tuple(f"z{j}" for j in range(system.variable_count))
    lines = []
    for row in system.constraints:
        terms = " ".join(
            f"{'+' if c > 0 else '-'} {format_rational(abs(c))}*{names[j]}"
            for j, c in row.coefficients.items()
        ) or "0"
        if terms.startswith("+ "):
            terms = terms[2:]
        rel = "<" if row.strict else "<="
        lines.append(f"{terms} {rel} {format_rational(row.bound)}")
    return "\n".join(lines)
