"""General strong implementability by exhaustive search.

``f`` is strongly implementable iff some incentive compatible direct mechanism
Gamma_(f,P) lets every bad equilibrium be selectively eliminated. Fixing

* a labeling of every strategy profile as equilibrium or as non-equilibrium
  with a profitable deviation ``(agent, true type, report)``, and
* for every bad equilibrium an elimination plan ``(agent, threatened type,
  flag outcome map h)``

turns the question into one strict/non-strict linear system in the payments
``P_i(theta)`` and the flag payments. The search walks labelings depth first
in lexicographic profile order, prunes every prefix whose system is already
infeasible, and tries plans at the leaves. The first feasible leaf is the
certificate; exhausting the tree proves the answer is no.

Non-equilibrium branches are made disjoint: the k-th deviation is used as
witness only when deviations ``0..k-1`` are not profitable. Every payment
vector therefore lands in exactly one branch and the witness is the
lexicographically first violation.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from ._forms import Form, comparison_row, difference, payment_var, payment_variable_names, utility_form
from .errors import IncompleteLabeling, InputError, MissingPlanEntry, ResourceExceeded
from .instance import Beliefs, Instance, Profile, conditional_beliefs, format_rational, parse_rational
from .lp import LinearConstraint, LinearSystem, StrictlyFeasible, check_point, min_strict_slack, solve_mixed_system
from .mechanism import (
    StrategyProfile,
    co_bids,
    direct_mechanism,
    enumerate_equilibria,
    expected_utility,
    parse_strategy,
    payments_to_dict,
    realizes,
    strategy_key,
    truthful_profile,
)

Witness = tuple[int, int, int]  # (agent, true type, profitable report)
CoProfile = tuple[int, ...]


@dataclass(frozen=True)
class PlanEntry:
    agent: int
    threatened: int
    flag_outcome: Mapping[CoProfile, int]


@dataclass(frozen=True)
class StrongCertificate:
    payments: Mapping[Profile, tuple[Fraction, ...]]
    # every profile in enumeration order; None marks an equilibrium
    labeling: Mapping[StrategyProfile, Witness | None]
    plan: Mapping[StrategyProfile, PlanEntry]
    elimination_payments: Mapping[StrategyProfile, Mapping[CoProfile, Fraction]]
    strict_slack: Fraction


@dataclass(frozen=True)
class Limits:
    profiles: int = 10**6
    branches: int = 10**7
    seconds: float = 600.0

    @classmethod
    def parse(cls, text: str) -> "Limits":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InputError("--limits expects <profiles,branches,seconds>")
        try:
            return cls(int(parts[0]), int(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise InputError(f"bad --limits value {text!r}") from exc


@dataclass
class Statistics:
    profiles: int = 0
    branches: int = 0
    lp_calls: int = 0
    refuted_syntactic: int = 0
    refuted_lp: int = 0
    leaves: int = 0
    plan_branches: int = 0
    plan_refuted: int = 0

    def add(self, other: "Statistics") -> None:
        for name in self.__dataclass_fields__:
            if name != "profiles":
                setattr(self, name, getattr(self, name) + getattr(other, name))

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


@dataclass(frozen=True)
class StrongResult:
    implementable: bool
    certificate: StrongCertificate | None
    statistics: Statistics = field(compare=False)


def all_profiles(inst: Instance) -> list[StrategyProfile]:
    per_agent = [list(itertools.product(range(len(t)), repeat=len(t))) for t in inst.types]
    return list(itertools.product(*per_agent))


def deviations(inst: Instance, alpha: StrategyProfile) -> list[Witness]:
    return [
        (i, own, other)
        for i in range(inst.n)
        for own in range(len(inst.types[i]))
        for other in range(len(inst.types[i]))
        if other != alpha[i][own]
    ]


def plan_entries(inst: Instance) -> list[PlanEntry]:
    """Candidate elimination data in deterministic order."""
    out = []
    for i in range(inst.n):
        cos = inst.co_profiles(i)
        for threatened in range(len(inst.types[i])):
            for h in itertools.product(range(len(inst.outcomes)), repeat=len(cos)):
                out.append(PlanEntry(i, threatened, dict(zip(cos, h))))
    return out


def _flag_form(
    inst: Instance, beliefs: Beliefs, i: int, own: int, entry: PlanEntry, first_var: int, alpha: StrategyProfile
) -> Form:
    """Expected utility of agent ``i`` (type ``own``) bidding the flag while the
    others play ``alpha``."""
    cos = inst.co_profiles(i)
    coeffs: dict[int, Fraction] = {}
    const = Fraction(0)
    for co in cos:
        q = beliefs(i, own, co)
        if not q:
            continue
        cb = co_bids(alpha, i, co)
        const += q * inst.value(i, entry.flag_outcome[cb], inst.join(i, co, own))
        col = first_var + cos.index(cb)
        coeffs[col] = coeffs.get(col, Fraction(0)) + q
    return coeffs, const


def elimination_rows(
    inst: Instance, beliefs: Beliefs, alpha: StrategyProfile, entry: PlanEntry, first_var: int
) -> list[LinearConstraint]:
    """The strict flag-gain row under ``alpha`` and one no-gain row per type
    under truthful play; flag payments occupy ``first_var`` onwards."""
    i, bar = entry.agent, entry.threatened
    truth = truthful_profile(inst)
    rows = [
        difference(
            utility_form(inst, beliefs, alpha, i, bar, alpha[i][bar]),
            _flag_form(inst, beliefs, i, bar, entry, first_var, alpha),
            strict=True,
        )
    ]
    for own in range(len(inst.types[i])):
        rows.append(
            difference(
                _flag_form(inst, beliefs, i, own, entry, first_var, truth),
                utility_form(inst, beliefs, truth, i, own, own),
                strict=False,
            )
        )
    return rows


def _vertices(matrix: list[list[Fraction]], target: list[Fraction]) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{lam >= 0 : sum_r lam_r * matrix[r] = target}`` by
    enumerating supports with linearly independent rows."""
    m, k = len(matrix), len(target)
    found: list[tuple[Fraction, ...]] = []
    for size in range(1, min(m, k) + 1):
        for support in itertools.combinations(range(m), size):
            # k equations in the |support| unknowns, augmented with the target
            aug = [[matrix[r][c] for r in support] + [target[c]] for c in range(k)]
            rank, pivots = 0, []
            for col in range(size):
                piv = next((r for r in range(rank, k) if aug[r][col]), None)
                if piv is None:
                    break
                aug[rank], aug[piv] = aug[piv], aug[rank]
                lead = aug[rank][col]
                aug[rank] = [v / lead for v in aug[rank]]
                for r in range(k):
                    if r != rank and aug[r][col]:
                        f = aug[r][col]
                        aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
                pivots.append(col)
                rank += 1
            if rank < size or any(aug[r][size] for r in range(rank, k)):
                continue
            sol = [aug[r][size] for r in range(size)]
            if any(v <= 0 for v in sol):
                continue
            lam = [Fraction(0)] * m
            for r, v in zip(support, sol):
                lam[r] = v
            if tuple(lam) not in found:
                found.append(tuple(lam))
    return found


def elimination_candidates(inst: Instance, beliefs: Beliefs, alpha: StrategyProfile) -> list[PlanEntry]:
    """Plan entries for ``alpha`` that are not dominated by another entry.

    For fixed agent and threatened type the flag payments can be projected
    out by duality: entry ``h`` is usable at payments ``P`` iff
    ``lam.T(P) - U(P) > lam.c(h) - d(h)`` at every vertex ``lam`` of
    ``{lam >= 0 : sum_own lam_own q(.|own) = w}``, where ``w`` pushes the
    threatened type's beliefs through the others' strategies, ``T`` are the
    truthful utilities, ``U`` the utility under ``alpha``, ``c_own(h)`` the
    flag's truthful value and ``d(h)`` its value under ``alpha``. An ``h``
    whose constants are componentwise no smaller than another's is dropped.
    When the vertex set is empty the threat works for every ``P`` and the
    first such entry is returned alone.
    """
    out: list[PlanEntry] = []
    n_x = len(inst.outcomes)
    for i in range(inst.n):
        cos = inst.co_profiles(i)
        n_own = len(inst.types[i])
        matrix = [[beliefs(i, own, co) for co in cos] for own in range(n_own)]
        for bar in range(n_own):
            w = {co: Fraction(0) for co in cos}
            for co in cos:
                q = beliefs(i, bar, co)
                if q:
                    w[co_bids(alpha, i, co)] += q
            lams = _vertices(matrix, [w[co] for co in cos])
            hs = list(itertools.product(range(n_x), repeat=len(cos)))
            if not lams:
                return [PlanEntry(i, bar, dict(zip(cos, hs[0])))]
            kappas = []
            for h in hs:
                hm = dict(zip(cos, h))
                c = [
                    sum((matrix[own][j] * inst.value(i, hm[co], inst.join(i, co, own)) for j, co in enumerate(cos)), Fraction(0))
                    for own in range(n_own)
                ]
                d = sum(
                    (beliefs(i, bar, co) * inst.value(i, hm[co_bids(alpha, i, co)], inst.join(i, co, bar)) for co in cos),
                    Fraction(0),
                )
                kappas.append(tuple(sum((l * cv for l, cv in zip(lam, c)), Fraction(0)) - d for lam in lams))
            for a, (h, ka) in enumerate(zip(hs, kappas)):
                dominated = any(
                    all(x <= y for x, y in zip(kb, ka)) and (kb != ka or b < a)
                    for b, kb in enumerate(kappas)
                    if b != a
                )
                if not dominated:
                    out.append(PlanEntry(i, bar, dict(zip(cos, h))))
    return out


def bad_equilibria(inst: Instance, labeling: Mapping[StrategyProfile, Witness | None]) -> list[StrategyProfile]:
    """Profiles labeled equilibrium whose outcomes differ from f, in profile order."""
    mech = direct_mechanism(inst, {th: (Fraction(0),) * inst.n for th in inst.profiles})
    return [
        a for a in all_profiles(inst)
        if a in labeling and labeling[a] is None and not realizes(inst, mech, a)
    ]


def build_system(
    inst: Instance,
    beliefs: Beliefs,
    labeling: Mapping[StrategyProfile, Witness | None],
    plan: Mapping[StrategyProfile, PlanEntry],
) -> LinearSystem:
    """Rows: a strict deviation-gain row per non-equilibrium, all no-gain rows
    per equilibrium, and the strict + non-strict elimination rows per bad
    equilibrium. Flag payments follow the n*|Theta| payment variables, one
    block per bad equilibrium in profile order."""
    profiles = all_profiles(inst)
    missing = [a for a in profiles if a not in labeling]
    if missing:
        raise IncompleteLabeling(f"{len(missing)} strategy profiles are unlabeled")
    rows: list[LinearConstraint] = []
    names = list(payment_variable_names(inst))
    for alpha in profiles:
        w = labeling[alpha]
        if w is None:
            for i, own, other in deviations(inst, alpha):
                rows.append(comparison_row(inst, beliefs, alpha, i, own, alpha[i][own], other, False))
        else:
            i, own, other = w
            if other == alpha[i][own]:
                raise InputError("a witness must deviate from the profile's own report")
            rows.append(comparison_row(inst, beliefs, alpha, i, own, other, alpha[i][own], True))
    nvars = len(names)
    for alpha in bad_equilibria(inst, labeling):
        if alpha not in plan:
            raise MissingPlanEntry(f"bad equilibrium {alpha} has no elimination plan")
        entry = plan[alpha]
        rows.extend(elimination_rows(inst, beliefs, alpha, entry, nvars))
        cos = inst.co_profiles(entry.agent)
        names.extend(f"Pbar{entry.agent}[{inst.co_profile_key(entry.agent, co)}]@{alpha}" for co in cos)
        nvars += len(cos)
    return LinearSystem(nvars, tuple(rows), tuple(names))




class _Search:
    """Depth-first labeling search with incremental strict-feasibility pruning.

    Comparison rows carry the combinatorial key ``(i, own, others, hi, lo,
    strict)``. A row whose complement is already committed refutes a branch
    without an LP call, and a branch that adds only known rows needs none.
    """

    # tests switch this off to compare against the unreduced entry list
    reduce_candidates = True

    def __init__(self, inst: Instance, beliefs: Beliefs, limits: Limits, deadline: float, precheck: bool = True):
        self.inst = inst
        self.beliefs = beliefs
        self.limits = limits
        self.deadline = deadline
        self.precheck = precheck
        self.stats = Statistics()
        self.base = inst.n * len(inst.profiles)
        self.truth = truthful_profile(inst)
        self.profiles = all_profiles(inst)
        self.stats.profiles = len(self.profiles)
        self.order = [a for a in self.profiles if a != self.truth]
        self._candidates: dict[StrategyProfile, list[PlanEntry]] = {}
        self.mech = direct_mechanism(inst, {th: (Fraction(0),) * inst.n for th in inst.profiles})
        self._row_cache: dict[tuple, LinearConstraint] = {}
        self.rows: list[LinearConstraint] = []
        self.keys: set[tuple] = set()
        self.trail: list[tuple[StrategyProfile, list[tuple], int]] = []
        self.labels: dict[StrategyProfile, int] = {}
        self.bad: list[StrategyProfile] = []

    def _key(self, alpha, i, own, hi, lo, strict):
        others = tuple(alpha[j] for j in range(self.inst.n) if j != i)
        return (i, own, others, hi, lo, strict)

    def _row(self, key, alpha) -> LinearConstraint:
        row = self._row_cache.get(key)
        if row is None:
            i, own, _, hi, lo, strict = key
            row = comparison_row(self.inst, self.beliefs, alpha, i, own, hi, lo, strict)
            self._row_cache[key] = row
        return row

    def option_keys(self, alpha: StrategyProfile, k: int) -> list[tuple]:
        """Option 0 labels ``alpha`` an equilibrium; option ``k >= 1`` makes
        deviation ``k-1`` the first profitable one."""
        devs = deviations(self.inst, alpha)
        if k == 0:
            return [self._key(alpha, i, own, alpha[i][own], o, False) for i, own, o in devs]
        keys = [self._key(alpha, i, own, alpha[i][own], o, False) for i, own, o in devs[: k - 1]]
        i, own, o = devs[k - 1]
        keys.append(self._key(alpha, i, own, o, alpha[i][own], True))
        return keys

    def n_options(self, alpha: StrategyProfile) -> int:
        return 1 + len(deviations(self.inst, alpha))

    def _tick(self) -> None:
        self.stats.branches += 1
        if self.stats.branches > self.limits.branches:
            raise ResourceExceeded("branch limit exceeded", self.stats.as_dict())
        if time.monotonic() > self.deadline:
            raise ResourceExceeded("time limit exceeded", self.stats.as_dict())

    def _feasible(self, rows, nvars) -> StrictlyFeasible | None:
        self.stats.lp_calls += 1
        out = solve_mixed_system(LinearSystem(nvars, tuple(rows)), verify=False)
        return out if isinstance(out, StrictlyFeasible) else None

    def candidates(self, alpha: StrategyProfile) -> list[PlanEntry]:
        found = self._candidates.get(alpha)
        if found is None:
            found = (
                elimination_candidates(self.inst, self.beliefs, alpha)
                if self.reduce_candidates
                else plan_entries(self.inst)
            )
            self._candidates[alpha] = found
        return found

    def _usable(self, alpha, rows) -> list[PlanEntry]:
        """Candidates for ``alpha`` compatible with ``rows`` on their own."""
        out = []
        for entry in self.candidates(alpha):
            extra = elimination_rows(self.inst, self.beliefs, alpha, entry, self.base)
            width = len(self.inst.co_profiles(entry.agent))
            if self._feasible(rows + extra, self.base + width) is not None:
                out.append(entry)
        return out

    def _eliminable(self, alpha, rows) -> bool:
        """Some plan entry for ``alpha`` is compatible with ``rows``."""
        for entry in self.candidates(alpha):
            extra = elimination_rows(self.inst, self.beliefs, alpha, entry, self.base)
            width = len(self.inst.co_profiles(entry.agent))
            if self._feasible(rows + extra, self.base + width) is not None:
                return True
        return False

    def commit(self, alpha: StrategyProfile, k: int, check: bool = True) -> bool:
        """Apply option ``k`` to ``alpha``; a refuted option leaves no trace."""
        new = []
        for key in self.option_keys(alpha, k):
            if key in self.keys or key in new:
                continue
            i, own, others, hi, lo, strict = key
            if (i, own, others, lo, hi, not strict) in self.keys:
                self.stats.refuted_syntactic += 1
                return False
            new.append(key)
        added = [self._row(key, alpha) for key in new]
        is_bad = k == 0 and not realizes(self.inst, self.mech, alpha)
        if check:
            rows = self.rows + added
            if added and self._feasible(rows, self.base) is None:
                self.stats.refuted_lp += 1
                return False
            if is_bad and self.precheck and not self._eliminable(alpha, rows):
                self.stats.refuted_lp += 1
                return False
        self.rows.extend(added)
        self.keys.update(new)
        self.trail.append((alpha, new, len(self.bad)))
        self.labels[alpha] = k
        if is_bad:
            self.bad.append(alpha)
        return True

    def undo(self) -> None:
        alpha, new, n_bad = self.trail.pop()
        if new:
            del self.rows[-len(new):]
            self.keys.difference_update(new)
        del self.labels[alpha]
        del self.bad[n_bad:]

    def start(self) -> bool:
        """Commit the truthful profile as an equilibrium (incentive compatibility)."""
        self._tick()
        return self.commit(self.truth, 0)

    def replay(self, prefix: list[int]) -> None:
        for alpha, k in zip(self.order, prefix):
            if not self.commit(alpha, k, check=False):  # pragma: no cover
                raise RuntimeError("frontier prefix no longer applies")

    def _plan(self, depth: int, order: list, rows: list, nvars: int, chosen: list):
        if depth == len(order):
            point = self._feasible(rows, nvars)
            return (chosen, point) if point is not None else None
        alpha, usable = order[depth]
        for entry in usable:
            self._tick()
            self.stats.plan_branches += 1
            width = len(self.inst.co_profiles(entry.agent))
            trial = rows + elimination_rows(self.inst, self.beliefs, alpha, entry, nvars)
            if depth + 1 < len(order) and self._feasible(trial, nvars + width) is None:
                self.stats.plan_refuted += 1
                continue
            found = self._plan(depth + 1, order, trial, nvars + width, chosen + [(alpha, entry, nvars)])
            if found is not None:
                return found
            if depth + 1 == len(order):
                self.stats.plan_refuted += 1
        return None

    def leaf(self) -> StrongCertificate | None:
        """Pick one plan entry per bad equilibrium, most constrained first."""
        self.stats.leaves += 1
        order = []
        for rank, alpha in enumerate(self.bad):
            usable = self._usable(alpha, self.rows)
            if not usable:
                self.stats.plan_refuted += 1
                return None
            order.append((len(usable), rank, alpha, usable))
        order.sort(key=lambda t: (t[0], t[1]))
        found = self._plan(0, [(a, u) for _, _, a, u in order], list(self.rows), self.base, [])
        if found is None:
            return None
        chosen, point = found
        return self._certificate(point.point, chosen)

    def _certificate(self, point, chosen: list[tuple[StrategyProfile, PlanEntry, int]]) -> StrongCertificate:
        inst = self.inst
        payments = {
            th: tuple(point[payment_var(inst, i, th)] for i in range(inst.n)) for th in inst.profiles
        }
        labeling: dict[StrategyProfile, Witness | None] = {}
        for alpha in self.profiles:
            k = self.labels[alpha]
            labeling[alpha] = None if k == 0 else deviations(inst, alpha)[k - 1]
        plan: dict[StrategyProfile, PlanEntry] = {}
        elim: dict[StrategyProfile, dict[CoProfile, Fraction]] = {}
        for alpha, entry, col in sorted(chosen, key=lambda t: self.bad.index(t[0])):
            plan[alpha] = entry
            elim[alpha] = {co: point[col + k] for k, co in enumerate(inst.co_profiles(entry.agent))}
        system = build_system(inst, self.beliefs, labeling, plan)
        cert = StrongCertificate(payments, labeling, plan, elim, Fraction(0))
        slack = min_strict_slack(system, certificate_point(inst, cert))
        return StrongCertificate(payments, labeling, plan, elim, slack)

    def prefix(self, depth: int) -> list[int]:
        return [self.labels[a] for a in self.order[:depth]]

    def run(self, start: int = 0, stop: int | None = None):
        """DFS over ``order[start:stop]`` below the committed prefix.

        With ``stop`` short of the full order, returns the reachable prefixes
        of length ``stop`` instead of solving leaves; otherwise returns the
        first certificate or None.
        """
        full = stop is None or stop >= len(self.order)
        stop = len(self.order) if full else stop
        frontier: list[list[int]] = []
        nxt = [0] * (stop + 1)
        d = start
        while True:
            if d == stop:
                if full:
                    cert = self.leaf()
                    if cert is not None:
                        return cert
                else:
                    frontier.append(self.prefix(stop))
                if d == start:
                    break
                self.undo()
                d -= 1
                continue
            alpha = self.order[d]
            k = nxt[d]
            if k == self.n_options(alpha):
                nxt[d] = 0
                if d == start:
                    break
                self.undo()
                d -= 1
                continue
            nxt[d] = k + 1
            self._tick()
            if self.commit(alpha, k):
                d += 1
        return None if full else frontier


def _check_profile_limit(inst: Instance, limits: Limits) -> None:
    count = math.prod(len(t) ** len(t) for t in inst.types)
    if count > limits.profiles:
        raise ResourceExceeded(
            f"{count} strategy profiles exceed the limit of {limits.profiles}", {"profiles": count}
        )


def _solve_subtree(args) -> tuple[str, StrongCertificate | None, Statistics]:
    inst, limits, deadline, prefix, precheck = args
    search = _Search(inst, conditional_beliefs(inst), limits, deadline, precheck)
    search.start()
    search.replay(prefix)
    search.stats = Statistics(profiles=search.stats.profiles)
    try:
        cert = search.run(start=len(prefix))
    except ResourceExceeded:
        return "limit", None, search.stats
    return ("yes" if cert is not None else "no"), cert, search.stats


def decide_strong(
    inst: Instance,
    limits: Limits | None = None,
    workers: int = 1,
    precheck: bool = True,
) -> StrongResult:
    """Sound and complete decision of strong implementability.

    Raises ResourceExceeded when a limit is hit first. The certificate is
    the first feasible leaf in the fixed search order whatever ``workers`` is.
    """
    limits = limits or Limits()
    _check_profile_limit(inst, limits)
    beliefs = conditional_beliefs(inst)
    deadline = time.monotonic() + limits.seconds
    search = _Search(inst, beliefs, limits, deadline, precheck)
    if not search.start():
        return StrongResult(False, None, search.stats)

    if workers <= 1:
        cert = search.run()
        return StrongResult(cert is not None, cert, search.stats)

    frontier: list[list[int]] | None = None
    for depth in range(1, len(search.order)):
        frontier = search.run(stop=depth)
        if len(frontier) >= 4 * workers:
            break
    if not frontier or len(frontier) < 2:
        cert = search.run()
        return StrongResult(cert is not None, cert, search.stats)

    stats = search.stats
    jobs = [(inst, limits, deadline, prefix, precheck) for prefix in frontier]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for status, cert, sub in pool.map(_solve_subtree, jobs):
            stats.add(sub)
            if status == "limit":
                pool.shutdown(cancel_futures=True)
                raise ResourceExceeded("limit exceeded in a parallel subtree", stats.as_dict())
            if status == "yes":
                pool.shutdown(cancel_futures=True)
                return StrongResult(True, cert, stats)
    return StrongResult(False, None, stats)


# --- independent checks ----------------------------------------------------


def selectively_eliminable(
    inst: Instance,
    beliefs: Beliefs,
    payments: Mapping[Profile, tuple[Fraction, ...]],
    alpha: StrategyProfile,
    entry: PlanEntry,
    flag_payments: Mapping[CoProfile, Fraction],
) -> bool:
    """Check both elimination conditions directly on expected utilities:
    the threatened type strictly gains by flagging against ``alpha``, and no
    type gains by flagging against truthful play."""
    i, bar = entry.agent, entry.threatened
    h = entry.flag_outcome
    flag = stay = Fraction(0)
    for co in inst.co_profiles(i):
        q = beliefs(i, bar, co)
        theta = inst.join(i, co, bar)
        cb = co_bids(alpha, i, co)
        played = inst.join(i, cb, alpha[i][bar])
        flag += q * (inst.value(i, h[cb], theta) + flag_payments[cb])
        stay += q * (inst.value(i, inst.scf[played], theta) + payments[played][i])
    if not flag > stay:
        return False
    for own in range(len(inst.types[i])):
        gain = Fraction(0)
        for co in inst.co_profiles(i):
            q = beliefs(i, own, co)
            theta = inst.join(i, co, own)
            gain += q * (
                inst.value(i, inst.scf[theta], theta)
                + payments[theta][i]
                - inst.value(i, h[co], theta)
                - flag_payments[co]
            )
        if gain < 0:
            return False
    return True


def certificate_point(inst: Instance, cert: StrongCertificate) -> list[Fraction]:
    point = [Fraction(0)] * (inst.n * len(inst.profiles))
    for th in inst.profiles:
        for i in range(inst.n):
            point[payment_var(inst, i, th)] = cert.payments[th][i]
    for alpha in bad_equilibria(inst, cert.labeling):
        entry = cert.plan[alpha]
        point.extend(cert.elimination_payments[alpha][co] for co in inst.co_profiles(entry.agent))
    return point


def certificate_problems(inst: Instance, beliefs: Beliefs, cert: StrongCertificate) -> list[str]:
    """Reasons a certificate fails; empty when it is valid."""
    problems = []
    profiles = all_profiles(inst)
    if set(cert.labeling) != set(profiles):
        return ["labeling does not cover exactly the strategy profiles"]
    mech = direct_mechanism(inst, cert.payments)
    actual = {rep.profile for rep in enumerate_equilibria(inst, beliefs, mech)}
    claimed = {a for a in profiles if cert.labeling[a] is None}
    if actual != claimed:
        problems.append(f"labeling disagrees with the equilibria of the mechanism ({len(actual ^ claimed)} profiles)")
    for alpha in profiles:
        w = cert.labeling[alpha]
        if w is not None:
            i, own, dev = w
            if dev == alpha[i][own] or not (
                expected_utility(inst, beliefs, mech, alpha, i, own, dev)
                > expected_utility(inst, beliefs, mech, alpha, i, own, alpha[i][own])
            ):
                problems.append(f"witness {w} of {alpha} is not a profitable deviation")
    if truthful_profile(inst) not in actual:
        problems.append("truthful reporting is not an equilibrium")
    bad = bad_equilibria(inst, cert.labeling)
    if set(cert.plan) != set(bad) or set(cert.elimination_payments) != set(bad):
        return problems + ["elimination plan does not match the bad equilibria"]
    for alpha in bad:
        if not selectively_eliminable(
            inst, beliefs, cert.payments, alpha, cert.plan[alpha], cert.elimination_payments[alpha]
        ):
            problems.append(f"bad equilibrium {alpha} is not selectively eliminated")
    system = build_system(inst, beliefs, cert.labeling, cert.plan)
    point = certificate_point(inst, cert)
    if not check_point(system, point):
        problems.append("payments violate the assembled inequality system")
    if cert.strict_slack <= 0:
        problems.append("strict slack is not positive")
    return problems


def verify_certificate(inst: Instance, beliefs: Beliefs, cert: StrongCertificate) -> bool:
    return not certificate_problems(inst, beliefs, cert)


# --- serialization ---------------------------------------------------------


def certificate_to_dict(inst: Instance, cert: StrongCertificate) -> dict[str, Any]:
    types = inst.types
    labeling = []
    for alpha in all_profiles(inst):
        w = cert.labeling[alpha]
        item: dict[str, Any] = {"profile": strategy_key(types, alpha)}
        if w is None:
            item["status"] = "equilibrium"
            item["class"] = "bad" if alpha in cert.plan else "good"
        else:
            i, own, dev = w
            item["status"] = "non-equilibrium"
            item["witness"] = {"agent": i, "type": types[i][own], "deviation": types[i][dev]}
        labeling.append(item)
    plan = []
    elim = {}
    for alpha in bad_equilibria(inst, cert.labeling):
        entry = cert.plan[alpha]
        i = entry.agent
        key = strategy_key(types, alpha)
        plan.append(
            {
                "profile": key,
                "agent": i,
                "type": types[i][entry.threatened],
                "outcomes": {
                    inst.co_profile_key(i, co): inst.outcomes[x] for co, x in entry.flag_outcome.items()
                },
            }
        )
        elim[key] = {
            inst.co_profile_key(i, co): format_rational(v) for co, v in cert.elimination_payments[alpha].items()
        }
    return {
        "payments": payments_to_dict(inst, cert.payments),
        "labeling": labeling,
        "eliminationPlan": plan,
        "eliminationPayments": elim,
        "strictSlack": format_rational(cert.strict_slack),
    }


def _co_lookup(inst: Instance, i: int) -> dict[str, CoProfile]:
    return {inst.co_profile_key(i, co): co for co in inst.co_profiles(i)}


def certificate_from_dict(inst: Instance, raw: Mapping[str, Any]) -> StrongCertificate:
    for key in ("payments", "labeling", "eliminationPlan", "eliminationPayments", "strictSlack"):
        if key not in raw:
            raise InputError(f"certificate lacks {key!r}")
    mech = direct_mechanism(inst, {th: (Fraction(0),) * inst.n for th in inst.profiles})
    payments = {}
    for key, val in raw["payments"].items():
        th = inst.parse_profile(key)
        vec = [val] if inst.n == 1 and not isinstance(val, list) else val
        if len(vec) != inst.n:
            raise InputError(f"payment of {key!r} needs {inst.n} entries")
        payments[th] = tuple(parse_rational(v) for v in vec)
    if set(payments) != set(inst.profiles):
        raise InputError("certificate payments must cover every type profile")
    labeling: dict[StrategyProfile, Witness | None] = {}
    for item in raw["labeling"]:
        alpha = parse_strategy(inst, mech, item["profile"])
        if item.get("status") == "equilibrium":
            labeling[alpha] = None
        elif item.get("status") == "non-equilibrium":
            w = item["witness"]
            i = int(w["agent"])
            if not 0 <= i < inst.n:
                raise InputError(f"witness agent {i} out of range")
            try:
                labeling[alpha] = (i, inst.types[i].index(w["type"]), inst.types[i].index(w["deviation"]))
            except ValueError as exc:
                raise InputError(f"unknown type in witness {w!r}") from exc
        else:
            raise InputError(f"unknown labeling status {item.get('status')!r}")
    plan = {}
    elim = {}
    for item in raw["eliminationPlan"]:
        alpha = parse_strategy(inst, mech, item["profile"])
        i = int(item["agent"])
        if not 0 <= i < inst.n:
            raise InputError(f"plan agent {i} out of range")
        cos = _co_lookup(inst, i)
        try:
            flag = {cos[k]: inst.outcomes.index(x) for k, x in item["outcomes"].items()}
            plan[alpha] = PlanEntry(i, inst.types[i].index(item["type"]), flag)
            pay = raw["eliminationPayments"][item["profile"]]
            elim[alpha] = {cos[k]: parse_rational(v) for k, v in pay.items()}
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed elimination data for {item['profile']!r}") from exc
        if set(flag) != set(cos.values()) or set(elim[alpha]) != set(cos.values()):
            raise InputError(f"elimination data for {item['profile']!r} is not total")
    return StrongCertificate(payments, labeling, plan, elim, parse_rational(raw["strictSlack"]))
