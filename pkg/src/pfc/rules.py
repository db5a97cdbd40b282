"""Exact welfare-maximizing funding rules and the constructive procedure.

Nine rules arise from crossing a welfare objective (utilitarian, egalitarian,
Nash) with a feasibility class (all affordable sets, sets admitting charges
covered by utility, implementable sets).  Each rule enumerates every feasible
set in canonical order and keeps the welfare optimum under a deterministic
tie-break, so results are reproducible bit for bit.

Exhaustive search is deliberate: computing any of these rules is NP-hard, so
no polynomial shortcut is attempted and instance size is guarded by caps.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass

from .axioms import (
    Axiom,
    DEFAULT_CAPS,
    best_alone,
    check_imp,
    check_ir,
    check_mr,
    check_po_family,
)
from .feasibility import (
    approval_masks,
    cost_table,
    ids_of,
    implementability_certificate,
    implementable_table,
    is_mr_feasible_set,
    mask_of,
)
from .model import (
    CapacityError,
    InputError,
    Outcome,
    PaymentMatrix,
    PfcError,
    utility_vector,
)


class SolveTimeout(PfcError):
    """A solve exceeded its cooperative deadline."""


class Welfare(enum.Enum):
    UTIL = "UTIL"
    EGAL = "EGAL"
    NASH = "NASH"


class Constraint(enum.Enum):
    NONE = "NONE"
    MR = "MR"
    IMP = "IMP"


@dataclass(frozen=True)
class RuleId:
    """A welfare objective paired with a feasibility constraint."""

    welfare: Welfare
    constraint: Constraint

    def __str__(self):
        if self.constraint is Constraint.NONE:
            return self.welfare.value
        return "%s-%s" % (self.welfare.value, self.constraint.value)

    @staticmethod
    def parse(name):
        """Parse names like "UTIL", "UTIL-NONE", "NASH-IMP"."""
        head, _, tail = name.strip().upper().partition("-")
        try:
            welfare = Welfare(head)
            constraint = Constraint(tail) if tail else Constraint.NONE
        except ValueError:
            raise InputError("unknown rule %r" % (name,)) from None
        return RuleId(welfare, constraint)


ALL_RULES = tuple(
    RuleId(welfare, constraint) for welfare in Welfare for constraint in Constraint
)


@dataclass(frozen=True)
class NashValue:
    """Comparison key for Nash welfare.

    Fewer zero-utility agents is strictly better; among equal zero counts the
    larger exact product of the positive utilities wins.  When every utility
    is positive this coincides with comparing plain products.  The product is
    an arbitrary-precision integer, never a float.
    """

    zero_count: int
    product: int

    def sort_key(self):
        return (-self.zero_count, self.product)

    def to_dict(self):
        return {"zero_count": self.zero_count, "product": self.product}


def nash_value(utilities):
    product = 1
    zeros = 0
    for u in utilities:
        if u == 0:
            zeros += 1
        else:
            product *= u
    return NashValue(zero_count=zeros, product=product)


@dataclass(frozen=True)
class WelfareSummary:
    """Welfare of one funded set under all three objectives."""

    util_total: int
    sorted_utilities: tuple
    nash: NashValue

    def to_dict(self):
        return {
            "util_total": self.util_total,
            "sorted_utilities": list(self.sorted_utilities),
            "nash": self.nash.to_dict(),
        }


def welfare_summary(utilities):
    return WelfareSummary(
        util_total=sum(utilities),
        sorted_utilities=tuple(sorted(utilities)),
        nash=nash_value(utilities),
    )


@dataclass(frozen=True)
class RuleResult:
    """A solved outcome with its welfare summary and welfare-tied rivals.

    `optimal_sets` lists every funded set achieving the optimal welfare, in
    canonical set order; `outcome` funds the tie-break winner among them.
    """

    rule: str
    outcome: Outcome
    payments: object
    welfare: WelfareSummary
    optimal_sets: tuple

    def to_dict(self, inst=None):
        order = list(inst.agents) if inst is not None else sorted(self.outcome.charges)
        doc = {
            "rule": self.rule,
            "funded": sorted(self.outcome.funded),
            "charges": {a: self.outcome.charges[a] for a in order},
        }
        if self.payments is not None:
            doc["payments"] = {
                a: {c: self.payments.entries[a][c] for c in sorted(self.payments.entries[a])}
                for a in order
                if a in self.payments.entries
            }
        doc["welfare"] = self.welfare.to_dict()
        doc["optimal_sets"] = [sorted(s) for s in self.optimal_sets]
        return doc


def _require_projects(inst, caps, what):
    if inst.m > caps.m:
        raise CapacityError(
            "%s needs subset enumeration over %d projects, cap is %d" % (what, inst.m, caps.m)
        )


def _constraint_filter(inst, constraint):
    """Mask predicate for the sets a constraint admits."""
    costs = cost_table(inst)
    if constraint is Constraint.NONE:
        budget = inst.total_budget()
        return lambda s: costs[s] <= budget
    if constraint is Constraint.MR:
        pairs = list(zip(inst.budgets, approval_masks(inst)))
        return lambda s: costs[s] <= sum(min(b, costs[s & a]) for b, a in pairs)
    if constraint is Constraint.IMP:
        table = implementable_table(inst)
        return lambda s: bool(table[s])
    raise ValueError("unknown constraint %r" % (constraint,))


def enumerate_feasible_sets(inst, constraint, caps=DEFAULT_CAPS):
    """All project sets the constraint admits, in canonical set order.

    Canonical order treats a set as a binary counter over instance project
    order with the first project least significant, so subsets appear in
    ascending counter order and each exactly once.
    """
    _require_projects(inst, caps, "feasible set enumeration")
    passes = _constraint_filter(inst, constraint)
    return (
        frozenset(ids_of(inst, s)) for s in range(1 << inst.m) if passes(s)
    )


def _welfare_key(welfare, utilities):
    if welfare is Welfare.UTIL:
        return sum(utilities)
    if welfare is Welfare.EGAL:
        return tuple(sorted(utilities))
    return nash_value(utilities).sort_key()


def _charges_for(inst, funded, constraint):
    """Deterministic witness charges and payments for a chosen set."""
    if constraint is Constraint.IMP:
        cert = implementability_certificate(inst, funded)
        if not cert.ok:
            raise AssertionError("solver invariant violated: chosen set not implementable")
        charges = cert.payments.charges(inst)
        return charges, cert.payments
    if constraint is Constraint.MR:
        ok, charges = is_mr_feasible_set(inst, funded)
        if not ok:
            raise AssertionError("solver invariant violated: chosen set lost its charges")
        return charges, None
    remaining = inst.total_cost(funded)
    charges = {}
    for agent, budget in zip(inst.agents, inst.budgets):
        pay = min(budget, remaining)
        charges[agent] = pay
        remaining -= pay
    return charges, None


_VERIFY_VARIANT = {
    Constraint.NONE: Axiom.PO,
    Constraint.MR: Axiom.PO_MR,
    Constraint.IMP: Axiom.PO_IMP,
}


def solve(inst, rule, caps=DEFAULT_CAPS, deadline=None, verify=True):
    """Welfare-optimal outcome of `rule`, with deterministic tie-breaking.

    Enumerates the constraint's feasible sets, keeps every welfare-tied
    optimum, and funds the tied set with the smallest total cost, breaking
    remaining ties by canonical set order.  Witness charges come from the
    constraint's feasibility test.  With `verify`, the result is re-checked
    against the constraint's axiom and its Pareto variant before returning.

    `deadline` is a `time.monotonic` instant; enumeration past it raises
    `SolveTimeout`.

    Returns
    -------
    RuleResult
    """
    _require_projects(inst, caps, "rule %s" % rule)
    passes = _constraint_filter(inst, rule.constraint)
    costs = cost_table(inst)
    masks = approval_masks(inst)
    best_key = None
    tied = []
    for s in range(1 << inst.m):
        if deadline is not None and s & 255 == 0 and time.monotonic() > deadline:
            raise SolveTimeout("rule %s exceeded its time budget" % rule)
        if not passes(s):
            continue
        key = _welfare_key(rule.welfare, [costs[s & a] for a in masks])
        if best_key is None or key > best_key:
            best_key = key
            tied = [s]
        elif key == best_key:
            tied.append(s)
    if best_key is None:
        raise AssertionError("solver invariant violated: the empty set is always feasible")
    winner = min(tied, key=lambda s: (costs[s], s))
    funded = frozenset(ids_of(inst, winner))
    charges, payments = _charges_for(inst, funded, rule.constraint)
    outcome = Outcome(funded=funded, charges=charges)
    result = RuleResult(
        rule=str(rule),
        outcome=outcome,
        payments=payments,
        welfare=welfare_summary(utility_vector(inst, funded)),
        optimal_sets=tuple(tuple(ids_of(inst, s)) for s in tied),
    )
    if verify:
        _verify_result(inst, rule, result, caps)
    return result


def _verify_result(inst, rule, result, caps):
    if rule.constraint is Constraint.MR and not check_mr(inst, result.outcome).holds:
        raise AssertionError("solver invariant violated: %s outcome fails MR" % rule)
    if rule.constraint is Constraint.IMP and not check_imp(inst, result.outcome).holds:
        raise AssertionError("solver invariant violated: %s outcome fails IMP" % rule)
    variant = _VERIFY_VARIANT[rule.constraint]
    if not check_po_family(inst, result.outcome, variant, caps).holds:
        raise AssertionError(
            "solver invariant violated: %s outcome fails %s" % (rule, variant.value)
        )


def construct_imp_ir_poimp(inst, caps=DEFAULT_CAPS, verify=True):
    """Outcome that is implementable, individually rational and Pareto optimal
    among implementable sets.

    Each agent first funds her solo knapsack optimum in full.  Funding the
    union over-collects, so every project's surplus is refunded in equal
    shares to its contributors, remainders going one unit each to the
    canonically first contributors.  If any implementable set then dominates,
    the canonically first dominating set replaces the current one until no
    improvement remains; utilities only rise, so individual rationality is
    preserved throughout.
    """
    _require_projects(inst, caps, "construction")
    solo_sets = [best_alone(inst, a)[1] for a in inst.agents]
    union = frozenset().union(*solo_sets) if solo_sets else frozenset()
    entries = {}
    for c in inst.projects:
        if c not in union:
            continue
        contributors = [i for i, chosen in enumerate(solo_sets) if c in chosen]
        w = inst.cost_of(c)
        surplus = w * (len(contributors) - 1)
        base, extra = divmod(surplus, len(contributors))
        for rank, i in enumerate(contributors):
            refund = base + 1 if rank < extra else base
            pay = w - refund
            if pay:
                entries.setdefault(inst.agents[i], {})[c] = pay
    payments = PaymentMatrix(entries=entries)
    charges = payments.charges(inst)
    funded = union
    # Greedy canonical-order Pareto improvements within the implementable
    # sets; each step strictly raises total utility, so the loop terminates.
    table = implementable_table(inst)
    costs = cost_table(inst)
    masks = approval_masks(inst)
    improved = False
    while True:
        current = [costs[mask_of(inst, funded) & a] for a in masks]
        replacement = None
        for s in range(1 << inst.m):
            if not table[s]:
                continue
            better = False
            for a, u in zip(masks, current):
                cu = costs[s & a]
                if cu < u:
                    better = False
                    break
                if cu > u:
                    better = True
            if better:
                replacement = s
                break
        if replacement is None:
            break
        funded = frozenset(ids_of(inst, replacement))
        improved = True
    if improved:
        cert = implementability_certificate(inst, funded)
        payments = cert.payments
        charges = payments.charges(inst)
    outcome = Outcome(funded=funded, charges=charges)
    result = RuleResult(
        rule="CONSTRUCT",
        outcome=outcome,
        payments=payments,
        welfare=welfare_summary(utility_vector(inst, funded)),
        optimal_sets=(tuple(c for c in inst.projects if c in funded),),
    )
    if verify:
        for report in (
            check_imp(inst, outcome),
            check_ir(inst, outcome),
            check_po_family(inst, outcome, Axiom.PO_IMP, caps),
        ):
            if not report.holds:
                raise AssertionError(
                    "construction invariant violated: result fails %s" % report.axiom.value
                )
    return result
