"""Outcome axiom checkers returning verdicts with re-checkable witnesses.

Every checker takes an instance and an outcome and returns an `AxiomReport`.
A false verdict always carries a structured witness: a violating agent, a
dominating funded set, a blocking coalition, or an unfunded project a group
could still afford.  Witnesses are designed to be independently re-checkable
by direct summation.

The Pareto family, core stability and the solo-knapsack bound enumerate
subsets and are therefore exponential; explicit capacity caps guard them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .feasibility import (
    approval_masks,
    cost_table,
    implementability_certificate,
    implementable_table,
)
from .model import CapacityError, utility_vector


class Axiom(enum.Enum):
    MR = "MR"
    IMP = "IMP"
    IR = "IR"
    EXH = "EXH"
    PO = "PO"
    PO_MR = "PO_MR"
    PO_IMP = "PO_IMP"
    PO_PAY = "PO_PAY"
    PO_IR = "PO_IR"
    CORE = "CORE"
    PROP = "PROP"


PO_VARIANTS = (Axiom.PO, Axiom.PO_MR, Axiom.PO_IMP, Axiom.PO_PAY, Axiom.PO_IR)


@dataclass(frozen=True)
class Caps:
    """Enumeration limits for the exponential checkers and solvers."""

    n: int = 16
    m: int = 24


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class AxiomReport:
    """Verdict for one axiom.

    `holds` is None when the check was skipped because the instance exceeds
    the enumeration caps; the witness then carries the reason.
    """

    axiom: Axiom
    holds: object
    witness: object = None

    @property
    def skipped(self):
        return self.holds is None

    def to_dict(self):
        return {"axiom": self.axiom.value, "holds": self.holds, "witness": self.witness}


def _require_projects(inst, caps, axiom):
    if inst.m > caps.m:
        raise CapacityError(
            "%s check needs subset enumeration over %d projects, cap is %d"
            % (axiom.value, inst.m, caps.m)
        )


def _require_agents(inst, caps, axiom):
    if inst.n > caps.n:
        raise CapacityError(
            "%s check needs subset enumeration over %d agents, cap is %d"
            % (axiom.value, inst.n, caps.n)
        )


def check_mr(inst, out):
    """Every agent's utility covers her charge."""
    utilities = utility_vector(inst, out.funded)
    for agent, u in zip(inst.agents, utilities):
        x = out.charges.get(agent, 0)
        if u < x:
            witness = {"agent": agent, "utility": u, "charge": x}
            return AxiomReport(Axiom.MR, False, witness)
    return AxiomReport(Axiom.MR, True)


def check_imp(inst, out):
    """The outcome's charges decompose into per-project approved payments."""
    required = inst.total_cost(out.funded)
    paid = sum(out.charges.get(a, 0) for a in inst.agents)
    if paid != required:
        witness = {
            "reason": "charges_mismatch",
            "total_charges": paid,
            "funded_cost": required,
        }
        return AxiomReport(Axiom.IMP, False, witness)
    caps = tuple(out.charges.get(a, 0) for a in inst.agents)
    cert = implementability_certificate(inst, out.funded, agent_caps=caps)
    if cert.ok:
        return AxiomReport(Axiom.IMP, True)
    return AxiomReport(Axiom.IMP, False, cert.witness)


@lru_cache(maxsize=65536)
def best_alone(inst, agent):
    """Best total cost the agent can fund alone from her approvals.

    Exact knapsack over the approval set with the agent's budget as capacity,
    solved by depth-first branch and bound.  Subsets are explored in canonical
    set order, so among value ties the canonically least set wins.

    Returns
    -------
    (Money, frozenset of project ids)
    """
    i = inst.agent_index(agent)
    budget = inst.budgets[i]
    items = [(inst.project_index(c), inst.cost_of(c)) for c in inst.approvals[i]]
    items.sort()
    affordable = [(k, w) for k, w in items if w <= budget]
    suffix = [0] * (len(affordable) + 1)
    for k in range(len(affordable) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + affordable[k][1]
    best_value = 0
    best_set = ()
    stack = [(len(affordable) - 1, budget, 0, ())]
    while stack:
        level, left, value, chosen = stack.pop()
        if value + suffix[0] - suffix[level + 1] <= best_value:
            # Nothing below can strictly beat the incumbent, and any tie
            # would be canonically later than the incumbent.
            continue
        if level < 0:
            best_value = value
            best_set = chosen
            continue
        index, weight = affordable[level]
        # The stack is LIFO, so pushing include before exclude visits the
        # exclude branch first, which is ascending canonical set order.
        if weight <= left:
            stack.append((level - 1, left - weight, value + weight, chosen + (index,)))
        stack.append((level - 1, left, value, chosen))
    return best_value, frozenset(inst.projects[k] for k in best_set)


def check_ir(inst, out):
    """Every agent does at least as well as funding alone from her budget."""
    utilities = utility_vector(inst, out.funded)
    for agent, u in zip(inst.agents, utilities):
        solo_value, solo_set = best_alone(inst, agent)
        if u < solo_value:
            witness = {
                "agent": agent,
                "utility": u,
                "solo_value": solo_value,
                "solo_set": sorted(solo_set),
            }
            return AxiomReport(Axiom.IR, False, witness)
    return AxiomReport(Axiom.IR, True)


def check_exh(inst, out):
    """No approver group's unspent budget covers an unfunded project they share.

    Slack is additive, so pooling every approver of the project is optimal;
    a violation is witnessed by the project and its positive-slack approvers.
    """
    for c, w in zip(inst.projects, inst.costs):
        if c in out.funded:
            continue
        approvers = [
            (agent, budget - out.charges.get(agent, 0))
            for agent, budget, approved in zip(inst.agents, inst.budgets, inst.approvals)
            if c in approved
        ]
        if not approvers:
            continue
        slack = sum(s for _, s in approvers)
        if slack >= w:
            witness = {
                "project": c,
                "supporters": [agent for agent, s in approvers if s > 0],
                "slack": slack,
                "cost": w,
            }
            return AxiomReport(Axiom.EXH, False, witness)
    return AxiomReport(Axiom.EXH, True)


def _solo_values(inst):
    return tuple(best_alone(inst, a)[0] for a in inst.agents)


def _candidate_filter(inst, out, variant):
    """Mask predicate for the sets an outcome competes against."""
    costs = cost_table(inst)
    masks = approval_masks(inst)
    budgets = inst.budgets
    if variant is Axiom.PO:
        budget = inst.total_budget()
        return lambda s: costs[s] <= budget
    if variant is Axiom.PO_MR:
        pairs = list(zip(budgets, masks))
        return lambda s: costs[s] <= sum(min(b, costs[s & a]) for b, a in pairs)
    if variant is Axiom.PO_IMP:
        table = implementable_table(inst)
        return lambda s: bool(table[s])
    if variant is Axiom.PO_PAY:
        price = sum(out.charges.get(a, 0) for a in inst.agents)
        return lambda s: costs[s] <= price
    if variant is Axiom.PO_IR:
        budget = inst.total_budget()
        floors = list(zip(_solo_values(inst), masks))
        return lambda s: costs[s] <= budget and all(
            costs[s & a] >= v for v, a in floors
        )
    raise ValueError("unknown Pareto variant %r" % (variant,))


def check_po_family(inst, out, variant, caps=DEFAULT_CAPS):
    """No candidate set of the variant's class Pareto-dominates the outcome.

    Candidate classes: PO all affordable sets, PO_MR sets with charge caps
    covering their cost, PO_IMP implementable sets, PO_PAY sets costing at
    most the outcome's total charge, PO_IR affordable sets granting every
    agent her solo optimum.  Domination compares utilities only, so the
    verdict depends on the funded set and (for PO_PAY) the charge total.
    The witness is the canonically first dominating set.
    """
    if variant not in PO_VARIANTS:
        raise ValueError("unknown Pareto variant %r" % (variant,))
    _require_projects(inst, caps, variant)
    passes = _candidate_filter(inst, out, variant)
    costs = cost_table(inst)
    masks = approval_masks(inst)
    current = utility_vector(inst, out.funded)
    pairs = list(zip(masks, current))
    for s in range(1 << inst.m):
        if not passes(s):
            continue
        better = False
        for a, u in pairs:
            cu = costs[s & a]
            if cu < u:
                better = False
                break
            if cu > u:
                better = True
        if better:
            witness = {
                "funded": [c for k, c in enumerate(inst.projects) if s >> k & 1],
                "cost": costs[s],
                "utilities": [costs[s & a] for a in masks],
            }
            return AxiomReport(variant, False, witness)
    return AxiomReport(variant, True)


def check_core(inst, out, caps=DEFAULT_CAPS):
    """No coalition can pool its budgets into a set every member strictly prefers.

    A blocking pair is a coalition and a project set within its pooled budget
    giving every member strictly more approved spending than the outcome
    does.  Only sets inside the coalition's approval union matter, since
    projects nobody in the coalition approves only add cost.
    """
    _require_agents(inst, caps, Axiom.CORE)
    _require_projects(inst, caps, Axiom.CORE)
    costs = cost_table(inst)
    masks = approval_masks(inst)
    current = utility_vector(inst, out.funded)
    n = inst.n
    for group in range(1, 1 << n):
        members = [i for i in range(n) if group >> i & 1]
        pooled = sum(inst.budgets[i] for i in members)
        union = 0
        for i in members:
            union |= masks[i]
        for t in range(1, union + 1):
            if t & ~union:
                continue
            if costs[t] > pooled:
                continue
            if all(costs[t & masks[i]] > current[i] for i in members):
                witness = {
                    "agents": [inst.agents[i] for i in members],
                    "projects": [c for k, c in enumerate(inst.projects) if t >> k & 1],
                    "pooled_budget": pooled,
                    "cost": costs[t],
                }
                return AxiomReport(Axiom.CORE, False, witness)
    return AxiomReport(Axiom.CORE, True)


def check_prop(inst, out):
    """Groups with identical approvals who can afford them get them funded.

    Agents are grouped by their exact nonempty approval set; if such a
    group's pooled budget covers the cost of that set, proportionality
    demands every project in it be funded.  Checking each full group
    suffices: budgets only grow with group size and the demand does not
    depend on which members are picked.
    """
    groups = {}
    for i, approved in enumerate(inst.approvals):
        if approved:
            groups.setdefault(approved, []).append(i)
    for approved, members in groups.items():
        pooled = sum(inst.budgets[i] for i in members)
        cost = inst.total_cost(approved)
        if pooled >= cost and not set(approved) <= out.funded:
            witness = {
                "agents": [inst.agents[i] for i in members],
                "projects": list(approved),
                "pooled_budget": pooled,
                "cost": cost,
            }
            return AxiomReport(Axiom.PROP, False, witness)
    return AxiomReport(Axiom.PROP, True)


def check_all(inst, out, caps=DEFAULT_CAPS):
    """Run every checker, reporting capacity-skipped ones explicitly."""
    reports = [check_mr(inst, out), check_imp(inst, out), check_ir(inst, out), check_exh(inst, out)]
    for variant in PO_VARIANTS:
        try:
            reports.append(check_po_family(inst, out, variant, caps))
        except CapacityError as exc:
            reports.append(AxiomReport(variant, None, {"reason": str(exc)}))
    try:
        reports.append(check_core(inst, out, caps))
    except CapacityError as exc:
        reports.append(AxiomReport(Axiom.CORE, None, {"reason": str(exc)}))
    reports.append(check_prop(inst, out))
    return reports
