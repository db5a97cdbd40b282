"""Core domain types for participatory funding coordination.

An instance couples agents, each holding a budget and an approval set, with
priced projects.  An outcome funds a set of projects and charges every agent
at most her budget, with the charges exactly covering the cost of the funded
set.  All money is integral and every money computation is exact; no floating
point enters utility or welfare arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

Money = int
"""Non-negative integer amount in indivisible currency units."""

UtilityVector = tuple
"""Per-agent utilities, in instance agent order."""


class PfcError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(PfcError):
    """Malformed serialized data.  The message names the offending field."""


class InputError(PfcError):
    """Well-formed data that violates a model invariant or names unknown ids."""


class CapacityError(PfcError):
    """Instance exceeds the configured enumeration limits."""


@dataclass(frozen=True)
class Instance:
    """A funding coordination setting.

    Parameters
    ----------
    agents : tuple of str
        Agent ids, in instance order.  Instance order is the canonical agent
        order used by every deterministic procedure in this package.
    budgets : tuple of Money
        Per-agent budgets, aligned with `agents`.
    projects : tuple of str
        Project ids, in instance order.  Instance order fixes the canonical
        set order: subsets of projects are ranked as binary counters with the
        first project in the least significant position.
    costs : tuple of Money
        Per-project costs, aligned with `projects`.
    approvals : tuple of tuple of str
        Per-agent approved project ids, each stored sorted.  Empty approval
        sets are permitted.
    """

    agents: tuple
    budgets: tuple
    projects: tuple
    costs: tuple
    approvals: tuple

    def __post_init__(self):
        if len(self.agents) < 1:
            raise InputError("instance needs at least one agent")
        if len(self.projects) < 1:
            raise InputError("instance needs at least one project")
        if len(set(self.agents)) != len(self.agents):
            raise InputError("duplicate agent id")
        if len(set(self.projects)) != len(self.projects):
            raise InputError("duplicate project id")
        if len(self.budgets) != len(self.agents):
            raise InputError("budgets must align with agents")
        if len(self.costs) != len(self.projects):
            raise InputError("costs must align with projects")
        if len(self.approvals) != len(self.agents):
            raise InputError("approvals must align with agents")
        for label, amounts in (("budget", self.budgets), ("cost", self.costs)):
            for amount in amounts:
                if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                    raise InputError("%s must be a non-negative integer, got %r" % (label, amount))
        known = set(self.projects)
        for agent, approved in zip(self.agents, self.approvals):
            seen = set(approved)
            if len(seen) != len(approved):
                raise InputError("agent %s approves a project twice" % agent)
            unknown = seen - known
            if unknown:
                raise InputError(
                    "agent %s approves unknown project %s" % (agent, sorted(unknown)[0])
                )
            if tuple(sorted(approved)) != tuple(approved):
                raise InputError("approvals of agent %s must be stored sorted" % agent)

    @property
    def n(self):
        return len(self.agents)

    @property
    def m(self):
        return len(self.projects)

    def agent_index(self, agent):
        try:
            return self.agents.index(agent)
        except ValueError:
            raise InputError("unknown agent id %r" % (agent,)) from None

    def project_index(self, project):
        try:
            return self.projects.index(project)
        except ValueError:
            raise InputError("unknown project id %r" % (project,)) from None

    def budget_of(self, agent):
        return self.budgets[self.agent_index(agent)]

    def cost_of(self, project):
        return self.costs[self.project_index(project)]

    def total_budget(self):
        return sum(self.budgets)

    def total_cost(self, funded):
        """Cost of a set of project ids, validating every id."""
        return sum(self.cost_of(c) for c in set(funded))

    def approvers(self, project):
        """Agents approving `project`, in instance order."""
        if project not in self.projects:
            raise InputError("unknown project id %r" % (project,))
        return tuple(a for a, approved in zip(self.agents, self.approvals) if project in approved)


def make_instance(agents, projects, approvals):
    """Convenience constructor from mappings.

    Parameters
    ----------
    agents : mapping of agent id to budget
    projects : mapping of project id to cost
    approvals : mapping of agent id to iterable of approved project ids
    """
    ids = tuple(agents)
    for a in approvals:
        if a not in agents:
            raise InputError("approvals name unknown agent %s" % a)
    return Instance(
        agents=ids,
        budgets=tuple(agents[a] for a in ids),
        projects=tuple(projects),
        costs=tuple(projects.values()),
        approvals=tuple(tuple(sorted(approvals.get(a, ()))) for a in ids),
    )


@dataclass(frozen=True)
class Outcome:
    """A funded project set together with per-agent charges.

    The constructor checks only instance-independent structure: charges must
    be non-negative integers.  Use `validate_outcome` to check an outcome
    against an instance.
    """

    funded: frozenset
    charges: dict

    def __post_init__(self):
        object.__setattr__(self, "funded", frozenset(self.funded))
        object.__setattr__(self, "charges", dict(self.charges))
        for agent, amount in self.charges.items():
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                raise InputError("charge of %s must be a non-negative integer" % agent)

    def total_charge(self):
        return sum(self.charges.values())


def empty_outcome(inst):
    """The outcome funding nothing and charging nobody."""
    return Outcome(funded=frozenset(), charges={a: 0 for a in inst.agents})


def validate_outcome(inst, out, require_exact_cover=True):
    """Check that `out` is a feasible outcome of `inst`.

    Verifies known funded ids, a complete charge vector, budget limits and,
    unless `require_exact_cover` is false, that charges sum to the cost of the
    funded set.  Raises `InputError` on the first violation.
    """
    for c in sorted(out.funded):
        if c not in inst.projects:
            raise InputError("outcome funds unknown project %r" % (c,))
    if set(out.charges) != set(inst.agents):
        missing = sorted(set(inst.agents) - set(out.charges))
        extra = sorted(set(out.charges) - set(inst.agents))
        if missing:
            raise InputError("outcome misses a charge for agent %s" % missing[0])
        raise InputError("outcome charges unknown agent %r" % (extra[0],))
    for agent, budget in zip(inst.agents, inst.budgets):
        if out.charges[agent] > budget:
            raise InputError(
                "agent %s is charged %d above budget %d" % (agent, out.charges[agent], budget)
            )
    if require_exact_cover:
        cost = inst.total_cost(out.funded)
        paid = out.total_charge()
        if paid != cost:
            raise InputError("charges sum to %d but the funded set costs %d" % (paid, cost))


@dataclass(frozen=True)
class PaymentMatrix:
    """Per-agent, per-project payments witnessing implementability.

    `entries` maps agent id to a mapping of project id to a positive amount;
    zero payments are not stored.
    """

    entries: dict

    def __post_init__(self):
        cleaned = {}
        for agent in self.entries:
            row = {}
            for project, amount in self.entries[agent].items():
                if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                    raise InputError(
                        "payment of %s to %s must be a non-negative integer" % (agent, project)
                    )
                if amount > 0:
                    row[project] = amount
            if row:
                cleaned[agent] = row
        object.__setattr__(self, "entries", cleaned)

    def paid_by(self, agent):
        return sum(self.entries.get(agent, {}).values())

    def paid_to(self, project):
        return sum(row.get(project, 0) for row in self.entries.values())

    def charges(self, inst):
        """Induced charge vector, one entry per agent of `inst`."""
        return {a: self.paid_by(a) for a in inst.agents}


def utility(inst, funded, agent):
    """Total cost of funded projects that `agent` approves.

    Parameters
    ----------
    inst : Instance
    funded : iterable of project ids, a subset of the instance's projects
    agent : agent id

    Returns
    -------
    Money
    """
    funded = set(funded)
    for c in funded:
        if c not in inst.projects:
            raise InputError("unknown project id %r" % (c,))
    i = inst.agent_index(agent)
    return sum(inst.cost_of(c) for c in funded if c in inst.approvals[i])


def utility_vector(inst, funded):
    """Per-agent utilities of funding `funded`, in instance agent order."""
    funded = set(funded)
    for c in funded:
        if c not in inst.projects:
            raise InputError("unknown project id %r" % (c,))
    cost = {c: w for c, w in zip(inst.projects, inst.costs)}
    return tuple(
        sum(cost[c] for c in approved if c in funded) for approved in inst.approvals
    )


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict):
        raise ParseError("%s: expected an object" % where)
    if key not in mapping:
        raise ParseError("%s: missing field %r" % (where, key))
    value = mapping[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ParseError("%s.%s: expected an integer, got %r" % (where, key, value))
    if kind is str and not isinstance(value, str):
        raise ParseError("%s.%s: expected a string, got %r" % (where, key, value))
    if kind is list and not isinstance(value, list):
        raise ParseError("%s.%s: expected an array" % (where, key))
    if kind is dict and not isinstance(value, dict):
        raise ParseError("%s.%s: expected an object" % (where, key))
    return value


def _money(mapping, key, where):
    value = _require(mapping, key, int, where)
    if value < 0:
        raise ParseError("%s.%s: money must be non-negative, got %d" % (where, key, value))
    return value


def _decode(data):
    """Accept JSON text, JSON bytes, or an already-parsed document."""
    if isinstance(data, (dict, list)):
        return data
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError("malformed JSON: %s" % exc) from None


def parse_instance(data):
    """Parse the instance JSON format.

    Raises `ParseError` naming the offending field on malformed input, and
    propagates `InputError` for invariant violations such as duplicate ids.
    """
    root = _decode(data)
    agent_rows = _require(root, "agents", list, "instance")
    project_rows = _require(root, "projects", list, "instance")
    agents, budgets, approvals = [], [], []
    for k, row in enumerate(agent_rows):
        where = "agents[%d]" % k
        agents.append(_require(row, "id", str, where))
        budgets.append(_money(row, "budget", where))
        approved = _require(row, "approves", list, where)
        for c in approved:
            if not isinstance(c, str):
                raise ParseError("%s.approves: expected project ids, got %r" % (where, c))
        approvals.append(tuple(sorted(approved)))
    projects, costs = [], []
    for k, row in enumerate(project_rows):
        where = "projects[%d]" % k
        projects.append(_require(row, "id", str, where))
        costs.append(_money(row, "cost", where))
    return Instance(
        agents=tuple(agents),
        budgets=tuple(budgets),
        projects=tuple(projects),
        costs=tuple(costs),
        approvals=tuple(approvals),
    )


def instance_to_dict(inst):
    return {
        "agents": [
            {"id": a, "budget": b, "approves": list(approved)}
            for a, b, approved in zip(inst.agents, inst.budgets, inst.approvals)
        ],
        "projects": [{"id": c, "cost": w} for c, w in zip(inst.projects, inst.costs)],
    }


def serialize_instance(inst):
    """Serialize to canonical JSON bytes; `parse_instance` round-trips it."""
    return (json.dumps(instance_to_dict(inst), indent=2) + "\n").encode("utf-8")


def parse_outcome(data):
    """Parse the outcome JSON format.  Structural checks only."""
    root = _decode(data)
    funded = _require(root, "funded", list, "outcome")
    for c in funded:
        if not isinstance(c, str):
            raise ParseError("outcome.funded: expected project ids, got %r" % (c,))
    charge_map = _require(root, "charges", dict, "outcome")
    charges = {}
    for agent, amount in charge_map.items():
        if not isinstance(amount, int) or isinstance(amount, bool):
            raise ParseError("outcome.charges.%s: expected an integer" % agent)
        if amount < 0:
            raise ParseError("outcome.charges.%s: money must be non-negative" % agent)
        charges[agent] = amount
    out = Outcome(funded=frozenset(funded), charges=charges)
    payments = root.get("payments")
    if payments is None:
        return out, None
    if not isinstance(payments, dict):
        raise ParseError("outcome.payments: expected an object")
    entries = {}
    for agent, row in payments.items():
        if not isinstance(row, dict):
            raise ParseError("outcome.payments.%s: expected an object" % agent)
        for project, amount in row.items():
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                raise ParseError(
                    "outcome.payments.%s.%s: expected non-negative integer" % (agent, project)
                )
        entries[agent] = dict(row)
    return out, PaymentMatrix(entries=entries)


def outcome_to_dict(out, payments=None, agent_order=None):
    order = list(agent_order) if agent_order is not None else sorted(out.charges)
    doc = {
        "funded": sorted(out.funded),
        "charges": {a: out.charges[a] for a in order},
    }
    if payments is not None:
        doc["payments"] = {
            a: {c: payments.entries[a][c] for c in sorted(payments.entries[a])}
            for a in order
            if a in payments.entries
        }
    return doc


def serialize_outcome(out, payments=None, agent_order=None):
    """Serialize to canonical JSON bytes.

    Charges are keyed by agent id; `agent_order` fixes the key order (instance
    agent order is the convention), defaulting to sorted ids.  A payment
    matrix, when given, is embedded sparsely under "payments".
    """
    return (json.dumps(outcome_to_dict(out, payments, agent_order), indent=2) + "\n").encode(
        "utf-8"
    )
