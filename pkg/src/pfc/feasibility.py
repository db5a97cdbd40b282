"""Feasibility tests for project sets and outcomes.

Implementability asks whether charges can be decomposed into per-project
payments that touch only approved projects and cover every funded project
exactly.  A single set is tested with an integral maximum flow, which also
yields a payment matrix witness; enumeration over all subsets instead uses a
Hall-style condition evaluated with bitmask dynamic programming, which is far
cheaper than one flow per subset.

The other feasibility notions have closed forms: a set admits an outcome in
which every agent's utility covers her charge iff the charge caps
min(budget, utility) sum to at least the set's cost, and a set is affordable
iff its cost is at most the total budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .model import InputError, PaymentMatrix, utility_vector


class FlowNetwork:
    """Integer-capacity flow network with a fixed, deterministic arc order.

    Arcs are stored as interleaved forward/reverse pairs; `add_arc` returns
    the forward arc id and the reverse arc is the id with the lowest bit
    flipped.  Breadth-first search explores arcs in insertion order, so the
    maximum flow found by `max_flow` is deterministic.
    """

    def __init__(self, node_count, source, sink):
        self.node_count = node_count
        self.source = source
        self.sink = sink
        self.arc_to = []
        self.arc_cap = []
        self.adj = [[] for _ in range(node_count)]

    def add_arc(self, tail, head, capacity):
        if capacity < 0:
            raise InputError("arc capacity must be non-negative")
        arc = len(self.arc_to)
        self.arc_to.append(head)
        self.arc_cap.append(capacity)
        self.adj[tail].append(arc)
        self.arc_to.append(tail)
        self.arc_cap.append(0)
        self.adj[head].append(arc + 1)
        return arc


def max_flow(net):
    """Maximum integral flow from the network's source to its sink.

    Returns the flow value and the per-arc flow list (reverse arcs carry the
    negated forward flow).  Shortest augmenting paths are found by BFS in arc
    order, making the result deterministic for a fixed network.
    """
    flow = [0] * len(net.arc_to)
    total = 0
    while True:
        pred = [-1] * net.node_count
        pred[net.source] = -2
        queue = deque([net.source])
        while queue:
            u = queue.popleft()
            if u == net.sink:
                break
            for arc in net.adj[u]:
                v = net.arc_to[arc]
                if pred[v] == -1 and net.arc_cap[arc] - flow[arc] > 0:
                    pred[v] = arc
                    queue.append(v)
        if pred[net.sink] == -1:
            return total, flow
        bottleneck = None
        v = net.sink
        while v != net.source:
            arc = pred[v]
            residual = net.arc_cap[arc] - flow[arc]
            if bottleneck is None or residual < bottleneck:
                bottleneck = residual
            v = net.arc_to[arc ^ 1]
        v = net.sink
        while v != net.source:
            arc = pred[v]
            flow[arc] += bottleneck
            flow[arc ^ 1] -= bottleneck
            v = net.arc_to[arc ^ 1]
        total += bottleneck


@dataclass(frozen=True)
class Certificate:
    """Result of an implementability test.

    When `ok` is true, `payments` holds a witnessing payment matrix.  When
    false, `witness` is a structured certificate: either a set of funded
    projects whose approvers cannot cover their cost, or a charge total that
    fails to match the funded cost.  Witnesses re-check by summation.
    """

    ok: bool
    payments: object
    witness: object


def _funded_in_order(inst, funded):
    funded = set(funded)
    for c in funded:
        if c not in inst.projects:
            raise InputError("unknown project id %r" % (c,))
    return [c for c in inst.projects if c in funded]


def implementability_certificate(inst, funded, agent_caps=None):
    """Flow test for per-project payments within per-agent caps.

    Caps default to budgets, which tests whether any charge vector makes the
    set implementable.  Passing an outcome's charges instead tests that
    specific outcome.  Arcs run source to agent (cap), agent to approved
    funded project (cap), project to sink (cost); the set is implementable
    iff the maximum flow saturates every sink arc.
    """
    if agent_caps is None:
        agent_caps = inst.budgets
    order = _funded_in_order(inst, funded)
    n = inst.n
    node_of = {c: 1 + n + k for k, c in enumerate(order)}
    sink = 1 + n + len(order)
    net = FlowNetwork(sink + 1, 0, sink)
    source_arcs = []
    for i in range(n):
        source_arcs.append(net.add_arc(0, 1 + i, agent_caps[i]))
    pay_arcs = {}
    for i in range(n):
        for c in inst.approvals[i]:
            if c in node_of:
                pay_arcs[i, c] = net.add_arc(1 + i, node_of[c], agent_caps[i])
    for c in order:
        net.add_arc(node_of[c], sink, inst.cost_of(c))
    required = inst.total_cost(order)
    value, flow = max_flow(net)
    if value == required:
        entries = {}
        for (i, c), arc in pay_arcs.items():
            if flow[arc] > 0:
                entries.setdefault(inst.agents[i], {})[c] = flow[arc]
        return Certificate(ok=True, payments=PaymentMatrix(entries=entries), witness=None)
    # The funded projects unreachable in the residual graph form a set whose
    # approvers ship every unit of their cap into it, yet it stays short.
    reachable = [False] * net.node_count
    reachable[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for arc in net.adj[u]:
            v = net.arc_to[arc]
            if not reachable[v] and net.arc_cap[arc] - flow[arc] > 0:
                reachable[v] = True
                queue.append(v)
    deficient = [c for c in order if not reachable[node_of[c]]]
    supporters = [
        inst.agents[i]
        for i in range(n)
        if any(c in inst.approvals[i] for c in deficient)
    ]
    capacity = sum(agent_caps[inst.agent_index(a)] for a in supporters)
    witness = {
        "deficient_projects": deficient,
        "supporters": supporters,
        "capacity": capacity,
        "required": inst.total_cost(deficient),
    }
    return Certificate(ok=False, payments=None, witness=witness)


def is_implementable_set(inst, funded):
    """Whether some charge vector makes funding `funded` implementable.

    Returns the verdict and, when true, a payment matrix whose row sums give
    witnessing charges.
    """
    cert = implementability_certificate(inst, funded)
    return cert.ok, cert.payments


def is_implementable_outcome(inst, out):
    """Whether the outcome's own charges decompose into approved payments.

    The flow caps each agent at her charge; saturating every funded project
    then uses each charge exactly, provided the charges sum to the funded
    cost.  Charge vectors that fail that total are reported unimplementable.
    """
    caps = []
    for a in out.charges:
        if a not in inst.agents:
            raise InputError("outcome charges unknown agent %r" % (a,))
    for a in inst.agents:
        caps.append(out.charges.get(a, 0))
    required = inst.total_cost(out.funded)
    paid = sum(caps)
    if paid != required:
        return False, None
    cert = implementability_certificate(inst, out.funded, agent_caps=tuple(caps))
    return cert.ok, cert.payments


def is_mr_feasible_set(inst, funded):
    """Whether some charge vector gives every agent utility at least her charge.

    Such charges exist iff the per-agent caps min(budget, utility) sum to at
    least the set's cost.  The witness charges fill those caps greedily in
    instance agent order, which is deterministic and always succeeds when the
    inequality holds.
    """
    order = _funded_in_order(inst, funded)
    required = inst.total_cost(order)
    utilities = utility_vector(inst, order)
    caps = [min(b, u) for b, u in zip(inst.budgets, utilities)]
    if sum(caps) < required:
        return False, None
    charges = {}
    remaining = required
    for agent, cap in zip(inst.agents, caps):
        pay = min(cap, remaining)
        charges[agent] = pay
        remaining -= pay
    return True, charges


def is_affordable_set(inst, funded):
    """Whether the set's cost is within the agents' total budget."""
    return inst.total_cost(funded) <= inst.total_budget()


@lru_cache(maxsize=64)
def approval_masks(inst):
    """Per-agent approval sets as bitmasks over instance project order."""
    index = {c: k for k, c in enumerate(inst.projects)}
    masks = []
    for approved in inst.approvals:
        mask = 0
        for c in approved:
            mask |= 1 << index[c]
        masks.append(mask)
    return tuple(masks)


def mask_of(inst, funded):
    """Bitmask of a set of project ids."""
    index = {c: k for k, c in enumerate(inst.projects)}
    mask = 0
    for c in set(funded):
        if c not in index:
            raise InputError("unknown project id %r" % (c,))
        mask |= 1 << index[c]
    return mask


def ids_of(inst, mask):
    """Project ids of a bitmask, in instance project order."""
    return tuple(c for k, c in enumerate(inst.projects) if mask >> k & 1)


@lru_cache(maxsize=16)
def cost_table(inst):
    """cost_table(inst)[mask] is the total cost of the mask's projects."""
    m = inst.m
    table = [0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        table[mask] = table[mask ^ low] + inst.costs[low.bit_length() - 1]
    return table


@lru_cache(maxsize=16)
def implementable_table(inst):
    """Byte table of implementability verdicts for every project subset.

    A subset is implementable iff each of its subsets costs no more than the
    combined budget of that subset's approvers (the cut condition of the flow
    test).  Grouping agents by approval mask and running a subset-sum
    transform gives every approver budget in O(m 2^m); a second pass marks a
    mask bad as soon as any submask is bad, which realizes the downward
    closure of implementability.
    """
    m = inst.m
    size = 1 << m
    masks = approval_masks(inst)
    by_type = [0] * size
    for mask, budget in zip(masks, inst.budgets):
        by_type[mask] += budget
    # Subset-sum (zeta) transform: reachable[s] = total budget of agents
    # whose approval mask is contained in s.
    reachable = list(by_type)
    for j in range(m):
        bit = 1 << j
        for s in range(size):
            if s & bit:
                reachable[s] += reachable[s ^ bit]
    total = sum(inst.budgets)
    full = size - 1
    costs = cost_table(inst)
    table = bytearray(size)
    table[0] = 1
    for s in range(1, size):
        bad = False
        sub = s
        while sub:
            if not table[s ^ (sub & -sub)]:
                bad = True
                break
            sub ^= sub & -sub
        if not bad:
            supporter_budget = total - reachable[full ^ s]
            bad = costs[s] > supporter_budget
        table[s] = 0 if bad else 1
    return table
