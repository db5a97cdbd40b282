"""Brute-force reference implementations used to validate the fast paths.

Everything here trades speed for obviousness: power-set scans and exhaustive
charge enumeration instead of flow networks, closed forms, or subset-sum
tables.  Utilities are recomputed from raw approval sets so these oracles
share no arithmetic with the package under test.  They are only meant for
instances with a handful of agents and projects.
"""

from itertools import product


def approved_cost(inst, funded, i):
    """Utility of agent index `i`: total cost of funded approved projects."""
    liked = set(inst.approvals[i])
    return sum(inst.cost_of(c) for c in funded if c in liked)


def utilities_of(inst, funded):
    return tuple(approved_cost(inst, funded, i) for i in range(inst.n))


def subsets_ascending(inst):
    """All project subsets in canonical order: ascending bitmask, first
    project least significant."""
    for mask in range(1 << inst.m):
        yield frozenset(c for k, c in enumerate(inst.projects) if mask >> k & 1)


def brute_find_payments(inst, funded, caps=None):
    """Search every way to cover each funded project from its approvers.

    Returns a {(agent, project): amount} dict with positive entries, or None
    when no exact cover exists.  `caps` overrides per-agent spendable money
    (defaults to the budgets).
    """
    if caps is None:
        caps = inst.budgets
    order = sorted(funded, key=inst.project_index)
    dead = set()

    def attempt(k, left):
        if k == len(order):
            return {}
        state = (k, left)
        if state in dead:
            return None
        c = order[k]
        payers = [i for i in range(inst.n) if c in inst.approvals[i]]

        def fill(j, need, shares):
            if j == len(payers):
                if need:
                    return None
                remaining = tuple(
                    left[i] - shares.get(i, 0) for i in range(inst.n)
                )
                rest = attempt(k + 1, remaining)
                if rest is None:
                    return None
                merged = dict(rest)
                for i, amount in shares.items():
                    if amount:
                        merged[(inst.agents[i], c)] = amount
                return merged
            i = payers[j]
            for amount in range(min(need, left[i]), -1, -1):
                shares[i] = amount
                found = fill(j + 1, need - amount, shares)
                if found is not None:
                    return found
            del shares[i]
            return None

        found = fill(0, inst.cost_of(c), {})
        if found is None:
            dead.add(state)
        return found

    return attempt(0, tuple(caps))


def brute_find_mr_charges(inst, funded):
    """Search for charges covering the funded cost with every agent charged
    at most min(budget, utility).  Returns a charge list or None."""
    cost = inst.total_cost(funded)
    caps = [
        min(inst.budgets[i], approved_cost(inst, funded, i))
        for i in range(inst.n)
    ]

    def walk(i, need):
        if i == len(caps):
            return [] if need == 0 else None
        for amount in range(min(caps[i], need), -1, -1):
            rest = walk(i + 1, need - amount)
            if rest is not None:
                return [amount] + rest
        return None

    return walk(0, cost)


def brute_feasible_sets(inst, constraint):
    """All project sets fundable under `constraint` ("NONE", "MR", "IMP")."""
    total = inst.total_budget()
    out = set()
    for funded in subsets_ascending(inst):
        cost = inst.total_cost(funded)
        if cost > total:
            continue
        if constraint == "MR" and brute_find_mr_charges(inst, funded) is None:
            continue
        if constraint == "IMP" and brute_find_payments(inst, funded) is None:
            continue
        out.add(funded)
    return out


def brute_best_alone(inst, agent):
    """Best affordable approved bundle for one agent, canonical tie-break."""
    i = inst.agent_index(agent)
    budget = inst.budgets[i]
    liked = set(inst.approvals[i])
    best_value, best_set = 0, frozenset()
    for funded in subsets_ascending(inst):
        if not funded <= liked:
            continue
        cost = inst.total_cost(funded)
        if cost <= budget and cost > best_value:
            best_value, best_set = cost, funded
    return best_value, best_set


def brute_check_core(inst, out):
    """First blocking coalition in canonical order, or None.

    A coalition blocks with a project set it can afford from pooled budgets
    that gives every member strictly more approved spending than the current
    outcome.  Sets outside the coalition's approval union never help, so only
    those are scanned, mirroring the production search order: ascending
    coalition mask, then ascending project mask.
    """
    current = utilities_of(inst, out.funded)
    for group in range(1, 1 << inst.n):
        members = [i for i in range(inst.n) if group >> i & 1]
        pooled = sum(inst.budgets[i] for i in members)
        union = set()
        for i in members:
            union.update(inst.approvals[i])
        for funded in subsets_ascending(inst):
            if not funded or not funded <= union:
                continue
            if inst.total_cost(funded) > pooled:
                continue
            if all(approved_cost(inst, funded, i) > current[i] for i in members):
                return [inst.agents[i] for i in members], funded
    return None


def _dominates(new, old):
    return all(a >= b for a, b in zip(new, old)) and new != old


def brute_po_pay(inst, out):
    """Exhaustive payment-bounded Pareto check.

    Enumerates every alternative outcome (set plus full charge vector) whose
    total charge is at most the current total, and reports the first
    dominating funded set, or None if the outcome survives.
    """
    spend = sum(out.charges.values())
    current = utilities_of(inst, out.funded)
    for funded in subsets_ascending(inst):
        cost = inst.total_cost(funded)
        if not _dominates(utilities_of(inst, funded), current):
            continue
        for charges in product(*(range(b + 1) for b in inst.budgets)):
            if sum(charges) == cost and sum(charges) <= spend:
                return funded
    return None


def brute_weak_po_pay(inst, out):
    """Like `brute_po_pay` but caps each alternative charge by the agent's
    current charge instead of bounding the total."""
    caps = [out.charges.get(a, 0) for a in inst.agents]
    current = utilities_of(inst, out.funded)
    for funded in subsets_ascending(inst):
        cost = inst.total_cost(funded)
        if not _dominates(utilities_of(inst, funded), current):
            continue
        for charges in product(*(range(min(c, b) + 1) for c, b in zip(caps, inst.budgets))):
            if sum(charges) == cost:
                return funded
    return None


def weak_po_pay_direct(inst, out):
    """Polynomial form of the per-agent payment cap comparison.

    A dominating set is reachable exactly when its cost fits under the sum of
    the current charges; the witness charges are built greedily to prove it.
    """
    caps = [out.charges.get(a, 0) for a in inst.agents]
    current = utilities_of(inst, out.funded)
    for funded in subsets_ascending(inst):
        cost = inst.total_cost(funded)
        if cost > sum(caps):
            continue
        if not _dominates(utilities_of(inst, funded), current):
            continue
        remaining = cost
        charges = []
        for cap in caps:
            take = min(cap, remaining)
            charges.append(take)
            remaining -= take
        assert remaining == 0 and sum(charges) == cost
        return funded
    return None


def brute_solve(inst, welfare, constraint):
    """Reference optimum: scan feasible sets, rank by the welfare objective,
    break ties toward lower cost then canonical order.

    Returns (winning set, all optimal sets in canonical order).
    """
    candidates = []
    for funded in subsets_ascending(inst):
        cost = inst.total_cost(funded)
        if cost > inst.total_budget():
            continue
        if constraint == "MR" and brute_find_mr_charges(inst, funded) is None:
            continue
        if constraint == "IMP" and brute_find_payments(inst, funded) is None:
            continue
        us = utilities_of(inst, funded)
        if welfare == "UTIL":
            key = sum(us)
        elif welfare == "EGAL":
            key = tuple(sorted(us))
        else:
            positives = [u for u in us if u]
            prod = 1
            for u in positives:
                prod *= u
            key = (-(len(us) - len(positives)), prod)
        candidates.append((key, cost, funded))
    best_key = max(key for key, _, _ in candidates)
    optima = [(cost, funded) for key, cost, funded in candidates if key == best_key]
    winner = min(optima, key=lambda pair: pair[0])[1]
    return winner, [funded for _, funded in optima]
