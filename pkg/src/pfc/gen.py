"""Random instance generators for the two benchmark regimes.

A regime fixes inclusive integer ranges for the number of agents and
projects, for budgets and costs, and an approval probability.  All draws use
Python's Mersenne Twister seeded with the string "<regime>:<seed>", so a
(regime, seed) pair names one instance forever, independent of platform.

Draw order is part of the contract: agent count, project count, one budget
per agent, one cost per project, then approvals row by row in agent-major
order with one uniform draw per (agent, project) cell.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .model import Instance


@dataclass(frozen=True)
class Regime:
    """Named distribution over instances; bounds are inclusive."""

    name: str
    agents: tuple
    projects: tuple
    budget: tuple
    cost: tuple
    approval_p: float = 0.5


SHAREHOUSE = Regime(
    name="sharehouse",
    agents=(3, 6),
    projects=(5, 12),
    budget=(300, 600),
    cost=(50, 1000),
)

CROWDFUNDING = Regime(
    name="crowdfunding",
    agents=(20, 50),
    projects=(3, 8),
    budget=(0, 400),
    cost=(1000, 10000),
)

REGIMES = {r.name: r for r in (SHAREHOUSE, CROWDFUNDING)}


def project_label(index):
    """Spreadsheet-style label: A..Z, then AA, AB, and so on."""
    letters = string.ascii_uppercase
    label = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        label = letters[rem] + label
    return label


def generate(regime, seed):
    """The instance named by (regime, seed).

    Returns
    -------
    Instance
    """
    rng = random.Random("%s:%d" % (regime.name, seed))
    n = rng.randint(*regime.agents)
    m = rng.randint(*regime.projects)
    budgets = tuple(rng.randint(*regime.budget) for _ in range(n))
    costs = tuple(rng.randint(*regime.cost) for _ in range(m))
    agents = tuple("a%d" % (i + 1) for i in range(n))
    projects = tuple(project_label(j) for j in range(m))
    approvals = tuple(
        tuple(projects[j] for j in range(m) if rng.random() < regime.approval_p)
        for _ in range(n)
    )
    return Instance(
        agents=agents,
        budgets=budgets,
        projects=projects,
        costs=costs,
        approvals=approvals,
    )


def affords_some_not_all(inst):
    """True when the pooled budget covers some project but not all of them."""
    total = inst.total_budget()
    return min(inst.costs) <= total < sum(inst.costs)
