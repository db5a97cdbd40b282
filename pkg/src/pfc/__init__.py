"""Exact solver and analysis toolkit for participatory funding coordination.

Agents with individual budgets and approval preferences collectively fund
priced projects.  The package computes welfare-optimal outcomes under
participation constraints, verifies outcome axioms with re-checkable
witnesses, and runs price-of-fairness simulations.
"""

__version__ = "0.1.0"
