"""Shared fixtures: worked example instances and random corpora.

The named instances are small profiles engineered so particular axioms fail
or particular rules disagree; each docstring states the phenomenon.  The
corpora are deterministic pseudo-random batches used by the property suites
and the acceptance gate.
"""

import time

import pytest

from pfc.axioms import check_all
from pfc.gen import CROWDFUNDING, SHAREHOUSE, Regime, generate
from pfc.experiments import run_batch
from pfc.model import make_instance
from pfc.rules import ALL_RULES, construct_imp_ir_poimp, solve

# Small instances stay within these bounds so exhaustive oracles are cheap.
SMALL = Regime("small", agents=(1, 5), projects=(1, 6), budget=(0, 20), cost=(1, 20))
MICRO = Regime("micro", agents=(1, 4), projects=(1, 4), budget=(0, 6), cost=(1, 6))

EXPERIMENT_SEEDS = 200


@pytest.fixture(scope="session")
def house_example():
    """Five flatmates, six priced improvements; the running demo profile."""
    return make_instance(
        {"a1": 3, "a2": 3, "a3": 3, "a4": 2, "a5": 1},
        {"A": 7, "B": 6, "C": 1, "D": 1, "E": 8, "F": 7},
        {
            "a1": ["A", "C", "E"],
            "a2": ["A", "D", "E"],
            "a3": ["B", "C", "F"],
            "a4": ["B", "D", "F"],
            "a5": ["A", "E"],
        },
    )


@pytest.fixture(scope="session")
def imp_popay_gap():
    """Implementability forces {A,B,C} even though {D,E} dominates at the
    same price, so every IMP-constrained rule misses payment optimality."""
    return make_instance(
        {"a1": 4, "a2": 1, "a3": 1, "a4": 5, "a5": 3},
        {"A": 7, "B": 4, "C": 3, "D": 7, "E": 7},
        {
            "a1": ["B", "E"],
            "a2": ["A", "E"],
            "a3": ["A", "E"],
            "a4": ["A", "D"],
            "a5": ["C", "D"],
        },
    )


@pytest.fixture(scope="session")
def util_manipulable():
    """Truthful profile where hiding one approval flips the utilitarian and
    Nash winners in the manipulator's favour."""
    return make_instance(
        {"a1": 8, "a2": 1, "a3": 10},
        {"X": 10, "Y": 4, "Z": 9},
        {"a1": ["Y", "Z"], "a2": ["Y", "Z"], "a3": ["X", "Y", "Z"]},
    )


@pytest.fixture(scope="session")
def util_manipulable_misreport():
    """The same profile after the third agent drops Y from her report."""
    return make_instance(
        {"a1": 8, "a2": 1, "a3": 10},
        {"X": 10, "Y": 4, "Z": 9},
        {"a1": ["Y", "Z"], "a2": ["Y", "Z"], "a3": ["X", "Z"]},
    )


@pytest.fixture(scope="session")
def egal_manipulable():
    """Truthful profile where hiding one approval flips the egalitarian
    winners in the manipulator's favour."""
    return make_instance(
        {"a1": 1, "a2": 1, "a3": 3},
        {"X": 3, "Y": 2, "Z": 1},
        {"a1": ["Y", "Z"], "a2": ["Y", "Z"], "a3": ["X", "Y"]},
    )


@pytest.fixture(scope="session")
def egal_manipulable_misreport():
    """The same profile after the third agent drops Y from her report."""
    return make_instance(
        {"a1": 1, "a2": 1, "a3": 3},
        {"X": 3, "Y": 2, "Z": 1},
        {"a1": ["Y", "Z"], "a2": ["Y", "Z"], "a3": ["X"]},
    )


@pytest.fixture(scope="session")
def mr_counterexample():
    """Utilitarian and Nash optima drain the second agent for a project she
    does not approve: minimal return and individual rationality both fail."""
    return make_instance(
        {"a1": 10, "a2": 10},
        {"X": 20, "Y": 10},
        {"a1": ["X"], "a2": ["Y"]},
    )


@pytest.fixture(scope="session")
def egal_mr_counterexample():
    """The egalitarian optimum funds both projects but charges the first
    agent more than her utility, breaking minimal return."""
    return make_instance(
        {"a1": 25, "a2": 5},
        {"X": 20, "Y": 10},
        {"a1": ["X"], "a2": ["Y"]},
    )


@pytest.fixture(scope="session")
def egal_ir_counterexample():
    """The egalitarian optimum funds the cheap shared project, yet the first
    agent could do better funding the expensive one alone."""
    return make_instance(
        {"a1": 20, "a2": 5},
        {"X": 20, "Y": 10},
        {"a1": ["X", "Y"], "a2": ["Y"]},
    )


@pytest.fixture(scope="session")
def pomr_counterexample():
    """Only {X} is implementable, but funding everything with all budgets
    satisfies minimal return and dominates it."""
    return make_instance(
        {"a1": 10, "a2": 10, "a3": 2},
        {"X": 10, "Y": 12},
        {"a1": ["X"], "a2": ["X"], "a3": ["Y"]},
    )


@pytest.fixture(scope="session")
def imp_counterexample():
    """Minimal-return rules fund both projects although the cheap one's only
    approver cannot pay for it, so the result is not implementable."""
    return make_instance(
        {"a1": 20, "a2": 20, "a3": 5},
        {"X": 30, "Y": 10},
        {"a1": ["X"], "a2": ["X"], "a3": ["Y"]},
    )


@pytest.fixture(scope="session")
def ir_counterexample():
    """The utilitarian optimum funds {Y,Z}, but the first agent alone could
    buy {W,X} and be strictly happier."""
    return make_instance(
        {"a1": 6, "a2": 11},
        {"W": 3, "X": 3, "Y": 5, "Z": 10},
        {"a1": ["W", "X", "Y"], "a2": ["Y", "Z"]},
    )


@pytest.fixture(scope="session")
def small_corpus():
    """500 deterministic instances with up to 5 agents, 6 projects, money 20."""
    return [generate(SMALL, seed) for seed in range(500)]


@pytest.fixture(scope="session")
def micro_corpus():
    """200 deterministic instances small enough for exhaustive oracles."""
    return [generate(MICRO, seed) for seed in range(200)]


@pytest.fixture(scope="session")
def corpus_verdicts(small_corpus):
    """Every rule outcome and construction on the 500-instance corpus plus
    the full axiom report for each, keyed by rule label."""
    rows = []
    for inst in small_corpus:
        outcomes = {str(rule): solve(inst, rule).outcome for rule in ALL_RULES}
        outcomes["CONSTRUCT"] = construct_imp_ir_poimp(inst).outcome
        reports = {
            label: {report.axiom: report for report in check_all(inst, out)}
            for label, out in outcomes.items()
        }
        rows.append((inst, outcomes, reports))
    return rows


@pytest.fixture(scope="session")
def experiment_data():
    """200-seed run of both regimes; returns (records by regime, seconds)."""
    started = time.monotonic()
    by_regime = {
        regime.name: run_batch(regime, range(EXPERIMENT_SEEDS))
        for regime in (SHAREHOUSE, CROWDFUNDING)
    }
    elapsed = time.monotonic() - started
    return by_regime, elapsed
