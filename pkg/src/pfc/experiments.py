"""Price-of-fairness experiment: per-instance records and bootstrap summary.

For every generated instance all nine rules are solved.  Each (instance,
rule) pair becomes one CSV record holding the funded count, the utilitarian
welfare, the minimum utility, and the two price ratios:

* ``ratio_util``: the rule's utilitarian welfare over the unconstrained
  utilitarian optimum of the same instance;
* ``ratio_egal``: the rule's minimum utility over the unconstrained
  egalitarian optimum's minimum utility.

A zero denominator means the optimum itself is zero, so the ratio is defined
as 1.0; constrained rules can never beat the unconstrained optimum, hence
both ratios live in [0, 1].  Floats are serialized with `repr` so they parse
back to the identical value and downstream consumers can reproduce every
aggregate exactly.

Each solve runs under a cooperative per-solve deadline.  A timed-out solve
yields a zeroed record with ``timeout`` 1; if a baseline solve times out the
whole instance is recorded as timed out, because no ratio is well defined
without it.  Summary means exclude timed-out records.

Summary rows report, per (regime, rule, metric), the record count, timeout
count, mean ratio, worst ratio, and a bootstrap half-width: B = 1000
resampled means, half the distance between their 5th and 95th percentiles,
seeded by the string "bootstrap:<regime>:<rule>:<metric>".
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass

from .axioms import DEFAULT_CAPS
from .gen import generate
from .model import InputError
from .rules import ALL_RULES, Constraint, RuleId, SolveTimeout, Welfare, solve

RULE_ORDER = tuple(str(rule) for rule in ALL_RULES)

BASELINE_UTIL = RuleId(Welfare.UTIL, Constraint.NONE)
BASELINE_EGAL = RuleId(Welfare.EGAL, Constraint.NONE)

RECORD_FIELDS = (
    "regime",
    "seed",
    "n",
    "m",
    "rule",
    "funded_count",
    "util_welfare",
    "egal_min",
    "ratio_util",
    "ratio_egal",
    "millis",
    "timeout",
)

SUMMARY_FIELDS = (
    "regime",
    "rule",
    "metric",
    "count",
    "timeouts",
    "mean",
    "min",
    "half_width",
)

BOOTSTRAP_SAMPLES = 1000


@dataclass(frozen=True)
class ExperimentRecord:
    """One rule solved on one generated instance."""

    regime: str
    seed: int
    n: int
    m: int
    rule: str
    funded_count: int
    util_welfare: int
    egal_min: int
    ratio_util: float
    ratio_egal: float
    millis: int
    timeout: int

    def to_row(self):
        return [
            self.regime,
            str(self.seed),
            str(self.n),
            str(self.m),
            self.rule,
            str(self.funded_count),
            str(self.util_welfare),
            str(self.egal_min),
            repr(self.ratio_util),
            repr(self.ratio_egal),
            str(self.millis),
            str(self.timeout),
        ]


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of one ratio metric for one rule in one regime."""

    regime: str
    rule: str
    metric: str
    count: int
    timeouts: int
    mean: float
    minimum: float
    half_width: float

    def to_row(self):
        return [
            self.regime,
            self.rule,
            self.metric,
            str(self.count),
            str(self.timeouts),
            repr(self.mean),
            repr(self.minimum),
            repr(self.half_width),
        ]


def _ratio(value, optimum):
    if optimum == 0:
        return 1.0
    return value / optimum


def run_instance(regime_name, seed, inst, time_budget=60.0, caps=DEFAULT_CAPS, rules=ALL_RULES):
    """Records for the requested rules on one instance, in rule order.

    The two unconstrained baselines are solved even when not requested,
    because every record's ratios are measured against them.
    """
    wanted = [str(rule) for rule in rules]
    to_solve = list(dict.fromkeys(list(rules) + [BASELINE_UTIL, BASELINE_EGAL]))
    results = {}
    elapsed = {}
    for rule in to_solve:
        start = time.monotonic()
        try:
            results[str(rule)] = solve(
                inst, rule, caps=caps, deadline=start + time_budget
            )
        except SolveTimeout:
            results[str(rule)] = None
        elapsed[str(rule)] = int(round((time.monotonic() - start) * 1000))
    base_util = results[str(BASELINE_UTIL)]
    base_egal = results[str(BASELINE_EGAL)]
    timed_out = base_util is None or base_egal is None
    records = []
    for name in RULE_ORDER:
        if name not in wanted:
            continue
        result = results[name]
        if timed_out or result is None:
            records.append(
                ExperimentRecord(
                    regime=regime_name,
                    seed=seed,
                    n=inst.n,
                    m=inst.m,
                    rule=name,
                    funded_count=0,
                    util_welfare=0,
                    egal_min=0,
                    ratio_util=0.0,
                    ratio_egal=0.0,
                    millis=elapsed[name],
                    timeout=1,
                )
            )
            continue
        util = result.welfare.util_total
        egal = result.welfare.sorted_utilities[0]
        records.append(
            ExperimentRecord(
                regime=regime_name,
                seed=seed,
                n=inst.n,
                m=inst.m,
                rule=name,
                funded_count=len(result.outcome.funded),
                util_welfare=util,
                egal_min=egal,
                ratio_util=_ratio(util, base_util.welfare.util_total),
                ratio_egal=_ratio(egal, base_egal.welfare.sorted_utilities[0]),
                millis=elapsed[name],
                timeout=0,
            )
        )
    return records


def run_batch(
    regime, seeds, rules=ALL_RULES, time_budget=60.0, caps=DEFAULT_CAPS, progress=None
):
    """All records for `regime` over `seeds`, in seed-major order."""
    records = []
    for seed in seeds:
        inst = generate(regime, seed)
        records.extend(
            run_instance(
                regime.name,
                seed,
                inst,
                time_budget=time_budget,
                caps=caps,
                rules=rules,
            )
        )
        if progress is not None:
            progress(regime.name, seed)
    return records


def write_records(path, records):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for record in records:
            writer.writerow(record.to_row())


def write_csv(rows, path):
    """Write records or summary rows to `path`, inferred from the row type."""
    if rows and isinstance(rows[0], SummaryRow):
        write_summary(path, rows)
    else:
        write_records(path, rows)


def read_records(path):
    records = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(RECORD_FIELDS):
            raise ValueError("unexpected records header: %r" % (reader.fieldnames,))
        for row in reader:
            records.append(
                ExperimentRecord(
                    regime=row["regime"],
                    seed=int(row["seed"]),
                    n=int(row["n"]),
                    m=int(row["m"]),
                    rule=row["rule"],
                    funded_count=int(row["funded_count"]),
                    util_welfare=int(row["util_welfare"]),
                    egal_min=int(row["egal_min"]),
                    ratio_util=float(row["ratio_util"]),
                    ratio_egal=float(row["ratio_egal"]),
                    millis=int(row["millis"]),
                    timeout=int(row["timeout"]),
                )
            )
    return records


def bootstrap_half_width(values, seed_key):
    """Half the 5th-to-95th percentile spread of resampled means."""
    if not values:
        return 0.0
    rng = random.Random(seed_key)
    size = len(values)
    means = []
    for _ in range(BOOTSTRAP_SAMPLES):
        sample = [values[rng.randrange(size)] for _ in range(size)]
        means.append(math.fsum(sample) / size)
    means.sort()
    low = means[int(0.05 * (BOOTSTRAP_SAMPLES - 1))]
    high = means[int(0.95 * (BOOTSTRAP_SAMPLES - 1))]
    return (high - low) / 2


def summarize(records):
    """Summary rows grouped by regime, rule, and metric.

    Regimes keep first-appearance order; rules follow RULE_ORDER; the util
    metric precedes the egal metric.
    """
    records = list(records)
    if not records:
        raise InputError("no records to summarize")
    regimes = []
    present = set()
    for record in records:
        if record.regime not in regimes:
            regimes.append(record.regime)
        present.add((record.regime, record.rule))
    rows = []
    for regime in regimes:
        for rule in RULE_ORDER:
            if (regime, rule) not in present:
                continue
            group = [r for r in records if r.regime == regime and r.rule == rule]
            kept = [r for r in group if not r.timeout]
            timeouts = len(group) - len(kept)
            for metric in ("util", "egal"):
                values = [
                    r.ratio_util if metric == "util" else r.ratio_egal for r in kept
                ]
                if values:
                    mean = math.fsum(values) / len(values)
                    minimum = min(values)
                else:
                    mean = 0.0
                    minimum = 0.0
                rows.append(
                    SummaryRow(
                        regime=regime,
                        rule=rule,
                        metric=metric,
                        count=len(values),
                        timeouts=timeouts,
                        mean=mean,
                        minimum=minimum,
                        half_width=bootstrap_half_width(
                            values, "bootstrap:%s:%s:%s" % (regime, rule, metric)
                        ),
                    )
                )
    return rows


def write_summary(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        for row in rows:
            writer.writerow(row.to_row())


def read_summary(path):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(SUMMARY_FIELDS):
            raise ValueError("unexpected summary header: %r" % (reader.fieldnames,))
        for row in reader:
            rows.append(
                SummaryRow(
                    regime=row["regime"],
                    rule=row["rule"],
                    metric=row["metric"],
                    count=int(row["count"]),
                    timeouts=int(row["timeouts"]),
                    mean=float(row["mean"]),
                    minimum=float(row["min"]),
                    half_width=float(row["half_width"]),
                )
            )
    return rows
