"""Listener-rating ingestion, aggregation, and group statistics.

Ratings arrive as CSV rows (participant, group, trigger label, algorithm,
0-100 triggerability).  Aggregation produces per-cell means and two
variants of the overall mean — over raw ratings and over per-trigger
means — because published overall rows are ambiguous about weighting.
Analysis runs one-sided Welch tests (neurodivergent > control) per
algorithm, Benjamini-Hochberg correction across algorithms, and
bootstrap CIs per algorithm/group.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from hushlab.errors import ConfigError
from hushlab.metrics import bh_adjust, bootstrap_ci, welch_t_test

RATINGS_HEADER = ("participant_id", "group", "trigger", "algorithm", "rating")

_GROUP_ALIASES = {
    "neurodivergent": "neurodivergent", "n": "neurodivergent",
    "control": "control", "c": "control",
}


@dataclass(frozen=True)
class Rating:
    participant_id: str
    group: str  # "neurodivergent" | "control"
    trigger: str
    algorithm: str
    rating: float


@dataclass(frozen=True)
class RatingsTable:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def algorithms(self) -> tuple:
        return tuple(sorted({r.algorithm for r in self.rows}))

    @property
    def triggers(self) -> tuple:
        return tuple(sorted({r.trigger for r in self.rows}))

    @classmethod
    def from_csv(cls, path) -> "RatingsTable":
        """Load a ratings table.

        The header must be exactly ``participant_id,group,trigger,
        algorithm,rating``; groups accept the long names or the N/C
        shorthand; ratings must lie in [0, 100].  Violations raise
        ``ConfigError`` naming the offending row.
        """
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: empty ratings file") from None
            if tuple(h.strip() for h in header) != RATINGS_HEADER:
                raise ConfigError(
                    f"{path}: header must be {','.join(RATINGS_HEADER)}, "
                    f"got {','.join(header)}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 5:
                    raise ConfigError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
                pid, group, trigger, algorithm, rating_s = (f.strip() for f in row)
                norm = _GROUP_ALIASES.get(group.lower())
                if norm is None:
                    raise ConfigError(
                        f"{path}:{lineno}: group must be neurodivergent/control "
                        f"(or N/C), got {group!r}"
                    )
                try:
                    rating = float(rating_s)
                except ValueError:
                    raise ConfigError(f"{path}:{lineno}: rating {rating_s!r} is not a number") from None
                if not 0.0 <= rating <= 100.0:
                    raise ConfigError(f"{path}:{lineno}: rating {rating} outside [0, 100]")
                rows.append(Rating(pid, norm, trigger, algorithm, rating))
        return cls(tuple(rows))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RATINGS_HEADER)
            for r in self.rows:
                writer.writerow([r.participant_id, r.group, r.trigger,
                                 r.algorithm, repr(r.rating)])


@dataclass(frozen=True)
class RatingsSummary:
    """Aggregated means; missing cells are simply absent from the dicts."""

    cell_means: dict  # (algorithm, group, trigger) -> mean rating
    overall_raw: dict  # (algorithm, group) -> mean over raw ratings
    overall_by_trigger: dict  # (algorithm, group) -> mean of per-trigger means


def aggregate_ratings(table: RatingsTable) -> RatingsSummary:
    """Per-cell and overall mean ratings.

    Returns both overall-mean weightings: ``overall_raw`` averages every
    rating equally, ``overall_by_trigger`` averages the per-trigger means
    (each trigger weighted equally regardless of rating count).
    """
    if len(table) == 0:
        raise ValueError("ratings table is empty")
    cells = defaultdict(list)
    raw = defaultdict(list)
    for r in table.rows:
        cells[(r.algorithm, r.group, r.trigger)].append(r.rating)
        raw[(r.algorithm, r.group)].append(r.rating)
    cell_means = {k: float(np.mean(v)) for k, v in cells.items()}
    overall_raw = {k: float(np.mean(v)) for k, v in raw.items()}
    by_trigger = defaultdict(list)
    for (algorithm, group, _trigger), mean in cell_means.items():
        by_trigger[(algorithm, group)].append(mean)
    overall_by_trigger = {k: float(np.mean(v)) for k, v in by_trigger.items()}
    return RatingsSummary(cell_means, overall_raw, overall_by_trigger)


def _stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class GroupComparison:
    algorithm: str
    mean_n: float
    mean_c: float
    delta: float  # mean_n - mean_c
    p_value: float
    p_adjusted: float
    stars: str


@dataclass(frozen=True)
class RatingsAnalysis:
    summary: RatingsSummary
    comparisons: tuple  # GroupComparison per algorithm with both groups
    cis: dict  # (algorithm, group) -> (lo, hi) bootstrap CI of the mean


def analyze_ratings(table: RatingsTable, n_boot: int = 2000,
                    level: float = 0.95, seed: int = 0) -> RatingsAnalysis:
    """Full analysis: means, N-vs-C Welch tests with BH correction, CIs.

    Tests are one-sided (neurodivergent rating higher than control),
    corrected across algorithms; stars mark adjusted p below
    0.05 / 0.01 / 0.001.  Algorithms lacking two ratings in either group
    are skipped in the comparisons (still present in the summary).
    """
    summary = aggregate_ratings(table)
    per_group = defaultdict(list)
    for r in table.rows:
        per_group[(r.algorithm, r.group)].append(r.rating)

    testable = []
    p_values = []
    for algorithm in table.algorithms:
        a = per_group.get((algorithm, "neurodivergent"), [])
        b = per_group.get((algorithm, "control"), [])
        if len(a) >= 2 and len(b) >= 2:
            testable.append(algorithm)
            p_values.append(welch_t_test(a, b, alternative="greater"))
    adjusted = bh_adjust(p_values) if p_values else []

    comparisons = []
    for algorithm, p, q in zip(testable, p_values, adjusted):
        mean_n = summary.overall_raw[(algorithm, "neurodivergent")]
        mean_c = summary.overall_raw[(algorithm, "control")]
        comparisons.append(GroupComparison(
            algorithm=algorithm, mean_n=mean_n, mean_c=mean_c,
            delta=mean_n - mean_c, p_value=p, p_adjusted=q, stars=_stars(q),
        ))

    cis = {}
    for i, (key, values) in enumerate(sorted(per_group.items())):
        cis[key] = bootstrap_ci(values, n_boot=n_boot, level=level,
                                seed=seed + i)
    return RatingsAnalysis(summary, tuple(comparisons), cis)


def render_analysis(analysis: RatingsAnalysis) -> str:
    """Plain-text table: triggers x (algorithm, group) means, overall rows
    in both weightings, then the group comparisons with significance."""
    summary = analysis.summary
    algorithms = sorted(
        {a for a, _g in summary.overall_raw},
        key=lambda a: -summary.overall_raw.get((a, "neurodivergent"), float("-inf")),
    )
    triggers = sorted({t for _a, _g, t in summary.cell_means})
    groups = ("neurodivergent", "control")

    width = max([len("overall (by trigger)")] + [len(t) for t in triggers]) + 2
    header = "".join(f"{a + '/' + g[0].upper():>12}" for a in algorithms for g in groups)
    lines = [f"{'trigger':<{width}}" + header]
    for t in triggers:
        cells = []
        for a in algorithms:
            for g in groups:
                mean = summary.cell_means.get((a, g, t))
                cells.append(f"{mean:>12.2f}" if mean is not None else f"{'-':>12}")
        lines.append(f"{t:<{width}}" + "".join(cells))
    for label, table in (("overall (raw)", summary.overall_raw),
                         ("overall (by trigger)", summary.overall_by_trigger)):
        cells = []
        for a in algorithms:
            for g in groups:
                mean = table.get((a, g))
                cells.append(f"{mean:>12.2f}" if mean is not None else f"{'-':>12}")
        lines.append(f"{label:<{width}}" + "".join(cells))

    if analysis.comparisons:
        lines.append("")
        lines.append(f"{'algorithm':<14}{'mean N':>10}{'mean C':>10}{'delta':>10}"
                     f"{'p':>12}{'p(BH)':>12}  sig")
        for c in analysis.comparisons:
            lines.append(f"{c.algorithm:<14}{c.mean_n:>10.2f}{c.mean_c:>10.2f}"
                         f"{c.delta:>10.2f}{c.p_value:>12.4g}{c.p_adjusted:>12.4g}"
                         f"  {c.stars}")
    return "\n".join(lines)
