"""Runtime statistics: boxplot estimators and table/CSV emission.

Medians and quartiles use linear interpolation between order statistics
(statistics.quantiles inclusive method); sigma_percent is the sample
coefficient of variation in percent. Censored (timed-out) runs are kept
out of the estimators and only reported as a count.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class RunStatsSummary:
    count: int
    median: float
    lower_quartile: float
    upper_quartile: float
    mean: float
    cv_percent: float
    minimum: float
    maximum: float
    outliers: tuple[float, ...]
    censored_count: int = 0


@dataclass(frozen=True)
class BoxplotSummary:
    minimum: float
    lower_quartile: float
    median: float
    upper_quartile: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    if len(values) == 1:
        v = values[0]
        return v, v, v
    q1, med, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, med, q3


def summarize(times, censored_count: int = 0) -> RunStatsSummary:
    """Boxplot estimators of a positive runtime sample."""
    values = sorted(float(t) for t in times)
    if not values:
        raise EmptySampleError("no uncensored runtimes to summarize")
    q1, med, q3 = _quartiles(values)
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    cv = 100.0 * sd / mean if mean else 0.0
    box = boxplot_summary(values)
    return RunStatsSummary(
        count=len(values),
        median=med,
        lower_quartile=q1,
        upper_quartile=q3,
        mean=mean,
        cv_percent=cv,
        minimum=values[0],
        maximum=values[-1],
        outliers=box.outliers,
        censored_count=censored_count,
    )


def boxplot_summary(times) -> BoxplotSummary:
    """Five-number summary with 1.5*IQR whiskers; points beyond are outliers."""
    values = sorted(float(t) for t in times)
    if not values:
        raise EmptySampleError("no data for a boxplot")
    q1, med, q3 = _quartiles(values)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in values if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in values if v < lo_fence or v > hi_fence)
    return BoxplotSummary(
        minimum=values[0],
        lower_quartile=q1,
        median=med,
        upper_quartile=q3,
        maximum=values[-1],
        whisker_low=inside[0],
        whisker_high=inside[-1],
        outliers=outliers,
    )


TABLE_COLUMNS = ("instance", "count", "median", "q1", "q3", "mean", "sigma_percent")


def to_table(rows) -> str:
    """CSV rows shaped like the runtime-statistics tables.

    rows: iterable of (label, RunStatsSummary).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for label, s in rows:
        writer.writerow(
            [
                label,
                s.count,
                f"{s.median:.1f}",
                f"{s.lower_quartile:.1f}",
                f"{s.upper_quartile:.1f}",
                f"{s.mean:.1f}",
                f"{s.cv_percent:.0f}",
            ]
        )
    return buf.getvalue()


def to_gnuplot(rows) -> str:
    """Boxplot data lines: label min q1 median q3 max [outliers...]."""
    out = []
    for label, s in rows:
        box = (
            f"{label} {s.minimum:g} {s.lower_quartile:g} {s.median:g} "
            f"{s.upper_quartile:g} {s.maximum:g}"
        )
        if s.outliers:
            box += " " + " ".join(f"{v:g}" for v in s.outliers)
        out.append(box)
    return "\n".join(out) + ("\n" if out else "")
