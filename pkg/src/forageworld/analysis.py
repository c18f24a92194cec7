"""Matching-behavior measurements over run logs: occupancy and normalized
matching series, switch-aligned windows, pre/post deltas, inequality and
collection efficiency, and cross-run aggregation."""
from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .logio import LogData

IDEAL_RICH_SHARE = 0.70
DEFAULT_WINDOW_SECONDS = 78.0


@dataclass(frozen=True)
class OccupancySample:
    t: float
    p_pool1: float
    p_pool2: float
    p_outside: float


@dataclass(frozen=True)
class MatchingStats:
    pre_mean: float
    post_mean: float
    delta: float
    undermatching_index: float


def pool_membership(position: Sequence[float],
                    pool_centers: Sequence[Sequence[float]],
                    membership_radius: float) -> int | None:
    """Index of the pool whose center is within membership_radius
    (Euclidean, boundary inclusive), or None. Radii may not overlap."""
    cs = list(pool_centers)
    if len(cs) == 2:
        d = math.dist(cs[0], cs[1])
        if 2 * membership_radius >= d:
            raise ValueError(
                f"membership radius {membership_radius:g} overlaps for centers "
                f"{d:g} apart"
            )
    for i, center in enumerate(cs):
        if math.dist(position, center) <= membership_radius:
            return i
    return None


def occupancy_series(log: LogData, cfg=None) -> list[OccupancySample]:
    """Per-snapshot (in pool 1, in pool 2, outside) proportions."""
    cfg = cfg or log.config
    snaps = log.snapshots
    if not snaps:
        raise ValueError("log contains no snapshots")
    out = []
    for snap in snaps:
        centers = snap["pool_centers"]
        counts = [0, 0, 0]
        for f in snap["foragers"]:
            pool = pool_membership((f["x"], f["y"]), centers, cfg.membership_radius)
            counts[2 if pool is None else pool] += 1
        n = len(snap["foragers"])
        if n == 0:
            raise ValueError("snapshot with zero foragers")
        out.append(OccupancySample(
            t=snap["t"],
            p_pool1=counts[0] / n,
            p_pool2=counts[1] / n,
            p_outside=counts[2] / n,
        ))
    return out


def normalized_matching(p1: float, p2: float) -> float | None:
    """Share of in-pool foragers that are in pool 1; None when both empty."""
    if p1 < 0 or p2 < 0:
        raise ValueError("proportions must be non-negative")
    total = p1 + p2
    if total == 0:
        return None
    return p1 / total


def align_on_switch(series: Sequence[OccupancySample], switch_time: float,
                    window_seconds: float = DEFAULT_WINDOW_SECONDS,
                    ) -> tuple[list[OccupancySample], list[OccupancySample]]:
    """Split into [switch-window, switch) and [switch, switch+window) samples.

    Errors if either window sticks out of the recorded span.
    """
    if not series:
        raise ValueError("empty series")
    t0 = series[0].t
    t_last = series[-1].t
    cadence = (series[1].t - series[0].t) if len(series) > 1 else 0.0
    if switch_time - window_seconds < t0 - 1e-9:
        raise ValueError(
            f"pre window [{switch_time - window_seconds:g}, {switch_time:g}) "
            f"starts before the first sample at t={t0:g}"
        )
    if switch_time + window_seconds > t_last + cadence + 1e-9:
        raise ValueError(
            f"post window ends at {switch_time + window_seconds:g} but the "
            f"log ends at t={t_last:g}"
        )
    pre = [s for s in series
           if switch_time - window_seconds - 1e-9 <= s.t < switch_time - 1e-9]
    post = [s for s in series
            if switch_time - 1e-9 <= s.t < switch_time + window_seconds - 1e-9]
    return pre, post


def matching_stats(series: Sequence[OccupancySample], switch_time: float,
                   initially_rich: int,
                   window_seconds: float = DEFAULT_WINDOW_SECONDS,
                   ideal_share: float = IDEAL_RICH_SHARE) -> MatchingStats:
    """Mean normalized proportion in the initially-rich pool before and after
    the switch; samples with nobody in either pool are skipped."""
    pre, post = align_on_switch(series, switch_time, window_seconds)
    means = []
    for name, samples in (("pre", pre), ("post", post)):
        values = []
        for s in samples:
            in_rich = s.p_pool1 if initially_rich == 0 else s.p_pool2
            other = s.p_pool2 if initially_rich == 0 else s.p_pool1
            m = normalized_matching(in_rich, other)
            if m is not None:
                values.append(m)
        if not values:
            raise ValueError(f"every sample in the {name} window is undefined")
        means.append(statistics.fmean(values))
    pre_mean, post_mean = means
    return MatchingStats(
        pre_mean=pre_mean,
        post_mean=post_mean,
        delta=pre_mean - post_mean,
        undermatching_index=pre_mean - ideal_share,
    )


def gini(totals: Sequence[float]) -> float:
    """Gini coefficient of per-forager collection totals, in [0, 1).

    Equals the mean absolute pairwise difference over twice the mean; an
    all-zero vector is defined as perfectly equal (0).
    """
    n = len(totals)
    if n == 0:
        raise ValueError("gini of an empty vector")
    if any(x < 0 for x in totals):
        raise ValueError("totals must be non-negative")
    total = sum(totals)
    if total == 0:
        return 0.0
    # Sorted form of the pairwise-difference sum; exact for integer totals.
    numerator = sum((2 * i - n - 1) * x
                    for i, x in enumerate(sorted(totals), start=1))
    return numerator / (n * total)


def efficiency(log: LogData) -> float:
    """Fraction of spawned pellets that were collected by game end."""
    spawned = sum(1 for _ in log.of_kind("spawn"))
    if spawned == 0:
        raise ValueError("log has no spawn events")
    collected = sum(ev["pellets"] for ev in log.of_kind("collect"))
    return collected / spawned


def aggregate_runs(runs: Sequence[MatchingStats]) -> dict[str, tuple[float, float]]:
    """Per-field arithmetic mean and sample standard deviation (0 for n=1)."""
    if not runs:
        raise ValueError("no runs to aggregate")
    out = {}
    for name in ("pre_mean", "post_mean", "delta", "undermatching_index"):
        values = [getattr(r, name) for r in runs]
        sd = statistics.stdev(values) if len(values) > 1 else 0.0
        out[name] = (statistics.fmean(values), sd)
    return out


# ----- per-log pipeline and CSV emission -----

RUN_CSV_FIELDS = ("run_id", "condition", "switch_time", "pre_mean", "post_mean",
                  "delta", "undermatching_index", "gini", "efficiency")
SERIES_CSV_FIELDS = ("run_id", "condition", "t", "p_pool1", "p_pool2",
                     "p_outside", "normalized_rich")


def analyze_log(log: LogData, run_id: str,
                window_seconds: float = DEFAULT_WINDOW_SECONDS) -> dict:
    """Everything the per-run summary row needs, computed from one log."""
    cfg = log.config
    switch_ev = log.switch_event()
    if switch_ev is None:
        raise ValueError("log has no switch event")
    switch_time = switch_ev["t"]
    snaps = log.snapshots
    if not snaps:
        raise ValueError("log contains no snapshots")
    initially_rich = snaps[0]["rich_pool"]

    series = occupancy_series(log)
    stats = matching_stats(series, switch_time, initially_rich, window_seconds,
                           ideal_share=cfg.rich_share)
    totals = [f["score"] for f in snaps[-1]["foragers"]]
    return {
        "run_id": run_id,
        "condition": cfg.condition.label,
        "switch_time": switch_time,
        "pre_mean": stats.pre_mean,
        "post_mean": stats.post_mean,
        "delta": stats.delta,
        "undermatching_index": stats.undermatching_index,
        "gini": gini(totals),
        "efficiency": efficiency(log),
        "_stats": stats,
        "_series": series,
        "_initially_rich": initially_rich,
    }


def write_runs_csv(rows: Iterable[dict], path: str | Path) -> None:
    rows = sorted(rows, key=lambda r: (r["condition"], r["run_id"]))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_CSV_FIELDS)
        for r in rows:
            w.writerow([r[k] for k in RUN_CSV_FIELDS])


def write_series_csv(rows: Iterable[dict], path: str | Path) -> None:
    rows = sorted(rows, key=lambda r: (r["condition"], r["run_id"]))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_CSV_FIELDS)
        for r in rows:
            rich_first = r["_initially_rich"] == 0
            for s in r["_series"]:
                in_rich = s.p_pool1 if rich_first else s.p_pool2
                other = s.p_pool2 if rich_first else s.p_pool1
                m = normalized_matching(in_rich, other)
                w.writerow([r["run_id"], r["condition"], s.t, s.p_pool1,
                            s.p_pool2, s.p_outside, "" if m is None else m])


def write_aggregate_csv(rows: Iterable[dict], path: str | Path) -> None:
    """One row per condition: n plus mean/sd of every summary field."""
    groups: dict[str, list[dict]] = {}
    for r in rows:
        groups.setdefault(r["condition"], []).append(r)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        header = ["condition", "n_runs"]
        for name in ("pre_mean", "post_mean", "delta", "undermatching_index",
                     "gini", "efficiency"):
            header += [f"{name}_mean", f"{name}_sd"]
        w.writerow(header)
        for cond in sorted(groups):
            rs = groups[cond]
            agg = aggregate_runs([r["_stats"] for r in rs])
            row: list = [cond, len(rs)]
            for name in ("pre_mean", "post_mean", "delta", "undermatching_index"):
                row += list(agg[name])
            for name in ("gini", "efficiency"):
                values = [r[name] for r in rs]
                sd = statistics.stdev(values) if len(values) > 1 else 0.0
                row += [statistics.fmean(values), sd]
            w.writerow(row)
