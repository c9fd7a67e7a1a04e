"""Quality estimates with standard errors from a judged sample.

Each estimator is a class-restricted weighted mean of an indicator (or
of label·indicator for the precision delta) multiplied by the exact
class weight total. Standard errors scale by the same multiplier; sums
of independent estimates combine by root-sum-square.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Iterator, Mapping

from .errors import (
    EmptySampleError,
    StratifiedSampleUnsupportedError,
    UnestimableClassError,
)
from .judgements import JudgedSample
from .pairs import PairClass, PairTotals

DISTANCE_METRICS = ("good_split_distance", "bad_split_distance",
                    "good_merge_distance", "bad_merge_distance",
                    "good_distance", "bad_distance")
INDEX_METRICS = ("affected_good_index", "affected_bad_index")


@dataclass(frozen=True)
class EstimateReport:
    metric: str
    point: float
    std_err: float
    ci_low: float
    ci_high: float
    effective_sample_size: float
    n_draws: int
    n_usable: int
    multiplier: float
    notes: str = ""


def z_value(confidence: float) -> float:
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def weighted_sample_stats(values_weights: Iterable[tuple[float, float]]
                          ) -> tuple[float, float, float]:
    """(mean, standard error of the mean, effective sample size).

    The effective sample size is (Σw)²/Σw², which reduces to n for equal
    weights; the error term then matches the ordinary stderr formula.
    """
    sw = swv = sww = 0.0
    pairs = list(values_weights)
    if not pairs:
        raise EmptySampleError("no observations")
    for v, w in pairs:
        if w <= 0.0:
            raise EmptySampleError(f"nonpositive observation weight {w}")
        sw += w
        swv += w * v
        sww += w * w
    n_eff = (sw * sw) / sww
    if all(v == pairs[0][0] for v, _ in pairs):
        return pairs[0][0], 0.0, n_eff
    mean = swv / sw
    var_sum = sum(w * (v - mean) ** 2 for v, w in pairs)
    if var_sum == 0.0 or n_eff <= 1.0:
        return mean, 0.0 if var_sum == 0.0 else math.inf, n_eff
    std_err = math.sqrt(var_sum / sw / (n_eff - 1.0))
    return mean, std_err, n_eff


def _scaled_report(metric: str, mean: float, std_err: float, n_eff: float,
                   n_draws: int, n_usable: int, multiplier: float,
                   z: float, notes: str = "") -> EstimateReport:
    point = mean * multiplier
    err = std_err * multiplier
    return EstimateReport(metric, point, err, point - z * err, point + z * err,
                          n_eff, n_draws, n_usable, multiplier, notes)


def _exact_zero(metric: str, notes: str) -> EstimateReport:
    return EstimateReport(metric, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0, 0.0, notes)


def _class_observations(js: JudgedSample, classes: tuple[PairClass, ...],
                        good_when_equivalent: bool):
    """(indicator, weight) stream over usable draws of the given classes."""
    obs = []
    n_draws = n_usable = 0
    for d in js.sample_set.draws:
        if d.pair.pair_class not in classes:
            continue
        n_draws += d.count
        if not js.usable(d.pair):
            continue
        n_usable += d.count
        same = js.is_equivalent(d.pair)
        value = 1.0 if same == good_when_equivalent else 0.0
        obs.append((value, d.weight * js.reweight(d.pair)))
    return obs, n_draws, n_usable


def _estimate_class(js: JudgedSample, metric: str, classes: tuple[PairClass, ...],
                    good_when_equivalent: bool, total: float,
                    z: float) -> EstimateReport:
    if total == 0.0:
        return _exact_zero(metric, "class has no weight; exact zero")
    obs, n_draws, n_usable = _class_observations(js, classes, good_when_equivalent)
    if not obs:
        raise UnestimableClassError(
            f"{metric}: no usable draws in class(es) {[c.value for c in classes]}")
    mean, std_err, n_eff = weighted_sample_stats(obs)
    return _scaled_report(metric, mean, std_err, n_eff, n_draws, n_usable, total, z)


def estimate_distance_quality(js: JudgedSample, totals: PairTotals,
                              confidence: float = 0.95) -> dict[str, EstimateReport]:
    """Good/bad split, merge, and combined distance estimates.

    Split and merge subsamples are disjoint, hence independent, so the
    combined estimates use root-sum-square standard errors.
    """
    z = z_value(confidence)
    reports = {
        "good_split_distance": _estimate_class(
            js, "good_split_distance", (PairClass.SPLIT,), False, totals.split_total, z),
        "bad_split_distance": _estimate_class(
            js, "bad_split_distance", (PairClass.SPLIT,), True, totals.split_total, z),
        "good_merge_distance": _estimate_class(
            js, "good_merge_distance", (PairClass.MERGE,), True, totals.merge_total, z),
        "bad_merge_distance": _estimate_class(
            js, "bad_merge_distance", (PairClass.MERGE,), False, totals.merge_total, z),
    }
    for combined, split_part, merge_part in [
            ("good_distance", "good_split_distance", "good_merge_distance"),
            ("bad_distance", "bad_split_distance", "bad_merge_distance")]:
        a, b = reports[split_part], reports[merge_part]
        point = a.point + b.point
        err = math.hypot(a.std_err, b.std_err)
        reports[combined] = EstimateReport(
            combined, point, err, point - z * err, point + z * err,
            min(a.effective_sample_size, b.effective_sample_size),
            a.n_draws + b.n_draws, a.n_usable + b.n_usable,
            totals.split_total + totals.merge_total,
            "sum of independent split and merge estimates")
    return reports


def estimate_index_quality(js: JudgedSample, totals: PairTotals,
                           confidence: float = 0.95) -> dict[str, EstimateReport]:
    """Affected good/bad index estimates from the stable-pair draws."""
    z = z_value(confidence)
    return {
        "affected_good_index": _estimate_class(
            js, "affected_good_index", (PairClass.STABLE,), True, totals.stable_total, z),
        "affected_bad_index": _estimate_class(
            js, "affected_bad_index", (PairClass.STABLE,), False, totals.stable_total, z),
    }


def estimate_delta_precision(js: JudgedSample, totals: PairTotals,
                             confidence: float = 0.95) -> EstimateReport:
    """Precision-delta estimate from a single-stratum sample of all pairs.

    Under stratification the mixed-class sample mean no longer matches
    the draw distribution, so the estimate is refused rather than
    silently biased.
    """
    z = z_value(confidence)
    multiplier = totals.delta_precision_multiplier
    if multiplier == 0.0:
        return _exact_zero("delta_precision", "no pairs; exact zero")
    if not js.sample_set.is_single_stratum():
        raise StratifiedSampleUnsupportedError(
            "delta_precision needs a single-stratum sample over all pairs")
    obs = []
    n_draws = n_usable = 0
    for d in js.sample_set.draws:
        n_draws += d.count
        if not js.usable(d.pair):
            continue
        n_usable += d.count
        value = d.pair.label if js.is_equivalent(d.pair) else 0.0
        obs.append((value, d.weight * js.reweight(d.pair)))
    if not obs:
        raise UnestimableClassError("delta_precision: no usable draws")
    mean, std_err, n_eff = weighted_sample_stats(obs)
    return _scaled_report("delta_precision", mean, std_err, n_eff,
                          n_draws, n_usable, multiplier, z)


@dataclass(frozen=True)
class QualitySummary:
    """The six expected per-affected-item quality metrics plus the overall ones."""

    affected_reports: tuple[EstimateReport, ...]
    overall_reports: tuple[EstimateReport, ...]


def quality_summary(reports: Iterable[EstimateReport]) -> QualitySummary:
    reports = list(reports)
    overall_names = {"good_distance", "bad_distance", "affected_good_index",
                     "affected_bad_index", "delta_precision"}
    return QualitySummary(
        tuple(r for r in reports if r.metric.startswith("affected_expected_")),
        tuple(r for r in reports if r.metric in overall_names))


def estimate_all(js: JudgedSample, totals: PairTotals,
                 affected_weight_fraction: float,
                 confidence: float = 0.95) -> list[EstimateReport]:
    """The full estimate suite; metrics that cannot be estimated become
    no-estimate rows instead of failing the whole report."""
    reports: list[EstimateReport] = []

    def guarded(fn, *metrics):
        try:
            result = fn()
        except (UnestimableClassError, StratifiedSampleUnsupportedError) as exc:
            nan = float("nan")
            for m in metrics:
                reports.append(EstimateReport(m, nan, nan, nan, nan, 0.0, 0, 0,
                                              nan, f"no estimate: {exc}"))
            return
        if isinstance(result, EstimateReport):
            reports.append(result)
        else:
            reports.extend(result[m] for m in metrics)

    guarded(lambda: estimate_distance_quality(js, totals, confidence), *DISTANCE_METRICS)
    guarded(lambda: estimate_index_quality(js, totals, confidence), *INDEX_METRICS)
    guarded(lambda: estimate_delta_precision(js, totals, confidence), "delta_precision")

    # expected quality situation of one affected item: rescale the overall
    # estimates by total/affected weight (unaffected items contribute zero)
    if affected_weight_fraction > 0.0:
        scale = 1.0 / affected_weight_fraction
        rescale_from = {
            "good_split_distance": "affected_expected_good_split_distance",
            "bad_split_distance": "affected_expected_bad_split_distance",
            "good_merge_distance": "affected_expected_good_merge_distance",
            "bad_merge_distance": "affected_expected_bad_merge_distance",
            "affected_good_index": "affected_expected_good_index",
            "affected_bad_index": "affected_expected_bad_index",
        }
        for rep in list(reports):
            name = rescale_from.get(rep.metric)
            if name is None or math.isnan(rep.point):
                continue
            reports.append(replace(
                rep, metric=name, point=rep.point * scale,
                std_err=rep.std_err * scale, ci_low=rep.ci_low * scale,
                ci_high=rep.ci_high * scale, multiplier=rep.multiplier * scale,
                notes="overall estimate rescaled to the affected population"))
    return reports


# ---------------------------------------------------------------------------
# persistence

def _jsonable(x: float):
    return None if math.isnan(x) else x


def report_record(rep: EstimateReport) -> dict:
    return {"metric": rep.metric, "point": _jsonable(rep.point),
            "std_err": _jsonable(rep.std_err),
            "ci_low": _jsonable(rep.ci_low), "ci_high": _jsonable(rep.ci_high),
            "effective_sample_size": rep.effective_sample_size,
            "n_draws": rep.n_draws, "n_usable": rep.n_usable,
            "multiplier": _jsonable(rep.multiplier), "notes": rep.notes}


def write_estimates(reports: Iterable[EstimateReport], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(json.dumps(report_record(rep), sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_estimates(path: str | Path) -> Iterator[EstimateReport]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            nan = float("nan")

            def num(key):
                return nan if rec[key] is None else float(rec[key])

            yield EstimateReport(rec["metric"], num("point"), num("std_err"),
                                 num("ci_low"), num("ci_high"),
                                 rec["effective_sample_size"], rec["n_draws"],
                                 rec["n_usable"], num("multiplier"),
                                 rec.get("notes", ""))
