"""Monte-Carlo calibration harness: are the estimators unbiased and are
their confidence intervals honest?

Runs the real pipeline (sample, judge, estimate) many times against a
synthetic instance with full ground truth and compares the estimate
distribution with the brute-force oracle values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._rng import keyed
from .errors import UnestimableClassError
from .judgements import export_tasks, ingest_verdicts, synthetic_judge
from .model import affected_partition
from .oracle import ExactMetrics, SyntheticInstance, exact_metrics
from .pairs import enumerate_pairs, pair_totals
from .sampling import SamplePlan, SingleStratum, sample

CALIBRATION_METRICS = ("good_split_distance", "good_merge_distance",
                       "affected_good_index", "delta_precision")


@dataclass(frozen=True)
class MetricCalibration:
    metric: str
    oracle_value: float
    empirical_mean: float
    bias: float
    stderr_of_mean: float
    bias_sigmas: float
    mean_reported_stderr: float
    coverage: float | None  # None when repetitions < 2
    repetitions: int

    @property
    def unbiased_at_3_sigma(self) -> bool:
        return abs(self.bias_sigmas) <= 3.0

    def coverage_in_band(self, low: float = 0.92, high: float = 0.98) -> bool | None:
        if self.coverage is None:
            return None
        return low <= self.coverage <= high


@dataclass(frozen=True)
class CalibrationReport:
    metrics: dict[str, MetricCalibration]
    repetitions: int
    draws: int
    unanswerable_rate: float
    degenerate: bool

    def all_pass(self) -> bool:
        if self.degenerate:
            return False
        for m in self.metrics.values():
            if not m.unbiased_at_3_sigma:
                return False
            if m.coverage is not None and not m.coverage_in_band():
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "draws": self.draws,
            "unanswerable_rate": self.unanswerable_rate,
            "degenerate": self.degenerate,
            "metrics": {
                name: {
                    "oracle_value": m.oracle_value,
                    "empirical_mean": m.empirical_mean,
                    "bias": m.bias,
                    "stderr_of_mean": m.stderr_of_mean,
                    "bias_sigmas": m.bias_sigmas,
                    "mean_reported_stderr": m.mean_reported_stderr,
                    "coverage": m.coverage if m.coverage is not None else "not-applicable",
                    "unbiased_at_3_sigma": m.unbiased_at_3_sigma,
                    "coverage_in_band": m.coverage_in_band(),
                } for name, m in self.metrics.items()
            },
        }


def run_calibration(instance: SyntheticInstance, repetitions: int, draws: int,
                    seed: int, unanswerable_rate: float = 0.0,
                    oracle_table: ExactMetrics | None = None,
                    confidence: float = 0.95) -> CalibrationReport:
    from .estimator import (
        estimate_delta_precision,
        estimate_distance_quality,
        estimate_index_quality,
    )

    cp, truth = instance.cp, instance.truth
    partition = affected_partition(cp)
    totals = pair_totals(cp, partition)
    pairs = list(enumerate_pairs(cp, partition))
    if oracle_table is None:
        oracle_table = exact_metrics(cp, truth)
    oracle_values = {m: oracle_table.overall[m] for m in CALIBRATION_METRICS}
    degenerate = totals.delta_precision_multiplier == 0.0

    points: dict[str, list[float]] = {m: [] for m in CALIBRATION_METRICS}
    stderrs: dict[str, list[float]] = {m: [] for m in CALIBRATION_METRICS}
    covered: dict[str, int] = {m: 0 for m in CALIBRATION_METRICS}

    for rep in range(repetitions if not degenerate else 0):
        rep_seed = keyed(seed, rep)
        plan = SamplePlan(draws, rep_seed, SingleStratum())
        sample_set = sample(pairs, plan)
        records = synthetic_judge(export_tasks(sample_set), truth,
                                  unanswerable_rate, seed=keyed(rep_seed, 7))
        js = ingest_verdicts(sample_set, records)
        try:
            reports = dict(estimate_distance_quality(js, totals, confidence))
            reports.update(estimate_index_quality(js, totals, confidence))
            reports["delta_precision"] = estimate_delta_precision(js, totals, confidence)
        except UnestimableClassError:
            continue  # a class got zero usable draws this repetition
        for metric in CALIBRATION_METRICS:
            rep_report = reports[metric]
            points[metric].append(rep_report.point)
            stderrs[metric].append(rep_report.std_err)
            if rep_report.ci_low <= oracle_values[metric] <= rep_report.ci_high:
                covered[metric] += 1

    metrics = {}
    for metric in CALIBRATION_METRICS:
        vals = points[metric]
        n = len(vals)
        mean = sum(vals) / n if n else math.nan
        bias = mean - oracle_values[metric]
        if n > 1:
            var = sum((v - mean) ** 2 for v in vals) / (n - 1)
            sem = math.sqrt(var / n)
            coverage = covered[metric] / n
        else:
            sem = math.nan
            coverage = None
        metrics[metric] = MetricCalibration(
            metric=metric,
            oracle_value=oracle_values[metric],
            empirical_mean=mean,
            bias=bias,
            stderr_of_mean=sem,
            bias_sigmas=bias / sem if sem and not math.isnan(sem) and sem > 0 else math.nan,
            mean_reported_stderr=sum(stderrs[metric]) / n if n else math.nan,
            coverage=coverage,
            repetitions=n,
        )
    return CalibrationReport(metrics, repetitions, draws, unanswerable_rate, degenerate)
