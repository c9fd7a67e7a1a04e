import math
import statistics

import pytest
from hypothesis import given, strategies as st

from clusterdiff.errors import (
    EmptySampleError,
    StratifiedSampleUnsupportedError,
    UnestimableClassError,
)
from clusterdiff.estimator import (
    estimate_all,
    estimate_delta_precision,
    estimate_distance_quality,
    estimate_index_quality,
    weighted_sample_stats,
)
from clusterdiff.judgements import export_tasks, ingest_verdicts, synthetic_judge
from clusterdiff.model import affected_partition
from clusterdiff.oracle import TruthTable, exact_metrics
from clusterdiff.pairs import enumerate_pairs, pair_totals
from clusterdiff.sampling import SamplePlan, TwoStrata, exhaustive_sample, sample

from conftest import build_pair


def _judged_exhaustive(cp, truth):
    part = affected_partition(cp)
    ss = exhaustive_sample(enumerate_pairs(cp, part))
    records = synthetic_judge(export_tasks(ss), truth)
    return ingest_verdicts(ss, records), pair_totals(cp, part)


def test_weighted_stats_uniform_weights_match_plain_stderr():
    values = [1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.5]
    mean, std_err, n_eff = weighted_sample_stats((v, 1.0) for v in values)
    assert mean == pytest.approx(statistics.mean(values), abs=1e-15)
    assert std_err == pytest.approx(
        statistics.stdev(values) / math.sqrt(len(values)), rel=1e-12)
    assert n_eff == pytest.approx(len(values), rel=1e-12)


def test_weighted_stats_constant_values():
    mean, std_err, _ = weighted_sample_stats([(0.7, 2.0), (0.7, 5.0)])
    assert (mean, std_err) == (0.7, 0.0)


def test_weighted_stats_equal_reweights_keep_n_eff():
    # 800 observations at weight 1000/800 behave like 800 plain ones
    values = [float(n % 3 == 0) for n in range(800)]
    m1, s1, n1 = weighted_sample_stats((v, 1.25) for v in values)
    m2, s2, n2 = weighted_sample_stats((v, 1.0) for v in values)
    assert (m1, n1) == pytest.approx((m2, 800.0), rel=1e-12)
    assert s1 == pytest.approx(s2, rel=1e-12)


def test_weighted_stats_empty_raises():
    with pytest.raises(EmptySampleError):
        weighted_sample_stats([])


@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(0.01, 100)),
                min_size=1, max_size=50))
def test_weighted_stats_properties(obs):
    mean, std_err, n_eff = weighted_sample_stats(obs)
    lo = min(v for v, _ in obs)
    hi = max(v for v, _ in obs)
    assert lo - 1e-9 <= mean <= hi + 1e-9
    assert std_err >= 0.0
    assert 1.0 - 1e-9 <= n_eff <= len(obs) + 1e-9
    # scale invariance of the weights
    mean2, std_err2, n_eff2 = weighted_sample_stats([(v, 3.0 * w) for v, w in obs])
    assert mean2 == pytest.approx(mean, rel=1e-9, abs=1e-12)
    assert n_eff2 == pytest.approx(n_eff, rel=1e-9)
    if math.isfinite(std_err):
        assert std_err2 == pytest.approx(std_err, rel=1e-6, abs=1e-12)


def test_exhaustive_estimates_match_oracle_toy3(toy3):
    cp, truth = toy3
    js, totals = _judged_exhaustive(cp, truth)
    distance = estimate_distance_quality(js, totals)
    assert distance["good_split_distance"].point == pytest.approx(0.0, abs=1e-15)
    assert distance["bad_split_distance"].point == pytest.approx(5 / 18, abs=1e-12)
    assert distance["good_merge_distance"].point == pytest.approx(0.0, abs=1e-15)
    assert distance["bad_merge_distance"].point == pytest.approx(5 / 18, abs=1e-12)
    assert distance["bad_distance"].point == pytest.approx(5 / 9, abs=1e-12)
    index = estimate_index_quality(js, totals)
    assert index["affected_good_index"].point == pytest.approx(4 / 9, abs=1e-12)
    assert index["affected_bad_index"].point == pytest.approx(0.0, abs=1e-15)
    dp = estimate_delta_precision(js, totals)
    assert dp.point == pytest.approx(-1 / 3, abs=1e-12)


def test_degenerate_constant_indicator_has_zero_stderr(toy3, toy3_partition):
    cp, truth = toy3
    pairs = list(enumerate_pairs(cp, toy3_partition))
    ss = sample(pairs, SamplePlan(400, seed=3))
    js = ingest_verdicts(ss, synthetic_judge(export_tasks(ss), truth))
    reports = estimate_distance_quality(js, pair_totals(cp, toy3_partition))
    # every split pair in toy3 is bad: the indicator is constant
    assert reports["good_split_distance"].point == 0.0
    assert reports["good_split_distance"].std_err == 0.0
    assert reports["bad_split_distance"].point == pytest.approx(5 / 18, abs=1e-12)


def test_good_and_bad_share_stderr_and_complement(toy3):
    cp, truth = toy3
    js, totals = _judged_exhaustive(cp, truth)
    reports = estimate_distance_quality(js, totals)
    assert reports["good_split_distance"].std_err == reports["bad_split_distance"].std_err
    assert reports["good_merge_distance"].std_err == reports["bad_merge_distance"].std_err
    assert reports["good_split_distance"].point + reports["bad_split_distance"].point == \
        pytest.approx(totals.split_total, abs=1e-12)
    assert reports["good_distance"].std_err == pytest.approx(math.hypot(
        reports["good_split_distance"].std_err,
        reports["good_merge_distance"].std_err), rel=1e-12)
    index = estimate_index_quality(js, totals)
    assert index["affected_good_index"].std_err == index["affected_bad_index"].std_err
    assert index["affected_good_index"].point + index["affected_bad_index"].point == \
        pytest.approx(totals.stable_total, abs=1e-12)


def test_delta_precision_refuses_stratified_sample(toy3, toy3_partition):
    cp, truth = toy3
    pairs = list(enumerate_pairs(cp, toy3_partition))
    ss = sample(pairs, SamplePlan(100, seed=1, strata=TwoStrata(50, 50)))
    js = ingest_verdicts(ss, synthetic_judge(export_tasks(ss), truth))
    with pytest.raises(StratifiedSampleUnsupportedError):
        estimate_delta_precision(js, pair_totals(cp, toy3_partition))


def test_identity_clustering_gives_exact_zero(identity5):
    part = affected_partition(identity5)
    totals = pair_totals(identity5, part)
    # no pairs at all: estimators report exact zeros without a sample
    ss = exhaustive_sample([])
    js = ingest_verdicts(ss, [])
    report = estimate_delta_precision(js, totals)
    assert (report.point, report.std_err) == (0.0, 0.0)
    distance = estimate_distance_quality(js, totals)
    assert distance["good_split_distance"].point == 0.0
    assert distance["bad_merge_distance"].std_err == 0.0


def test_unestimable_class_raised(toy3, toy3_partition):
    cp, truth = toy3
    pairs = list(enumerate_pairs(cp, toy3_partition))
    ss = sample(pairs, SamplePlan(200, seed=2))
    records = [v for v in synthetic_judge(export_tasks(ss), truth)
               if not _is_split(ss, v.i, v.j)]
    js = ingest_verdicts(ss, records)
    with pytest.raises(UnestimableClassError):
        estimate_distance_quality(js, pair_totals(cp, toy3_partition))


def _is_split(ss, i, j):
    for d in ss.draws:
        if (d.pair.i, d.pair.j) == (i, j):
            return d.pair.pair_class.value == "split"
    return False


def test_equal_weight_stable_pairs_are_still_sampled_and_estimable():
    # an affected item whose base and exp clusters weigh the same has
    # zero-labelled stable pairs; they still carry positive sampling
    # weight and a bad one must push the affected bad index above zero
    cp = build_pair([["a", "b", "x"], ["c"]], [["a", "b", "c"], ["x"]])
    truth = TruthTable({"a": "t0", "b": "t1", "x": "t0", "c": "t2"})
    part = affected_partition(cp)
    pairs = list(enumerate_pairs(cp, part))
    stable_nonself = [p for p in pairs if p.pair_class.value == "stable" and not p.is_self]
    assert stable_nonself and all(p.sampling_weight > 0 for p in stable_nonself)
    equal_weight = [p for p in stable_nonself
                    if cp.base_cluster_weight(p.i) == cp.exp_cluster_weight(p.i)]
    assert equal_weight and all(p.label == 0.0 for p in equal_weight)
    js, totals = _judged_exhaustive(cp, truth)
    index = estimate_index_quality(js, totals)
    assert index["affected_bad_index"].point > 0.0
    table = exact_metrics(cp, truth)
    assert index["affected_bad_index"].point == pytest.approx(
        table.overall["affected_bad_index"], abs=1e-12)


def test_estimate_all_contains_affected_expected_rows(toy3):
    cp, truth = toy3
    js, totals = _judged_exhaustive(cp, truth)
    reports = {r.metric: r for r in estimate_all(js, totals, 1.0)}
    assert reports["affected_expected_good_index"].point == pytest.approx(4 / 9, abs=1e-12)
    assert "delta_precision" in reports


def test_estimate_all_survives_unestimable_classes(toy3, toy3_partition):
    cp, truth = toy3
    pairs = list(enumerate_pairs(cp, toy3_partition))
    ss = sample(pairs, SamplePlan(100, seed=5, strata=TwoStrata(50, 50)))
    js = ingest_verdicts(ss, synthetic_judge(export_tasks(ss), truth))
    reports = {r.metric: r for r in estimate_all(js, pair_totals(cp, toy3_partition), 1.0)}
    assert math.isnan(reports["delta_precision"].point)
    assert reports["delta_precision"].notes.startswith("no estimate")
    assert not math.isnan(reports["good_split_distance"].point)


def test_ci_uses_confidence_level(toy3):
    cp, truth = toy3
    part = affected_partition(cp)
    pairs = list(enumerate_pairs(cp, part))
    ss = sample(pairs, SamplePlan(50, seed=9))
    truth_mixed = TruthTable({"a": "t0", "b": "t1", "c": "t0"})
    js = ingest_verdicts(ss, synthetic_judge(export_tasks(ss), truth_mixed))
    wide = estimate_delta_precision(js, pair_totals(cp, part), confidence=0.99)
    narrow = estimate_delta_precision(js, pair_totals(cp, part), confidence=0.8)
    assert wide.ci_high - wide.ci_low > narrow.ci_high - narrow.ci_low
    assert wide.ci_low <= wide.point <= wide.ci_high
