import math

import pytest

from clusterdiff.errors import (
    InstanceTooLargeError,
    InvalidParamsError,
    OracleIncompleteError,
)
from clusterdiff.model import affected_partition, joined_records
from clusterdiff.oracle import (
    GeneratorParams,
    TruthTable,
    delta_precision_direct,
    exact_metrics,
    generate_instance,
    jaccard_distance_exact,
)
from clusterdiff.pointwise import item_quality

from conftest import build_pair


def test_toy3_full_table(toy3):
    cp, truth = toy3
    table = exact_metrics(cp, truth)
    expected = {
        "jaccard_distance": 5 / 9,
        "split_distance": 5 / 18,
        "merge_distance": 5 / 18,
        "jaccard_index": 4 / 9,
        "affected_jaccard_index": 4 / 9,
        "unaffected_jaccard_index": 0.0,
        "bad_distance": 5 / 9,
        "good_distance": 0.0,
        "affected_good_index": 4 / 9,
        "affected_bad_index": 0.0,
        "delta_precision": -1 / 3,
    }
    for metric, value in expected.items():
        assert table.overall[metric] == pytest.approx(value, abs=1e-12), metric


def test_identity_all_zero(identity5):
    truth = TruthTable({i: "t0" for i in identity5.items})
    table = exact_metrics(identity5, truth)
    assert table.overall["jaccard_distance"] == 0.0
    assert table.overall["jaccard_index"] == 1.0
    assert table.overall["delta_precision"] == 0.0
    assert table.overall["good_distance"] == 0.0
    assert table.overall["bad_distance"] == 0.0


def test_perfect_repair_has_no_bad_changes():
    params = GeneratorParams(n_items=300, base_split_rate=0.4, base_merge_rate=0.4,
                             base_noise_rate=0.1, exp_mode="truth")
    inst = generate_instance(params, seed=17)
    table = exact_metrics(inst.cp, inst.truth)
    assert table.overall["bad_split_distance"] == 0.0
    assert table.overall["bad_merge_distance"] == 0.0
    assert table.overall["jaccard_distance"] > 0.0


def test_truth_table_incomplete():
    truth = TruthTable({"a": "t0"})
    with pytest.raises(OracleIncompleteError):
        truth.equivalent("a", "zz")


def test_truth_table_rejects_overlapping_classes():
    with pytest.raises(InvalidParamsError):
        TruthTable.from_classes([["a", "b"], ["b", "c"]])


def test_region_partition_sums_to_one():
    inst = generate_instance(
        GeneratorParams(n_items=120, weight_dist="lognormal", base_noise_rate=0.15),
        seed=19)
    cp, truth = inst.cp, inst.truth
    for i in cp.items:
        q = item_quality(cp, i, truth)
        regions = (q.good_split_distance + q.bad_split_distance
                   + q.good_merge_distance + q.bad_merge_distance
                   + q.good_index + q.bad_index)
        assert regions == pytest.approx(1.0, abs=1e-9)


def test_delta_precision_matches_direct_lift():
    inst = generate_instance(
        GeneratorParams(n_items=150, weight_dist="uniform", base_noise_rate=0.15),
        seed=23)
    table = exact_metrics(inst.cp, inst.truth)
    assert table.overall["delta_precision"] == pytest.approx(
        delta_precision_direct(inst.cp, inst.truth), abs=1e-9)


def test_cluster_tables_lift_consistently():
    inst = generate_instance(GeneratorParams(n_items=80, base_noise_rate=0.1), seed=29)
    table = exact_metrics(inst.cp, inst.truth)
    cp = inst.cp
    # overall equals the weight-average of base-cluster values
    total = sum(
        cp.weight_of(ids) * table.base_clusters[c]["jaccard_distance"]
        for c, ids in cp.base_members.items()) / cp.total_weight
    assert table.overall["jaccard_distance"] == pytest.approx(total, abs=1e-12)


def test_pair_guard():
    members = [f"x{n}" for n in range(60)]
    cp = build_pair([members], [members[:-1], [members[-1]]])
    truth = TruthTable({i: "t0" for i in members})
    with pytest.raises(InstanceTooLargeError):
        exact_metrics(cp, truth, max_pairs=100)


def test_generator_deterministic_bytes():
    params = GeneratorParams(n_items=2000, weight_dist="lognormal", base_noise_rate=0.1)
    a = generate_instance(params, seed=31)
    b = generate_instance(params, seed=31)
    assert list(joined_records(a.cp)) == list(joined_records(b.cp))
    assert a.truth.class_of == b.truth.class_of
    c = generate_instance(params, seed=32)
    assert list(joined_records(a.cp)) != list(joined_records(c.cp))


def test_generator_zero_rates_identity():
    params = GeneratorParams(n_items=500, base_split_rate=0.0, base_merge_rate=0.0,
                             good_split_rate=0.0, bad_split_rate=0.0,
                             good_merge_rate=0.0, bad_merge_rate=0.0)
    inst = generate_instance(params, seed=37)
    part = affected_partition(inst.cp)
    assert part.affected_ids == frozenset()


def test_generator_invalid_params():
    with pytest.raises(InvalidParamsError):
        generate_instance(GeneratorParams(n_items=0), seed=1)
    with pytest.raises(InvalidParamsError):
        generate_instance(GeneratorParams(good_split_rate=1.5), seed=1)
    with pytest.raises(InvalidParamsError):
        generate_instance(GeneratorParams(weight_dist="zipf"), seed=1)


def test_generator_hits_bad_distance_band():
    # the calibration preset keeps roughly half the distance bad
    params = GeneratorParams(n_items=10_000, weight_dist="uniform",
                             base_noise_rate=0.15, base_merge_rate=0.3,
                             bad_merge_rate=0.25, bad_split_rate=0.2)
    inst = generate_instance(params, seed=7)
    table = exact_metrics(inst.cp, inst.truth)
    ratio = table.overall["bad_distance"] / table.overall["jaccard_distance"]
    assert 0.4 <= ratio <= 0.6


def test_truth_file_round_trip(tmp_path):
    truth = TruthTable({"a": "t0", "b": "t0", "c": "t1"})
    path = tmp_path / "truth.jsonl"
    truth.write(path)
    assert TruthTable.read(path).class_of == truth.class_of


def test_instance_dump(tmp_path):
    inst = generate_instance(GeneratorParams(n_items=50), seed=41)
    cpath, tpath = tmp_path / "clustering.jsonl", tmp_path / "truth.jsonl"
    inst.dump(cpath, tpath)
    assert cpath.exists() and tpath.exists()
    assert len(cpath.read_text().splitlines()) == 50


def test_exact_jaccard_distance_rational(toy3):
    cp, _ = toy3
    weights = {i: 1 for i in cp.items}
    d = jaccard_distance_exact(weights, cp.base_of, cp.exp_of)
    assert d.numerator == 5 and d.denominator == 9
    assert jaccard_distance_exact(weights, cp.base_of, cp.base_of) == 0


def test_metric_axioms_quick():
    import random

    rng = random.Random(43)
    items = [f"i{n}" for n in range(20)]
    weights = {i: rng.randint(1, 5) for i in items}

    def random_assignment():
        return {i: f"c{rng.randint(0, 5)}" for i in items}

    for _ in range(20):
        a, b, c = random_assignment(), random_assignment(), random_assignment()
        dab = jaccard_distance_exact(weights, a, b)
        dba = jaccard_distance_exact(weights, b, a)
        dbc = jaccard_distance_exact(weights, b, c)
        dac = jaccard_distance_exact(weights, a, c)
        assert dab == dba
        assert jaccard_distance_exact(weights, a, a) == 0
        assert dac <= dab + dbc
