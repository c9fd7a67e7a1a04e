import math
from fractions import Fraction

import pytest

from clusterdiff.errors import EmptySetError, OracleIncompleteError
from clusterdiff.model import affected_partition
from clusterdiff.oracle import GeneratorParams, TruthTable, generate_instance
from clusterdiff.pointwise import (
    affected_index_split,
    item_impact,
    item_quality,
    lift,
    precision_pair,
    vantage_geometry,
)

from conftest import build_pair


def test_item_impact_toy3(toy3):
    cp, _ = toy3
    a = item_impact(cp, "a")
    assert a.jaccard_distance == pytest.approx(2 / 3, abs=1e-15)
    assert a.split_distance == pytest.approx(1 / 3, abs=1e-15)
    assert a.merge_distance == pytest.approx(1 / 3, abs=1e-15)
    assert a.jaccard_index == pytest.approx(1 / 3, abs=1e-15)
    b = item_impact(cp, "b")
    assert b.jaccard_distance == pytest.approx(1 / 2, abs=1e-15)
    assert b.split_distance == pytest.approx(1 / 2, abs=1e-15)
    assert b.merge_distance == 0.0


def test_item_impact_identity(identity5):
    for i in identity5.items:
        impact = item_impact(identity5, i)
        assert impact.jaccard_distance == 0.0
        assert impact.jaccard_index == 1.0


def test_item_quality_toy3(toy3):
    cp, truth = toy3
    qa = item_quality(cp, "a", truth)
    assert qa.bad_split_distance == pytest.approx(1 / 3, abs=1e-15)
    assert qa.bad_merge_distance == pytest.approx(1 / 3, abs=1e-15)
    assert qa.good_index == pytest.approx(1 / 3, abs=1e-15)
    assert qa.delta_precision == pytest.approx(-1 / 2, abs=1e-15)
    # direct cross-check: Precision_Exp(a) - Precision_Base(a) = 1/2 - 1
    base_p, exp_p = precision_pair(cp, "a", truth)
    assert (base_p, exp_p) == (1.0, 0.5)

    qb = item_quality(cp, "b", truth)
    assert qb.bad_split_distance == pytest.approx(1 / 2, abs=1e-15)
    assert qb.good_index == pytest.approx(1 / 2, abs=1e-15)
    assert qb.delta_precision == 0.0


def test_unaffected_item_has_zero_delta_precision(identity5):
    truth = TruthTable({i: "t0" for i in identity5.items})
    for i in identity5.items:
        assert item_quality(identity5, i, truth).delta_precision == 0.0


def test_oracle_incomplete_propagates(toy3):
    cp, _ = toy3
    partial = TruthTable({"a": "t0"})
    with pytest.raises(OracleIncompleteError):
        item_quality(cp, "a", partial)


def test_lift_toy3(toy3):
    cp, _ = toy3
    jd = {i: item_impact(cp, i).jaccard_distance for i in cp.items}
    assert lift(jd, cp, cp.items) == pytest.approx(5 / 9, abs=1e-15)
    assert lift(jd, cp, ["a"]) == jd["a"]
    split = {i: item_impact(cp, i).split_distance for i in cp.items}
    merge = {i: item_impact(cp, i).merge_distance for i in cp.items}
    assert lift(split, cp, cp.items) == pytest.approx(5 / 18, abs=1e-15)
    assert lift(merge, cp, cp.items) == pytest.approx(5 / 18, abs=1e-15)
    assert lift(split, cp, cp.items) + lift(merge, cp, cp.items) == \
        pytest.approx(5 / 9, abs=1e-15)


def test_lift_empty_set(toy3):
    cp, _ = toy3
    with pytest.raises(EmptySetError):
        lift({}, cp, [])


def test_lift_linearity():
    inst = generate_instance(GeneratorParams(n_items=150, weight_dist="lognormal"), seed=9)
    cp = inst.cp
    split = {i: item_impact(cp, i).split_distance for i in cp.items}
    merge = {i: item_impact(cp, i).merge_distance for i in cp.items}
    both = {i: split[i] + merge[i] for i in cp.items}
    for ids in [list(cp.items)[:40], list(cp.items)]:
        assert lift(both, cp, ids) == pytest.approx(
            lift(split, cp, ids) + lift(merge, cp, ids), abs=1e-12)


def test_affected_index_split_toy3(toy3, toy3_partition):
    cp, _ = toy3
    affected, unaffected = affected_index_split(cp, toy3_partition)
    assert affected == pytest.approx(4 / 9, abs=1e-15)
    assert unaffected == 0.0
    jd = {i: item_impact(cp, i).jaccard_distance for i in cp.items}
    assert affected + unaffected + lift(jd, cp, cp.items) == pytest.approx(1.0, abs=1e-15)


def test_affected_index_split_identity(identity5):
    part = affected_partition(identity5)
    affected, unaffected = affected_index_split(identity5, part)
    assert (affected, unaffected) == (0.0, 1.0)


def test_affected_index_rescaling_relation(toy3, toy3_partition):
    # JaccardIndex(AffectedItems) = weight(T)/weight(Affected) * AffectedJaccardIndex
    cp, _ = toy3
    affected, _ = affected_index_split(cp, toy3_partition)
    ji = {i: item_impact(cp, i).jaccard_index for i in cp.items}
    lifted = lift(ji, cp, toy3_partition.affected_ids)
    ratio = cp.total_weight / toy3_partition.affected_weight
    assert lifted == pytest.approx(ratio * affected, abs=1e-12)


def test_vantage_geometry_bounds():
    inst = generate_instance(GeneratorParams(n_items=200, weight_dist="uniform"), seed=2)
    cp = inst.cp
    for i in cp.items:
        g = vantage_geometry(cp, i)
        assert 0.0 < g.base_share <= 1.0
        assert 0.0 < g.exp_share <= 1.0
        assert g.base_scale >= 1.0
        assert g.exp_scale >= 1.0
        assert g.base_scale == pytest.approx(1.0 / g.base_share, rel=1e-12)


@pytest.mark.parametrize("weight_dist,tol", [("unit", 1e-12), ("lognormal", 1e-9)])
def test_decomposition_identities_random(weight_dist, tol):
    inst = generate_instance(
        GeneratorParams(n_items=250, weight_dist=weight_dist, base_noise_rate=0.1),
        seed=13)
    cp, truth = inst.cp, inst.truth
    for i in cp.items:
        impact = item_impact(cp, i)
        quality = item_quality(cp, i, truth)
        assert impact.jaccard_distance + impact.jaccard_index == pytest.approx(1.0, abs=tol)
        assert impact.jaccard_distance == pytest.approx(
            impact.split_distance + impact.merge_distance, abs=tol)
        assert impact.split_distance == pytest.approx(
            quality.good_split_distance + quality.bad_split_distance, abs=tol)
        assert impact.merge_distance == pytest.approx(
            quality.good_merge_distance + quality.bad_merge_distance, abs=tol)
        assert impact.jaccard_index == pytest.approx(
            quality.good_index + quality.bad_index, abs=tol)
        assert quality.good_distance + quality.bad_distance == pytest.approx(
            impact.jaccard_distance, abs=tol)
        for value in (quality.good_split_distance, quality.bad_split_distance,
                      quality.good_merge_distance, quality.bad_merge_distance,
                      quality.good_index, quality.bad_index):
            assert value >= 0.0


def test_delta_precision_equals_direct_difference():
    inst = generate_instance(
        GeneratorParams(n_items=120, weight_dist="uniform", base_noise_rate=0.15),
        seed=21)
    cp, truth = inst.cp, inst.truth
    for i in cp.items:
        quality = item_quality(cp, i, truth)
        base_p, exp_p = precision_pair(cp, i, truth)
        assert quality.delta_precision == pytest.approx(exp_p - base_p, abs=1e-12)
