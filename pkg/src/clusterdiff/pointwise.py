"""Exact per-item impact and quality metrics, and their lifting to item sets.

All metrics are pointwise: defined per item from the weights of the
regions of Base(i), Exp(i) and (for quality) the true-equivalence set,
then lifted to arbitrary sets as weighted averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Protocol

from .errors import EmptySetError
from .model import AffectedPartition, ClusteringPair


class EquivalenceOracle(Protocol):
    """Answers whether two items are truly equivalent.

    Implementations: ground-truth tables (tests and simulation),
    judgement-store lookups (production, partial), attribute-based rules
    (synthetic data). May raise OracleIncompleteError.
    """

    def equivalent(self, i: str, j: str) -> bool: ...


@dataclass(frozen=True)
class ItemImpact:
    """Impact of the change from item i's vantage point; all in [0, 1]."""

    jaccard_distance: float
    split_distance: float
    merge_distance: float
    jaccard_index: float


@dataclass(frozen=True)
class VantageGeometry:
    """Cluster-weight ratios of item i used by the precision-delta algebra.

    base_share and exp_share are the base/exp cluster weights divided by
    the union weight; base_scale and exp_scale are their reciprocals.
    """

    base_share: float
    exp_share: float
    base_scale: float
    exp_scale: float


@dataclass(frozen=True)
class ItemQuality:
    """Judgement-based decomposition of item i's impact."""

    good_split_distance: float
    bad_split_distance: float
    good_merge_distance: float
    bad_merge_distance: float
    good_index: float
    bad_index: float
    delta_precision: float

    @property
    def good_distance(self) -> float:
        return self.good_split_distance + self.good_merge_distance

    @property
    def bad_distance(self) -> float:
        return self.bad_split_distance + self.bad_merge_distance


def item_impact(cp: ClusteringPair, i: str) -> ItemImpact:
    union = cp.union_weight(i)
    overlap = cp.overlap_weight(i)
    split = (cp.base_cluster_weight(i) - overlap) / union
    merge = (cp.exp_cluster_weight(i) - overlap) / union
    return ItemImpact(split + merge, split, merge, overlap / union)


def vantage_geometry(cp: ClusteringPair, i: str) -> VantageGeometry:
    union = cp.union_weight(i)
    wb = cp.base_cluster_weight(i)
    we = cp.exp_cluster_weight(i)
    return VantageGeometry(wb / union, we / union, union / wb, union / we)


def item_quality(cp: ClusteringPair, i: str,
                 equiv: EquivalenceOracle) -> ItemQuality:
    """Split item i's impact into good and bad parts using the oracle.

    A split of j is good when i and j are not equivalent; a merge is good
    when they are. The precision delta follows from the same regions via
    the vantage geometry and is exactly Precision_Exp(i) - Precision_Base(i).
    """
    union = cp.union_weight(i)
    good_split = bad_split = 0.0
    good_merge = bad_merge = 0.0
    good_index = bad_index = 0.0
    for j in cp.union_members(i):
        share = cp.weight(j) / union
        same = i == j or equiv.equivalent(i, j)
        in_base = cp.in_base_of(i, j)
        in_exp = cp.in_exp_of(i, j)
        if in_base and in_exp:
            if same:
                good_index += share
            else:
                bad_index += share
        elif in_base:
            if same:
                bad_split += share
            else:
                good_split += share
        else:
            if same:
                good_merge += share
            else:
                bad_merge += share
    g = vantage_geometry(cp, i)
    delta_precision = (g.exp_scale * good_merge
                       + (g.exp_scale - g.base_scale) * good_index
                       - g.base_scale * bad_split)
    return ItemQuality(good_split, bad_split, good_merge, bad_merge,
                       good_index, bad_index, delta_precision)


def precision_pair(cp: ClusteringPair, i: str,
                   equiv: EquivalenceOracle) -> tuple[float, float]:
    """(Precision_Base(i), Precision_Exp(i)) computed directly from the oracle.

    Precision of a cluster from i's vantage point is the weight fraction
    of its members truly equivalent to i.
    """
    def precision(members: Iterable[str]) -> float:
        total = good = 0.0
        for j in members:
            w = cp.weight(j)
            total += w
            if i == j or equiv.equivalent(i, j):
                good += w
        return good / total

    return precision(cp.base_cluster(i)), precision(cp.exp_cluster(i))


def lift(values: Mapping[str, float] | Callable[[str], float],
         cp: ClusteringPair, ids: Iterable[str]) -> float:
    """Weighted average of a pointwise metric over a nonempty item set."""
    get = values if callable(values) else values.__getitem__
    num = den = 0.0
    for i in ids:
        w = cp.weight(i)
        num += w * get(i)
        den += w
    if den == 0.0:
        raise EmptySetError("cannot lift a metric over an empty item set")
    return num / den


def affected_index_split(cp: ClusteringPair,
                         partition: AffectedPartition) -> tuple[float, float]:
    """(AffectedJaccardIndex, UnaffectedJaccardIndex) of the population.

    The affected term sums weight(i)/weight(T) * JaccardIndex(i) over
    affected items; the unaffected term is exactly the unaffected weight
    fraction.
    """
    affected = sum(
        cp.weight(i) * item_impact(cp, i).jaccard_index
        for i in partition.affected_ids
    ) / cp.total_weight
    return affected, partition.unaffected_weight / cp.total_weight


IMPACT_METRICS = ("jaccard_distance", "split_distance", "merge_distance", "jaccard_index")


def impact_report_rows(cp: ClusteringPair,
                       partition: AffectedPartition) -> Iterator[dict]:
    """Per-cluster and overall impact metrics as flat report records."""
    impacts = {i: item_impact(cp, i) for i in cp.items}

    def rows_for(granularity: str, subject: str, ids: Iterable[str]) -> Iterator[dict]:
        for metric in IMPACT_METRICS:
            value = lift({i: getattr(impacts[i], metric) for i in ids}, cp, ids)
            yield {"granularity": granularity, "subject": subject,
                   "metric": metric, "value": value}

    for cluster_id in sorted(cp.base_members):
        yield from rows_for("base_cluster", cluster_id, cp.base_members[cluster_id])
    for cluster_id in sorted(cp.exp_members):
        yield from rows_for("exp_cluster", cluster_id, cp.exp_members[cluster_id])
    yield from rows_for("overall", "overall", cp.items)

    affected_ji, unaffected_ji = affected_index_split(cp, partition)
    for metric, value in [
        ("affected_jaccard_index", affected_ji),
        ("unaffected_jaccard_index", unaffected_ji),
        ("affected_weight_fraction", partition.affected_weight / cp.total_weight),
        ("affected_item_count", float(len(partition.affected_ids))),
    ]:
        yield {"granularity": "overall", "subject": "overall",
               "metric": metric, "value": value}
