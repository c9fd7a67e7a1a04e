"""The ordered pair population: classes, sampling weights, and labels.

Every affected item i is a vantage point paired with each j in
Base(i) ∪ Exp(i). A pair's sampling weight is
weight(i)·weight(j) / (weight(T)·weight(Base(i) ∪ Exp(i))); its label
feeds the precision-delta estimator (positive for merges, negative for
splits, the scale difference for stable pairs).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .errors import NotAPairError
from .model import AffectedPartition, ClusteringPair
from .pointwise import item_impact, vantage_geometry

DEFAULT_PAIR_CAP = 100_000_000


class PairClass(str, Enum):
    SPLIT = "split"
    MERGE = "merge"
    STABLE = "stable"


@dataclass(frozen=True, slots=True)
class ItemPair:
    """Ordered pair: i is the vantage point, j ranges over i's clusters."""

    i: str
    j: str
    pair_class: PairClass
    is_self: bool
    sampling_weight: float
    label: float

    @property
    def reweight_class(self) -> str:
        """Missing-judgement correction class: self pairs apart from other stables."""
        if self.is_self:
            return "self"
        if self.pair_class is PairClass.STABLE:
            return "intersection"
        return self.pair_class.value


@dataclass(frozen=True)
class PairTotals:
    """Exact sums of pair weights per class, computed without enumeration.

    split_total equals the overall SplitDistance, merge_total the overall
    MergeDistance, stable_total the AffectedJaccardIndex; their sum is the
    multiplier of the precision-delta estimator.
    """

    split_total: float
    merge_total: float
    stable_total: float

    @property
    def diff_total(self) -> float:
        return self.split_total + self.merge_total

    @property
    def delta_precision_multiplier(self) -> float:
        return self.split_total + self.merge_total + self.stable_total

    def class_total(self, pair_class: PairClass) -> float:
        return {
            PairClass.SPLIT: self.split_total,
            PairClass.MERGE: self.merge_total,
            PairClass.STABLE: self.stable_total,
        }[pair_class]


def _classify(cp: ClusteringPair, i: str, j: str) -> PairClass:
    in_base = cp.in_base_of(i, j)
    in_exp = cp.in_exp_of(i, j)
    if in_base and in_exp:
        return PairClass.STABLE
    if in_base:
        return PairClass.SPLIT
    if in_exp:
        return PairClass.MERGE
    raise NotAPairError(f"{j!r} is in neither cluster of {i!r}")


def pair_weight(cp: ClusteringPair, i: str, j: str) -> float:
    """Sampling weight of (i, j), including the 1/weight(T) factor."""
    _classify(cp, i, j)
    return (cp.weight(i) * cp.weight(j)) / (cp.total_weight * cp.union_weight(i))


def pair_label(cp: ClusteringPair, i: str, j: str) -> float:
    """Precision-delta label of (i, j), from i's vantage geometry."""
    cls = _classify(cp, i, j)
    g = vantage_geometry(cp, i)
    if cls is PairClass.MERGE:
        return g.exp_scale
    if cls is PairClass.SPLIT:
        return -g.base_scale
    return g.exp_scale - g.base_scale


def pair_count(cp: ClusteringPair, partition: AffectedPartition) -> int:
    """Exact number of pairs, computable without enumeration."""
    total = 0
    for i in partition.affected_ids:
        total += (len(cp.base_cluster(i)) + len(cp.exp_cluster(i))
                  - cp.overlap_size(i))
    return total


def enumerate_pairs(cp: ClusteringPair, partition: AffectedPartition,
                    cap: int = DEFAULT_PAIR_CAP) -> Iterator[ItemPair]:
    """Stream every pair in deterministic (i, j) order.

    Emits a warning when the pair population exceeds the cap; stable
    pairs grow quadratically with cluster size, so a huge count usually
    signals an accidental blowup rather than intent.
    """
    n = pair_count(cp, partition)
    if n > cap:
        warnings.warn(
            f"pair population has {n} pairs (cap {cap}); "
            "enumeration will be slow and downstream files large",
            stacklevel=2,
        )
    total_weight = cp.total_weight
    for i in partition.sorted_affected():
        w_i = cp.weight(i)
        union = cp.union_weight(i)
        g = vantage_geometry(cp, i)
        label_by_class = {
            PairClass.SPLIT: -g.base_scale,
            PairClass.MERGE: g.exp_scale,
            PairClass.STABLE: g.exp_scale - g.base_scale,
        }
        scale = w_i / (total_weight * union)
        for j in cp.union_members(i):
            cls = _classify(cp, i, j)
            yield ItemPair(i, j, cls, i == j, scale * cp.weight(j),
                           label_by_class[cls])


def pair_totals(cp: ClusteringPair, partition: AffectedPartition) -> PairTotals:
    """Class weight totals from per-item impact metrics (no enumeration)."""
    split = merge = stable = 0.0
    for i in partition.affected_ids:
        share = cp.weight(i) / cp.total_weight
        impact = item_impact(cp, i)
        split += share * impact.split_distance
        merge += share * impact.merge_distance
        stable += share * impact.jaccard_index
    return PairTotals(split, merge, stable)


def pair_attributes(cp: ClusteringPair, pair: ItemPair) -> dict[str, str]:
    """Derived, filterable attribute map for one pair."""
    attrs = {
        "class": pair.pair_class.value,
        "is_self": "true" if pair.is_self else "false",
        "base_weight": f"{cp.base_cluster_weight(pair.i):g}",
        "exp_weight": f"{cp.exp_cluster_weight(pair.i):g}",
    }
    for key, value in cp.items[pair.i].attributes.items():
        attrs[f"i_{key}"] = value
    for key, value in cp.items[pair.j].attributes.items():
        attrs[f"j_{key}"] = value
    return attrs


def pair_record(cp: ClusteringPair, pair: ItemPair) -> dict:
    return {
        "i": pair.i,
        "j": pair.j,
        "class": pair.pair_class.value,
        "is_self": pair.is_self,
        "w": pair.sampling_weight,
        "l": pair.label,
        "attributes": pair_attributes(cp, pair),
    }


def write_pairs(cp: ClusteringPair, pairs: Iterable[ItemPair],
                path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_record(cp, pair), sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_pairs(path: str | Path) -> Iterator[tuple[ItemPair, dict[str, str]]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            pair = ItemPair(rec["i"], rec["j"], PairClass(rec["class"]),
                            bool(rec["is_self"]), float(rec["w"]), float(rec["l"]))
            yield pair, rec.get("attributes", {})
