"""Load, validate, and index two clusterings of one weighted item population.

Input records are newline-delimited JSON. Two forms are accepted: a
two-file form (one record per item per clustering: item_id, cluster_id,
weight, attributes) and a joined single-file form (item_id,
base_cluster_id, exp_cluster_id, weight, attributes).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import (
    DuplicateItemError,
    MissingItemError,
    NonPositiveWeightError,
    UnknownItemError,
    WeightMismatchError,
)


@dataclass(frozen=True)
class Item:
    """One population member: opaque id, positive weight, free-form attributes."""

    id: str
    weight: float
    attributes: Mapping[str, str] = field(default_factory=dict)


def _check_weight(item_id: str, weight: float) -> float:
    w = float(weight)
    if not math.isfinite(w) or w <= 0.0:
        raise NonPositiveWeightError(f"item {item_id!r} has weight {weight!r}")
    return w


class ClusteringPair:
    """The joined view of Base and Exp over the same items, fully indexed.

    Immutable after construction; cluster ids are namespaced per side and
    never compared across sides.
    """

    def __init__(self, items: dict[str, Item], base_of: dict[str, str],
                 exp_of: dict[str, str]):
        if not items:
            raise MissingItemError("empty population")
        self.items = items
        self.base_of = base_of
        self.exp_of = exp_of

        self.base_members: dict[str, list[str]] = {}
        self.exp_members: dict[str, list[str]] = {}
        for i in items:
            self.base_members.setdefault(base_of[i], []).append(i)
            self.exp_members.setdefault(exp_of[i], []).append(i)
        for members in self.base_members.values():
            members.sort()
        for members in self.exp_members.values():
            members.sort()

        self.total_weight = sum(it.weight for it in items.values())
        self.base_weight = {
            c: sum(items[i].weight for i in ms) for c, ms in self.base_members.items()
        }
        self.exp_weight = {
            c: sum(items[i].weight for i in ms) for c, ms in self.exp_members.items()
        }

        # weight and size of Base(i) ∩ Exp(i), shared by all items with the
        # same (base cluster, exp cluster) combination
        self._overlap_weight: dict[tuple[str, str], float] = {}
        self._overlap_size: dict[tuple[str, str], int] = {}
        for b, members in self.base_members.items():
            for i in members:
                key = (b, exp_of[i])
                self._overlap_weight[key] = self._overlap_weight.get(key, 0.0) + items[i].weight
                self._overlap_size[key] = self._overlap_size.get(key, 0) + 1

    def __len__(self) -> int:
        return len(self.items)

    def _require(self, i: str) -> None:
        if i not in self.items:
            raise UnknownItemError(f"unknown item {i!r}")

    def weight(self, i: str) -> float:
        self._require(i)
        return self.items[i].weight

    def weight_of(self, ids: Iterable[str]) -> float:
        return sum(self.items[i].weight for i in ids)

    def base_cluster(self, i: str) -> list[str]:
        """Members of Base(i), sorted."""
        self._require(i)
        return self.base_members[self.base_of[i]]

    def exp_cluster(self, i: str) -> list[str]:
        """Members of Exp(i), sorted."""
        self._require(i)
        return self.exp_members[self.exp_of[i]]

    def base_cluster_weight(self, i: str) -> float:
        self._require(i)
        return self.base_weight[self.base_of[i]]

    def exp_cluster_weight(self, i: str) -> float:
        self._require(i)
        return self.exp_weight[self.exp_of[i]]

    def overlap_weight(self, i: str) -> float:
        """weight(Base(i) ∩ Exp(i)); never zero since i itself is in both."""
        self._require(i)
        return self._overlap_weight[(self.base_of[i], self.exp_of[i])]

    def overlap_size(self, i: str) -> int:
        self._require(i)
        return self._overlap_size[(self.base_of[i], self.exp_of[i])]

    def union_weight(self, i: str) -> float:
        wb = self.base_cluster_weight(i)
        we = self.exp_cluster_weight(i)
        # the union contains both clusters; guard the subtraction against
        # rounding one ulp below max(wb, we)
        return max(wb + we - self.overlap_weight(i), wb, we)

    def union_members(self, i: str) -> list[str]:
        """Members of Base(i) ∪ Exp(i), sorted."""
        self._require(i)
        e = self.exp_of[i]
        extra = [j for j in self.exp_members[e] if self.base_of[j] != self.base_of[i]]
        return sorted(self.base_cluster(i) + extra)

    def in_base_of(self, vantage: str, j: str) -> bool:
        return self.base_of[j] == self.base_of[vantage]

    def in_exp_of(self, vantage: str, j: str) -> bool:
        return self.exp_of[j] == self.exp_of[vantage]

    def is_affected(self, i: str) -> bool:
        """True iff Base(i) and Exp(i) differ as member sets."""
        self._require(i)
        b, e = self.base_of[i], self.exp_of[i]
        n = self._overlap_size[(b, e)]
        return not (len(self.base_members[b]) == n == len(self.exp_members[e]))


@dataclass(frozen=True)
class AffectedPartition:
    """Items split by whether the clustering change touched their cluster."""

    affected_ids: frozenset[str]
    unaffected_ids: frozenset[str]
    affected_weight: float
    unaffected_weight: float

    def sorted_affected(self) -> list[str]:
        return sorted(self.affected_ids)


def affected_partition(cp: ClusteringPair) -> AffectedPartition:
    affected, unaffected = [], []
    aw = uw = 0.0
    for i, item in cp.items.items():
        if cp.is_affected(i):
            affected.append(i)
            aw += item.weight
        else:
            unaffected.append(i)
            uw += item.weight
    return AffectedPartition(frozenset(affected), frozenset(unaffected), aw, uw)


# ---------------------------------------------------------------------------
# loading

def load_clustering_pair(base_records: Iterable[Mapping],
                         exp_records: Iterable[Mapping]) -> ClusteringPair:
    """Build a validated ClusteringPair from two per-side record streams.

    Each record carries item_id, cluster_id, weight, and optional
    attributes. Weights must agree across sides; attribute maps are
    merged with the base side taking precedence.
    """
    base_seen: dict[str, tuple[str, float, Mapping[str, str]]] = {}
    for rec in base_records:
        item_id = str(rec["item_id"])
        if item_id in base_seen:
            raise DuplicateItemError(f"item {item_id!r} appears twice in base source")
        w = _check_weight(item_id, rec["weight"])
        base_seen[item_id] = (str(rec["cluster_id"]), w, dict(rec.get("attributes") or {}))

    items: dict[str, Item] = {}
    base_of: dict[str, str] = {}
    exp_of: dict[str, str] = {}
    for rec in exp_records:
        item_id = str(rec["item_id"])
        if item_id in exp_of:
            raise DuplicateItemError(f"item {item_id!r} appears twice in exp source")
        if item_id not in base_seen:
            raise MissingItemError(f"item {item_id!r} present in exp source only")
        w = _check_weight(item_id, rec["weight"])
        cluster, base_w, attrs = base_seen[item_id]
        if w != base_w:
            raise WeightMismatchError(
                f"item {item_id!r}: weight {base_w} in base vs {w} in exp")
        merged = dict(rec.get("attributes") or {})
        merged.update(attrs)
        items[item_id] = Item(item_id, base_w, merged)
        base_of[item_id] = cluster
        exp_of[item_id] = str(rec["cluster_id"])

    missing = set(base_seen) - set(exp_of)
    if missing:
        raise MissingItemError(
            f"{len(missing)} item(s) present in base source only, e.g. {sorted(missing)[0]!r}")
    return ClusteringPair(items, base_of, exp_of)


def load_joined_records(records: Iterable[Mapping]) -> ClusteringPair:
    """Build a ClusteringPair from joined records (one row per item)."""
    items: dict[str, Item] = {}
    base_of: dict[str, str] = {}
    exp_of: dict[str, str] = {}
    for rec in records:
        item_id = str(rec["item_id"])
        if item_id in items:
            raise DuplicateItemError(f"item {item_id!r} appears twice")
        w = _check_weight(item_id, rec["weight"])
        items[item_id] = Item(item_id, w, dict(rec.get("attributes") or {}))
        base_of[item_id] = str(rec["base_cluster_id"])
        exp_of[item_id] = str(rec["exp_cluster_id"])
    return ClusteringPair(items, base_of, exp_of)


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_jsonl(path: str | Path, records: Iterable[Mapping]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def load_clustering_files(base_path: str | Path, exp_path: str | Path) -> ClusteringPair:
    return load_clustering_pair(read_jsonl(base_path), read_jsonl(exp_path))


def load_joined_file(path: str | Path) -> ClusteringPair:
    return load_joined_records(read_jsonl(path))


def joined_records(cp: ClusteringPair) -> Iterator[dict]:
    for i in sorted(cp.items):
        item = cp.items[i]
        yield {
            "item_id": i,
            "base_cluster_id": cp.base_of[i],
            "exp_cluster_id": cp.exp_of[i],
            "weight": item.weight,
            "attributes": dict(item.attributes),
        }


def dump_joined(cp: ClusteringPair, path: str | Path) -> int:
    return write_jsonl(path, joined_records(cp))
