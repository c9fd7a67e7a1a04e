"""Brute-force exact metrics and seeded synthetic instances.

The exact evaluator is the referee for all estimator and identity
tests: it computes every metric twice, once from per-item region
algebra and once from explicit pair sums, and refuses to answer if the
two disagree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    InstanceTooLargeError,
    InvalidParamsError,
    OracleIncompleteError,
)
from .model import (
    AffectedPartition,
    ClusteringPair,
    affected_partition,
    dump_joined,
    load_joined_records,
    write_jsonl,
)
from .pairs import PairClass, enumerate_pairs, pair_count, pair_totals
from .pointwise import (
    affected_index_split,
    item_impact,
    item_quality,
    lift,
    precision_pair,
)

DEFAULT_PAIR_GUARD = 2_000_000


class TruthTable:
    """Ground-truth equivalence stored as a partition, so transitivity
    is structural rather than asserted."""

    def __init__(self, class_of: Mapping[str, str]):
        self.class_of = dict(class_of)

    def equivalent(self, i: str, j: str) -> bool:
        try:
            return self.class_of[i] == self.class_of[j]
        except KeyError as exc:
            raise OracleIncompleteError(f"no truth class for item {exc.args[0]!r}") from exc

    def classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for i, cls in self.class_of.items():
            out.setdefault(cls, []).append(i)
        return out

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[str]]) -> "TruthTable":
        mapping = {}
        for idx, members in enumerate(classes):
            for i in members:
                if i in mapping:
                    raise InvalidParamsError(f"item {i!r} in two truth classes")
                mapping[i] = f"t{idx:06d}"
        return cls(mapping)

    @classmethod
    def read(cls, path: str | Path) -> "TruthTable":
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                mapping[str(rec["item_id"])] = str(rec["truth_class_id"])
        return cls(mapping)

    def write(self, path: str | Path) -> int:
        return write_jsonl(path, ({"item_id": i, "truth_class_id": c}
                                  for i, c in sorted(self.class_of.items())))


OVERALL_METRICS = (
    "jaccard_distance", "split_distance", "merge_distance", "jaccard_index",
    "affected_jaccard_index", "unaffected_jaccard_index",
    "good_split_distance", "bad_split_distance",
    "good_merge_distance", "bad_merge_distance",
    "good_distance", "bad_distance",
    "affected_good_index", "affected_bad_index",
    "delta_precision",
)


@dataclass(frozen=True)
class ExactMetrics:
    overall: dict[str, float]
    per_item: dict[str, dict[str, float]]
    base_clusters: dict[str, dict[str, float]]
    exp_clusters: dict[str, dict[str, float]]


def exact_metrics(cp: ClusteringPair, truth: TruthTable,
                  max_pairs: int = DEFAULT_PAIR_GUARD,
                  tolerance: float = 1e-9) -> ExactMetrics:
    """Every impact and quality metric at item, cluster, and overall level.

    Raises InstanceTooLargeError above the pair guard and ValueError if
    the region-algebra and pair-sum computations disagree beyond the
    tolerance.
    """
    partition = affected_partition(cp)
    n_pairs = pair_count(cp, partition)
    if n_pairs > max_pairs:
        raise InstanceTooLargeError(f"{n_pairs} pairs exceeds guard {max_pairs}")

    per_item: dict[str, dict[str, float]] = {}
    for i in cp.items:
        impact = item_impact(cp, i)
        quality = item_quality(cp, i, truth)
        per_item[i] = {
            "jaccard_distance": impact.jaccard_distance,
            "split_distance": impact.split_distance,
            "merge_distance": impact.merge_distance,
            "jaccard_index": impact.jaccard_index,
            "good_split_distance": quality.good_split_distance,
            "bad_split_distance": quality.bad_split_distance,
            "good_merge_distance": quality.good_merge_distance,
            "bad_merge_distance": quality.bad_merge_distance,
            "good_index": quality.good_index,
            "bad_index": quality.bad_index,
            "good_distance": quality.good_distance,
            "bad_distance": quality.bad_distance,
            "delta_precision": quality.delta_precision,
        }

    def lifted(metric: str, ids) -> float:
        return lift({i: per_item[i][metric] for i in ids}, cp, ids)

    affected_ji, unaffected_ji = affected_index_split(cp, partition)
    weight_ratio = partition.affected_weight / cp.total_weight
    overall = {m: lifted(m, cp.items) for m in per_item[next(iter(cp.items))]}
    overall["affected_jaccard_index"] = affected_ji
    overall["unaffected_jaccard_index"] = unaffected_ji
    overall["affected_good_index"] = (
        lifted("good_index", partition.affected_ids) * weight_ratio
        if partition.affected_ids else 0.0)
    overall["affected_bad_index"] = (
        lifted("bad_index", partition.affected_ids) * weight_ratio
        if partition.affected_ids else 0.0)

    _crosscheck_pair_sums(cp, partition, truth, overall, tolerance)

    base_clusters = {c: {m: lifted(m, ids) for m in per_item[ids[0]]}
                     for c, ids in cp.base_members.items()}
    exp_clusters = {c: {m: lifted(m, ids) for m in per_item[ids[0]]}
                    for c, ids in cp.exp_members.items()}
    return ExactMetrics(overall, per_item, base_clusters, exp_clusters)


def _crosscheck_pair_sums(cp: ClusteringPair, partition: AffectedPartition,
                          truth: TruthTable, overall: dict[str, float],
                          tolerance: float) -> None:
    sums = {
        "split_distance": 0.0, "merge_distance": 0.0,
        "affected_jaccard_index": 0.0,
        "good_split_distance": 0.0, "bad_split_distance": 0.0,
        "good_merge_distance": 0.0, "bad_merge_distance": 0.0,
        "affected_good_index": 0.0, "affected_bad_index": 0.0,
        "delta_precision": 0.0,
    }
    for pair in enumerate_pairs(cp, partition):
        w = pair.sampling_weight
        same = pair.is_self or truth.equivalent(pair.i, pair.j)
        if pair.pair_class is PairClass.SPLIT:
            sums["split_distance"] += w
            sums["bad_split_distance" if same else "good_split_distance"] += w
        elif pair.pair_class is PairClass.MERGE:
            sums["merge_distance"] += w
            sums["good_merge_distance" if same else "bad_merge_distance"] += w
        else:
            sums["affected_jaccard_index"] += w
            sums["affected_good_index" if same else "affected_bad_index"] += w
        if same:
            sums["delta_precision"] += w * pair.label
    for metric, value in sums.items():
        if not math.isclose(value, overall[metric], abs_tol=tolerance):
            raise ValueError(
                f"internal cross-check failed for {metric}: "
                f"pair sum {value} vs region algebra {overall[metric]}")

    totals = pair_totals(cp, partition)
    for name, value in [("split_total", sums["split_distance"]),
                        ("merge_total", sums["merge_distance"]),
                        ("stable_total", sums["affected_jaccard_index"])]:
        if not math.isclose(getattr(totals, name), value, abs_tol=tolerance):
            raise ValueError(f"pair totals cross-check failed for {name}")


def delta_precision_direct(cp: ClusteringPair, truth: TruthTable) -> float:
    """Lifted Precision_Exp - Precision_Base, computed set-theoretically."""
    deltas = {}
    for i in cp.items:
        base_prec, exp_prec = precision_pair(cp, i, truth)
        deltas[i] = exp_prec - base_prec
    return lift(deltas, cp, cp.items)


def jaccard_distance_exact(weights: Mapping[str, int],
                           assign_a: Mapping[str, str],
                           assign_b: Mapping[str, str]) -> Fraction:
    """Overall distance between two assignments with exact rational arithmetic.

    Weights must be integers (or Fractions); used to check the metric
    axioms without floating-point slack.
    """
    members_a: dict[str, list[str]] = {}
    members_b: dict[str, list[str]] = {}
    for i in weights:
        members_a.setdefault(assign_a[i], []).append(i)
        members_b.setdefault(assign_b[i], []).append(i)
    total = Fraction(sum(weights.values()))
    acc = Fraction(0)
    for i, w in weights.items():
        in_a = set(members_a[assign_a[i]])
        in_b = set(members_b[assign_b[i]])
        union_w = Fraction(sum(weights[j] for j in in_a | in_b))
        diff_w = Fraction(sum(weights[j] for j in in_a ^ in_b))
        acc += Fraction(w) * diff_w / union_w
    return acc / total


# ---------------------------------------------------------------------------
# synthetic instances

@dataclass(frozen=True)
class GeneratorParams:
    """Controls for the seeded instance generator.

    Rates are fractions of eligible clusters touched by each change
    kind; exp_mode 'truth' makes the experiment the ideal clustering
    (every change good by construction), 'identical' disables changes.
    """

    n_items: int = 1000
    mean_class_size: float = 8.0
    weight_dist: str = "unit"  # unit | uniform | lognormal
    base_split_rate: float = 0.2
    base_merge_rate: float = 0.2
    base_noise_rate: float = 0.0  # items misfiled into a foreign base cluster
    good_split_rate: float = 0.5
    bad_split_rate: float = 0.15
    good_merge_rate: float = 0.5
    bad_merge_rate: float = 0.15
    exp_mode: str = "perturb"  # perturb | truth | identical
    attribute_kinds: tuple[str, ...] = ("alpha", "beta", "gamma")

    def validate(self) -> None:
        if self.n_items < 1:
            raise InvalidParamsError("n_items must be positive")
        if self.mean_class_size < 1:
            raise InvalidParamsError("mean_class_size must be >= 1")
        if self.weight_dist not in ("unit", "uniform", "lognormal"):
            raise InvalidParamsError(f"unknown weight_dist {self.weight_dist!r}")
        if self.exp_mode not in ("perturb", "truth", "identical"):
            raise InvalidParamsError(f"unknown exp_mode {self.exp_mode!r}")
        for name in ("base_split_rate", "base_merge_rate", "base_noise_rate",
                     "good_split_rate", "bad_split_rate", "good_merge_rate",
                     "bad_merge_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise InvalidParamsError(f"{name} must be in [0, 1]")


@dataclass(frozen=True)
class SyntheticInstance:
    cp: ClusteringPair
    truth: TruthTable
    params: GeneratorParams
    seed: int

    def dump(self, clustering_path: str | Path, truth_path: str | Path) -> None:
        dump_joined(self.cp, clustering_path)
        self.truth.write(truth_path)


def _split_cluster(rng, members: list[str], truth_of: dict[str, str],
                   aligned: bool) -> tuple[list[str], list[str]] | None:
    """Split off part of a cluster; aligned splits follow truth boundaries
    (good from every vantage), unaligned ones break a truth class."""
    if aligned:
        groups: dict[str, list[str]] = {}
        for m in members:
            groups.setdefault(truth_of[m], []).append(m)
        if len(groups) < 2:
            return None
        keys = sorted(groups)
        out = groups[keys[int(rng.integers(len(keys)))]]
        rest = [m for m in members if m not in set(out)]
        return rest, list(out)
    big = None
    for cls in sorted({truth_of[m] for m in members}):
        group = [m for m in members if truth_of[m] == cls]
        if len(group) >= 2:
            big = group
            break
    if big is None:
        return None
    cut = len(big) // 2
    moved = set(big[:cut]) if cut else {big[0]}
    rest = [m for m in members if m not in moved]
    if not rest:
        return None
    return rest, sorted(moved)


def generate_instance(params: GeneratorParams, seed: int) -> SyntheticInstance:
    """Deterministic instance: truth partition, a noisy Base, and an Exp
    derived from Base by good/bad splits and merges at the given rates."""
    params.validate()
    rng = np.random.default_rng(seed)
    width = max(6, len(str(params.n_items)))
    ids = [f"i{n:0{width}d}" for n in range(params.n_items)]

    if params.weight_dist == "unit":
        weights = np.ones(params.n_items)
    elif params.weight_dist == "uniform":
        weights = rng.uniform(0.5, 2.0, params.n_items)
    else:
        weights = rng.lognormal(0.0, 0.5, params.n_items)

    kinds = rng.choice(list(params.attribute_kinds), params.n_items)

    # truth classes with sizes around the configured mean
    truth_classes: list[list[str]] = []
    idx = 0
    while idx < params.n_items:
        size = int(rng.integers(1, max(2, int(2 * params.mean_class_size))))
        truth_classes.append(ids[idx:idx + size])
        idx += size
    truth = TruthTable.from_classes(truth_classes)
    truth_of = truth.class_of

    # Base: the truth with seeded damage, so Exp has something to repair
    base = [list(c) for c in truth_classes]
    splittable = [n for n, c in enumerate(base) if len(c) >= 2]
    for n in _pick(rng, splittable, params.base_split_rate):
        cut = max(1, len(base[n]) // 2)
        base.append(base[n][cut:])
        base[n] = base[n][:cut]
    merged = _merge_some(rng, base, params.base_merge_rate, truth_of, want_same=None)
    base = merged
    if params.base_noise_rate > 0.0 and len(base) >= 2:
        n_moved = int(round(params.base_noise_rate * params.n_items))
        movable = rng.choice(params.n_items, size=min(n_moved, params.n_items),
                             replace=False)
        home = {m: n for n, c in enumerate(base) for m in c}
        for item in (ids[int(m)] for m in sorted(movable)):
            src = home[item]
            if len(base[src]) <= 1:
                continue
            dst = int(rng.integers(len(base)))
            if dst == src:
                continue
            base[src].remove(item)
            base[dst].append(item)
            home[item] = dst

    if params.exp_mode == "truth":
        exp = [list(c) for c in truth_classes]
    elif params.exp_mode == "identical":
        exp = [list(c) for c in base]
    else:
        exp = [list(c) for c in base]
        impure = [n for n, c in enumerate(exp)
                  if len({truth_of[m] for m in c}) >= 2]
        for n in _pick(rng, impure, params.good_split_rate):
            result = _split_cluster(rng, exp[n], truth_of, aligned=True)
            if result:
                exp[n], moved = result
                exp.append(moved)
        breakable = [n for n, c in enumerate(exp)
                     if any(sum(1 for m in c if truth_of[m] == t) >= 2
                            for t in {truth_of[m] for m in c})]
        for n in _pick(rng, breakable, params.bad_split_rate):
            result = _split_cluster(rng, exp[n], truth_of, aligned=False)
            if result:
                exp[n], moved = result
                exp.append(moved)
        exp = _merge_some(rng, exp, params.good_merge_rate, truth_of, want_same=True)
        exp = _merge_some(rng, exp, params.bad_merge_rate, truth_of, want_same=False)

    records = []
    base_of = _assignment(base, "b")
    exp_of = _assignment(exp, "e")
    for n, item_id in enumerate(ids):
        records.append({
            "item_id": item_id,
            "base_cluster_id": base_of[item_id],
            "exp_cluster_id": exp_of[item_id],
            "weight": float(weights[n]),
            "attributes": {"kind": str(kinds[n])},
        })
    return SyntheticInstance(load_joined_records(records), truth, params, seed)


def _pick(rng, candidates: list[int], rate: float) -> list[int]:
    n = int(round(rate * len(candidates)))
    if n == 0 or not candidates:
        return []
    chosen = rng.choice(len(candidates), size=min(n, len(candidates)), replace=False)
    return [candidates[int(c)] for c in sorted(chosen)]


def _dominant(truth_of: dict[str, str], members: list[str]) -> str:
    counts: dict[str, int] = {}
    for m in members:
        counts[truth_of[m]] = counts.get(truth_of[m], 0) + 1
    return max(sorted(counts), key=counts.get)


def _merge_some(rng, clusters: list[list[str]], rate: float,
                truth_of: dict[str, str], want_same: bool | None) -> list[list[str]]:
    """Merge cluster pairs; want_same selects pairs with equal (True),
    different (False), or any (None) dominant truth class."""
    if rate <= 0.0 or len(clusters) < 2:
        return clusters
    by_dominant: dict[str, list[int]] = {}
    for n, c in enumerate(clusters):
        by_dominant.setdefault(_dominant(truth_of, c), []).append(n)

    eligible_pairs: list[tuple[int, int]] = []
    if want_same is None or want_same:
        for group in by_dominant.values():
            eligible_pairs.extend((group[a], group[a + 1])
                                  for a in range(0, len(group) - 1, 2))
    if want_same is None or not want_same:
        keys = sorted(by_dominant)
        for a in range(0, len(keys) - 1, 2):
            eligible_pairs.append((by_dominant[keys[a]][0], by_dominant[keys[a + 1]][0]))

    taken: set[int] = set()
    removed: set[int] = set()
    for a, b in _pick_pairs(rng, eligible_pairs, rate):
        if a in taken or b in taken:
            continue
        taken.update((a, b))
        clusters[a] = clusters[a] + clusters[b]
        removed.add(b)
    return [c for n, c in enumerate(clusters) if n not in removed]


def _pick_pairs(rng, pairs: list[tuple[int, int]], rate: float) -> list[tuple[int, int]]:
    n = int(round(rate * len(pairs)))
    if n == 0 or not pairs:
        return []
    chosen = rng.choice(len(pairs), size=min(n, len(pairs)), replace=False)
    return [pairs[int(c)] for c in sorted(chosen)]


def _assignment(clusters: list[list[str]], prefix: str) -> dict[str, str]:
    out = {}
    for n, members in enumerate(clusters):
        for m in members:
            out[m] = f"{prefix}{n:06d}"
    return out
