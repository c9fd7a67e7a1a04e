"""Seeded weighted sampling of pairs with replacement, optionally stratified.

The sampler is a single pass over the pair stream. Each stratum keeps
k independent weighted reservoirs (k = the stratum's draw count); a pair
with weight w replaces a Binomial(k, w/C) random subset of them, where C
is the cumulative stream weight. That is equivalent to k independent
weighted draws and needs no knowledge of the total weight up front.
All randomness is keyed by (seed, stratum, pair ordinal), so identical
inputs give byte-identical samples on every backend.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from . import kernels
from ._rng import stratum_key
from .errors import EmptyStratumError
from .pairs import ItemPair, PairClass

CHUNK_PAIRS = 65536

STRATUM_ALL = "all"
STRATUM_DIFF = "diff"
STRATUM_STABLE = "stable"
_STRATUM_TAGS = {STRATUM_ALL: 0, STRATUM_DIFF: 1, STRATUM_STABLE: 2}


@dataclass(frozen=True)
class SingleStratum:
    """One stratum over the whole pair population."""


@dataclass(frozen=True)
class TwoStrata:
    """Separate draw budgets for diff pairs (splits+merges) and stable pairs."""

    diff_draws: int
    stable_draws: int


@dataclass(frozen=True)
class SamplePlan:
    total_draws: int
    seed: int
    strata: SingleStratum | TwoStrata = field(default_factory=SingleStratum)
    weight_floor: float = 0.0

    def __post_init__(self):
        if self.total_draws < 0:
            raise ValueError("total_draws must be nonnegative")
        if isinstance(self.strata, TwoStrata):
            if self.strata.diff_draws + self.strata.stable_draws != self.total_draws:
                raise ValueError("stratum draws must sum to total_draws")

    def draws_per_stratum(self) -> dict[str, int]:
        if isinstance(self.strata, TwoStrata):
            return {STRATUM_DIFF: self.strata.diff_draws,
                    STRATUM_STABLE: self.strata.stable_draws}
        return {STRATUM_ALL: self.total_draws}


def stratum_of(pair: ItemPair, plan: SamplePlan) -> str:
    if isinstance(plan.strata, TwoStrata):
        return STRATUM_STABLE if pair.pair_class is PairClass.STABLE else STRATUM_DIFF
    return STRATUM_ALL


@dataclass(frozen=True)
class SampledDraw:
    pair: ItemPair
    count: int
    weight: float  # observation weight: the draw count, or w for exhaustive sets
    stratum: str


@dataclass(frozen=True)
class SampledPairSet:
    """Multiset of drawn pairs plus the bookkeeping estimators need."""

    draws: tuple[SampledDraw, ...]
    plan: SamplePlan
    class_counts: Mapping[str, int]
    strata_totals: Mapping[str, float]  # Σw actually streamed per stratum
    strata_draws: Mapping[str, int]
    exhaustive: bool = False

    @property
    def total_draws(self) -> int:
        return sum(d.count for d in self.draws)

    def is_single_stratum(self) -> bool:
        return self.exhaustive or isinstance(self.plan.strata, SingleStratum)


class _StratumState:
    def __init__(self, name: str, draws: int, seed: int):
        self.name = name
        self.draws = draws
        self.key = stratum_key(seed, _STRATUM_TAGS[name])
        self.slots = np.full(draws, -1, dtype=np.int64)
        self.stamp = np.zeros(draws, dtype=np.int64)
        self.carry = 0.0
        self.n_accepted = 0
        self.retained: dict[int, ItemPair] = {}
        self.buffer: list[ItemPair] = []

    def flush(self):
        if not self.buffer:
            return
        chunk = self.buffer
        self.buffer = []
        weights = np.array([p.sampling_weight for p in chunk], dtype=np.float64)
        start = self.n_accepted
        self.carry = kernels.reservoir_update(
            self.slots, self.stamp, self.carry, start, weights, self.key)
        self.n_accepted += len(chunk)
        retained: dict[int, ItemPair] = {}
        for v in np.unique(self.slots):
            o = int(v)
            if o < 0:
                continue
            retained[o] = chunk[o - start] if o >= start else self.retained[o]
        self.retained = retained


def sample(pairs: Iterable[ItemPair], plan: SamplePlan) -> SampledPairSet:
    """Draw plan.total_draws pairs with replacement, weighted within strata."""
    states = {name: _StratumState(name, k, plan.seed)
              for name, k in plan.draws_per_stratum().items() if k > 0}
    floor = plan.weight_floor
    for pair in pairs:
        name = stratum_of(pair, plan)
        state = states.get(name)
        if state is None:
            continue
        w = pair.sampling_weight
        if w <= 0.0 or w < floor:
            continue
        state.buffer.append(pair)
        if len(state.buffer) >= CHUNK_PAIRS:
            state.flush()

    draws: list[SampledDraw] = []
    class_counts: Counter = Counter()
    strata_totals: dict[str, float] = {}
    strata_draws: dict[str, int] = {}
    for name, state in states.items():
        state.flush()
        if state.n_accepted == 0:
            raise EmptyStratumError(
                f"stratum {name!r} has {state.draws} draws but no pairs")
        strata_totals[name] = state.carry
        strata_draws[name] = state.draws
        for ordinal, count in sorted(Counter(int(v) for v in state.slots).items()):
            pair = state.retained[ordinal]
            draws.append(SampledDraw(pair, count, float(count), name))
            class_counts[pair.pair_class.value] += count
    draws.sort(key=lambda d: (d.stratum, d.pair.i, d.pair.j))
    return SampledPairSet(tuple(draws), plan, dict(class_counts),
                          strata_totals, strata_draws)


def exhaustive_sample(pairs: Iterable[ItemPair]) -> SampledPairSet:
    """Treat every pair as drawn once with its own weight as observation weight.

    Feeding this to the estimators reproduces the exact metrics; used for
    verification and for exact reports on small instances.
    """
    draws = []
    class_counts: Counter = Counter()
    total = 0.0
    for pair in pairs:
        draws.append(SampledDraw(pair, 1, pair.sampling_weight, STRATUM_ALL))
        class_counts[pair.pair_class.value] += 1
        total += pair.sampling_weight
    draws.sort(key=lambda d: (d.stratum, d.pair.i, d.pair.j))
    plan = SamplePlan(total_draws=len(draws), seed=0)
    return SampledPairSet(tuple(draws), plan, dict(class_counts),
                          {STRATUM_ALL: total}, {STRATUM_ALL: len(draws)},
                          exhaustive=True)


def contribution(sample_set: SampledPairSet,
                 predicate: Callable[[SampledDraw], bool] | None = None) -> float:
    """Stratum-scaled contribution of the draws matching the predicate.

    Each draw contributes drawCount/N of its stratum's weight total (for
    exhaustive sets, exactly its own weight), so the trivial predicate
    returns the sampled population totals.
    """
    scale = contribution_scales(sample_set)
    total = 0.0
    for d in sample_set.draws:
        if predicate is None or predicate(d):
            total += d.weight * scale[d.stratum]
    return total


def contribution_scales(sample_set: SampledPairSet) -> dict[str, float]:
    """Per-stratum factor turning a draw's observation weight into its
    contribution: stratumTotal / (sum of observation weights)."""
    sums: dict[str, float] = {}
    for d in sample_set.draws:
        sums[d.stratum] = sums.get(d.stratum, 0.0) + d.weight
    return {name: sample_set.strata_totals[name] / total
            for name, total in sums.items()}


# ---------------------------------------------------------------------------
# persistence

def plan_to_dict(plan: SamplePlan) -> dict:
    strata: dict = {"kind": "single"}
    if isinstance(plan.strata, TwoStrata):
        strata = {"kind": "diff-stable", "diff_draws": plan.strata.diff_draws,
                  "stable_draws": plan.strata.stable_draws}
    return {"total_draws": plan.total_draws, "seed": plan.seed,
            "strata": strata, "weight_floor": plan.weight_floor}


def plan_from_dict(data: Mapping) -> SamplePlan:
    strata_data = data.get("strata", {"kind": "single"})
    if strata_data.get("kind") == "diff-stable":
        strata: SingleStratum | TwoStrata = TwoStrata(
            int(strata_data["diff_draws"]), int(strata_data["stable_draws"]))
    else:
        strata = SingleStratum()
    return SamplePlan(int(data["total_draws"]), int(data["seed"]), strata,
                      float(data.get("weight_floor", 0.0)))


def sample_meta(sample_set: SampledPairSet) -> dict:
    return {
        "plan": plan_to_dict(sample_set.plan),
        "strata_totals": dict(sample_set.strata_totals),
        "strata_draws": dict(sample_set.strata_draws),
        "exhaustive": sample_set.exhaustive,
    }


def draw_records(sample_set: SampledPairSet) -> Iterator[dict]:
    for d in sample_set.draws:
        yield {"i": d.pair.i, "j": d.pair.j, "class": d.pair.pair_class.value,
               "is_self": d.pair.is_self, "w": d.pair.sampling_weight,
               "l": d.pair.label, "draw_count": d.count, "stratum": d.stratum}


def write_sample(sample_set: SampledPairSet, path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in draw_records(sample_set):
            fh.write(json.dumps(rec, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_sample(path: str | Path, meta: Mapping) -> SampledPairSet:
    plan = plan_from_dict(meta["plan"])
    exhaustive = bool(meta.get("exhaustive", False))
    draws = []
    class_counts: Counter = Counter()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            pair = ItemPair(rec["i"], rec["j"], PairClass(rec["class"]),
                            bool(rec["is_self"]), float(rec["w"]), float(rec["l"]))
            count = int(rec["draw_count"])
            weight = pair.sampling_weight if exhaustive else float(count)
            draws.append(SampledDraw(pair, count, weight, rec["stratum"]))
            class_counts[pair.pair_class.value] += count
    return SampledPairSet(tuple(draws), plan, dict(class_counts),
                          dict(meta["strata_totals"]),
                          {k: int(v) for k, v in meta["strata_draws"].items()},
                          exhaustive=exhaustive)
