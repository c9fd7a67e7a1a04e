"""Human equivalence verdicts for sampled pairs, and the corrections they need.

Self pairs are answered automatically (an equivalence is reflexive) and
never exported for human judging. Pairs left without a usable verdict
are excluded from estimation; per-class reweights restore each class's
original draw total so the mixed-class estimators stay unbiased.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from ._rng import keyed, mix64, to_unit
from .errors import UnknownPairError
from .pairs import ItemPair
from .sampling import SampledPairSet

REFLEXIVE_SOURCE = "reflexive"

REWEIGHT_CLASSES = ("self", "split", "merge", "intersection")


class VerdictValue(str, Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    i: str
    j: str
    value: VerdictValue
    source: str
    timestamp: float = 0.0


@dataclass
class JudgementTask:
    """One judging question: is (i, j) truly equivalent?"""

    i: str
    j: str
    draw_count: int
    payload: dict
    status: str = "pending"  # pending | answered | skipped


@dataclass(frozen=True)
class JudgedSample:
    """A sample joined with its verdicts and missing-judgement reweights.

    class_reweights[c] is sampled_draws[c] / usable_draws[c]; usable draws
    carrying that weight restore the class's sampled draw total exactly
    (the ratio times the usable count is the sampled count by construction).
    """

    sample_set: SampledPairSet
    verdicts: Mapping[tuple[str, str], VerdictValue]
    class_reweights: Mapping[str, float]
    sampled_draws: Mapping[str, int]
    usable_draws: Mapping[str, int]
    unestimable_classes: frozenset[str]
    conflicts: tuple[tuple[str, str], ...] = ()

    def usable(self, pair: ItemPair) -> bool:
        return self.verdicts.get((pair.i, pair.j)) in (
            VerdictValue.EQUIVALENT, VerdictValue.NOT_EQUIVALENT)

    def is_equivalent(self, pair: ItemPair) -> bool:
        return self.verdicts[(pair.i, pair.j)] is VerdictValue.EQUIVALENT

    def reweight(self, pair: ItemPair) -> float:
        return self.class_reweights[pair.reweight_class]


def task_payload(cp, pair: ItemPair, snippet_size: int = 8) -> dict:
    """Display payload for one judging question: the items' attributes and
    short membership snippets of the vantage item's clusters."""
    base = cp.base_cluster(pair.i)
    exp = cp.exp_cluster(pair.i)
    return {
        "class": pair.pair_class.value,
        "i_attributes": dict(cp.items[pair.i].attributes),
        "j_attributes": dict(cp.items[pair.j].attributes),
        "base_cluster_size": len(base),
        "exp_cluster_size": len(exp),
        "base_snippet": list(base[:snippet_size]),
        "exp_snippet": list(exp[:snippet_size]),
    }


def export_tasks(sample_set: SampledPairSet,
                 payloads: Mapping[tuple[str, str], dict] | None = None) -> list[JudgementTask]:
    """One pending task per distinct non-self sampled pair.

    Ordered by descending draw count (most influential questions first),
    ties by pair id.
    """
    tasks = []
    for d in sample_set.draws:
        if d.pair.is_self:
            continue
        payload = dict(payloads.get((d.pair.i, d.pair.j), {})) if payloads else {}
        payload.setdefault("class", d.pair.pair_class.value)
        tasks.append(JudgementTask(d.pair.i, d.pair.j, d.count, payload))
    tasks.sort(key=lambda t: (-t.draw_count, t.i, t.j))
    return tasks


def ingest_verdicts(sample_set: SampledPairSet,
                    records: Iterable[Verdict]) -> JudgedSample:
    """Join verdicts onto the sample and compute class reweights.

    Last write wins per (pair, source); disagreement between sources is
    surfaced as a conflict and the pair is excluded from estimation
    rather than silently adjudicated. Replaying the same records is
    idempotent.
    """
    sampled: dict[tuple[str, str], ItemPair] = {
        (d.pair.i, d.pair.j): d.pair for d in sample_set.draws}

    by_source: dict[tuple[str, str], dict[str, VerdictValue]] = {}
    for rec in records:
        key = (rec.i, rec.j)
        pair = sampled.get(key)
        if pair is None:
            raise UnknownPairError(f"verdict for unsampled pair {key!r}")
        if pair.is_self:
            raise UnknownPairError(
                f"self pair {key!r} is answered reflexively and cannot be judged")
        by_source.setdefault(key, {})[rec.source] = rec.value

    verdicts: dict[tuple[str, str], VerdictValue] = {}
    conflicts: list[tuple[str, str]] = []
    for key, values in by_source.items():
        decided = {v for v in values.values() if v is not VerdictValue.UNKNOWN}
        if len(decided) > 1:
            conflicts.append(key)
            verdicts[key] = VerdictValue.UNKNOWN
        elif decided:
            verdicts[key] = decided.pop()
        else:
            verdicts[key] = VerdictValue.UNKNOWN
    for key, pair in sampled.items():
        if pair.is_self:
            verdicts[key] = VerdictValue.EQUIVALENT

    sampled_counts = {cls: 0 for cls in REWEIGHT_CLASSES}
    usable_counts = {cls: 0 for cls in REWEIGHT_CLASSES}
    for d in sample_set.draws:
        cls = d.pair.reweight_class
        sampled_counts[cls] += d.count
        if verdicts.get((d.pair.i, d.pair.j)) in (
                VerdictValue.EQUIVALENT, VerdictValue.NOT_EQUIVALENT):
            usable_counts[cls] += d.count

    reweights: dict[str, float] = {}
    unestimable = []
    for cls in REWEIGHT_CLASSES:
        if sampled_counts[cls] == 0:
            reweights[cls] = 1.0
        elif usable_counts[cls] == 0:
            reweights[cls] = float("nan")
            unestimable.append(cls)
        else:
            reweights[cls] = sampled_counts[cls] / usable_counts[cls]

    return JudgedSample(sample_set, verdicts, reweights, sampled_counts,
                        usable_counts, frozenset(unestimable),
                        tuple(sorted(conflicts)))


def synthetic_judge(tasks: Iterable[JudgementTask], truth,
                    unanswerable_rate: float = 0.0, seed: int = 0,
                    source: str = "synthetic") -> list[Verdict]:
    """Deterministic stand-in for the human judging process.

    Answers from the ground-truth table; a seeded keyed coin marks the
    configured fraction of tasks as unknown, the same ones on every run.
    """
    records = []
    for task in tasks:
        if unanswerable_rate > 0.0:
            h = keyed(keyed(mix64(seed ^ 0x5E1F), _fingerprint(task.i)),
                      _fingerprint(task.j))
            if to_unit(h) < unanswerable_rate:
                records.append(Verdict(task.i, task.j, VerdictValue.UNKNOWN, source))
                continue
        same = truth.equivalent(task.i, task.j)
        value = VerdictValue.EQUIVALENT if same else VerdictValue.NOT_EQUIVALENT
        records.append(Verdict(task.i, task.j, value, source))
    return records


def _fingerprint(s: str) -> int:
    h = 0
    for b in s.encode("utf-8"):
        h = mix64(h ^ b)
    return h


# ---------------------------------------------------------------------------
# persistence

def verdict_record(v: Verdict) -> dict:
    return {"i": v.i, "j": v.j, "value": v.value.value,
            "source": v.source, "timestamp": v.timestamp}


def write_verdicts(records: Iterable[Verdict], path: str | Path,
                   append: bool = False) -> int:
    mode = "a" if append else "w"
    n = 0
    with open(path, mode, encoding="utf-8") as fh:
        for v in records:
            fh.write(json.dumps(verdict_record(v), sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_verdicts(path: str | Path) -> Iterator[Verdict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            yield Verdict(rec["i"], rec["j"], VerdictValue(rec["value"]),
                          rec.get("source", "unknown"), float(rec.get("timestamp", 0.0)))


def task_record(task: JudgementTask) -> dict:
    return {"i": task.i, "j": task.j, "draw_count": task.draw_count,
            "payload": task.payload, "status": task.status}


def write_tasks(tasks: Iterable[JudgementTask], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps(task_record(task), sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_tasks(path: str | Path) -> list[JudgementTask]:
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            tasks.append(JudgementTask(rec["i"], rec["j"], int(rec["draw_count"]),
                                       rec.get("payload", {}),
                                       rec.get("status", "pending")))
    return tasks
