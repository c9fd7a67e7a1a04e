"""Local HTTP service for exploring a session: exact metrics, slice
drill-down over the sampled pairs, the judgement task queue, and live
estimate refresh.

Session-scoped and local-first: one evaluation run per process, no auth.
Reads are idempotent; verdict posts append to the single-writer log.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import (
    ClusterDiffError,
    PortUnavailableError,
    UnknownAttributeKeyError,
)
from .estimator import estimate_all, report_record
from .judgements import (
    Verdict,
    VerdictValue,
    export_tasks,
    ingest_verdicts,
    read_verdicts,
    task_record,
    write_verdicts,
)
from .model import affected_partition
from .pairs import pair_attributes
from .pointwise import impact_report_rows, item_impact
from .sampling import SampledDraw, contribution_scales
from .session import SessionDirectory

MAX_SLICE_GROUPS = 1000
CONTEXT_MEMBER_CAP = 20


class SlicePredicate(BaseModel):
    key: str
    op: str = "eq"  # eq | ne
    value: str


class SliceQuery(BaseModel):
    filters: list[SlicePredicate] = []
    group_by: str | None = None


class VerdictPost(BaseModel):
    i: str
    j: str
    value: str
    source: str = "ui"


@dataclass
class SessionState:
    session: SessionDirectory
    lease_seconds: float = 300.0
    clock: Callable[[], float] = time.time
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        self.cp = self.session.load_clustering()
        self.partition = affected_partition(self.cp)
        self.totals = self.session.load_totals()
        self.sample_set = self.session.load_sample()
        self.tasks = export_tasks(self.sample_set)
        self.draws_by_pair: dict[tuple[str, str], SampledDraw] = {
            (d.pair.i, d.pair.j): d for d in self.sample_set.draws}
        self.attrs_by_pair = {
            (d.pair.i, d.pair.j): {**pair_attributes(self.cp, d.pair),
                                   "stratum": d.stratum}
            for d in self.sample_set.draws}
        self.attribute_keys = sorted({k for attrs in self.attrs_by_pair.values()
                                      for k in attrs})
        self.leases: dict[tuple[str, str], float] = {}
        self._estimates_cache: tuple[int, list] | None = None
        if not self.session.verdicts_file.exists():
            self.session.verdicts_file.touch()

    # ---- verdict log ----

    def read_log(self) -> list[Verdict]:
        return list(read_verdicts(self.session.verdicts_file))

    def answered_pairs(self) -> set[tuple[str, str]]:
        return {(v.i, v.j) for v in self.read_log()}

    def post_verdict(self, post: VerdictPost) -> dict:
        try:
            value = VerdictValue(post.value)
        except ValueError:
            raise HTTPException(400, detail=f"invalid verdict value {post.value!r}")
        key = (post.i, post.j)
        draw = self.draws_by_pair.get(key)
        if draw is None:
            raise HTTPException(409, detail=f"UnknownPair: {key!r} is not in the sample")
        if draw.pair.is_self:
            raise HTTPException(409, detail="UnknownPair: self pairs are answered reflexively")
        with self._lock:
            write_verdicts([Verdict(post.i, post.j, value, post.source,
                                    timestamp=self.clock())],
                           self.session.verdicts_file, append=True)
            self.leases.pop(key, None)
            self._estimates_cache = None
        return {"status": "recorded", "i": post.i, "j": post.j, "value": value.value}

    # ---- estimates ----

    def estimates(self) -> dict:
        log = self.read_log()
        with self._lock:
            if self._estimates_cache and self._estimates_cache[0] == len(log):
                reports, js = self._estimates_cache[1]
            else:
                js = ingest_verdicts(self.sample_set, log)
                reports = estimate_all(
                    js, self.totals,
                    self.partition.affected_weight / self.cp.total_weight)
                self._estimates_cache = (len(log), (reports, js))
        return {
            "reports": [report_record(r) for r in reports],
            "class_reweights": {k: (None if math.isnan(v) else v)
                                for k, v in js.class_reweights.items()},
            "unestimable_classes": sorted(js.unestimable_classes),
            "conflicts": [list(c) for c in js.conflicts],
            "n_verdicts": len(log),
        }

    # ---- task queue ----

    def next_task(self) -> dict | None:
        with self._lock:
            now = self.clock()
            answered = self.answered_pairs()
            pending = [t for t in self.tasks
                       if (t.i, t.j) not in answered
                       and self.leases.get((t.i, t.j), 0.0) <= now]
            if not pending:
                return None
            task = min(pending, key=lambda t: (-t.draw_count, t.i, t.j))
            self.leases[(task.i, task.j)] = now + self.lease_seconds
            rec = task_record(task)
            rec["lease_expires_in"] = self.lease_seconds
            return rec

    def progress(self) -> dict:
        answered = self.answered_pairs()
        per_class: dict[str, dict[str, int]] = {}
        for t in self.tasks:
            cls = t.payload.get("class", "unknown")
            slot = per_class.setdefault(cls, {"answered": 0, "total": 0})
            slot["total"] += 1
            if (t.i, t.j) in answered:
                slot["answered"] += 1
        return {
            "tasks_total": len(self.tasks),
            "tasks_answered": sum(1 for t in self.tasks if (t.i, t.j) in answered),
            "per_class": per_class,
        }

    # ---- slices ----

    def slice(self, query: SliceQuery) -> dict:
        for pred in query.filters:
            if pred.key not in self.attribute_keys:
                raise UnknownAttributeKeyError(f"unknown attribute key {pred.key!r}")
            if pred.op not in ("eq", "ne"):
                raise UnknownAttributeKeyError(f"unknown predicate op {pred.op!r}")
        if query.group_by is not None and query.group_by not in self.attribute_keys:
            raise UnknownAttributeKeyError(f"unknown group-by key {query.group_by!r}")

        scales = contribution_scales(self.sample_set)

        def matches(attrs: dict) -> bool:
            for pred in query.filters:
                value = attrs.get(pred.key, "")
                if pred.op == "eq" and value != pred.value:
                    return False
                if pred.op == "ne" and value == pred.value:
                    return False
            return True

        groups: dict[str, dict] = {}
        total_contribution = 0.0
        total_draws = 0
        for d in self.sample_set.draws:
            attrs = self.attrs_by_pair[(d.pair.i, d.pair.j)]
            if not matches(attrs):
                continue
            share = d.weight * scales[d.stratum]
            total_contribution += share
            total_draws += d.count
            key = attrs.get(query.group_by, "") if query.group_by else "(all)"
            g = groups.setdefault(key, {"group": key, "draws": 0, "contribution": 0.0,
                                        "split_contribution": 0.0,
                                        "merge_contribution": 0.0})
            g["draws"] += d.count
            g["contribution"] += share
            if attrs["class"] == "split":
                g["split_contribution"] += share
            elif attrs["class"] == "merge":
                g["merge_contribution"] += share

        ordered = sorted(groups.values(), key=lambda g: (-g["contribution"], g["group"]))
        if len(ordered) > MAX_SLICE_GROUPS:
            rest = ordered[MAX_SLICE_GROUPS:]
            other = {"group": "(other)",
                     "draws": sum(g["draws"] for g in rest),
                     "contribution": sum(g["contribution"] for g in rest),
                     "split_contribution": sum(g["split_contribution"] for g in rest),
                     "merge_contribution": sum(g["merge_contribution"] for g in rest)}
            ordered = ordered[:MAX_SLICE_GROUPS] + [other]
        for g in ordered:
            g["share"] = g["contribution"] / total_contribution if total_contribution else 0.0
        return {"groups": ordered, "total_contribution": total_contribution,
                "total_draws": total_draws, "attribute_keys": self.attribute_keys}

    # ---- pair detail ----

    def pair_detail(self, i: str, j: str) -> dict:
        key = (i, j)
        draw = self.draws_by_pair.get(key)
        if draw is None:
            raise HTTPException(404, detail=f"pair {key!r} is not in the sample")
        cp = self.cp

        def annotate(member: str) -> dict:
            in_base = cp.in_base_of(i, member)
            in_exp = cp.in_exp_of(i, member)
            region = "both" if in_base and in_exp else ("base_only" if in_base else "exp_only")
            return {"id": member, "weight": cp.weight(member), "region": region,
                    "attributes": dict(cp.items[member].attributes)}

        base_members = cp.base_cluster(i)
        exp_members = cp.exp_cluster(i)
        verdict = None
        for v in self.read_log():
            if (v.i, v.j) == key:
                verdict = v.value.value
        return {
            "i": i, "j": j,
            "class": draw.pair.pair_class.value,
            "is_self": draw.pair.is_self,
            "w": draw.pair.sampling_weight,
            "l": draw.pair.label,
            "draw_count": draw.count,
            "stratum": draw.stratum,
            "verdict": verdict,
            "attributes": self.attrs_by_pair[key],
            "i_attributes": dict(cp.items[i].attributes),
            "j_attributes": dict(cp.items[j].attributes),
            "base_cluster": [annotate(m) for m in base_members[:CONTEXT_MEMBER_CAP]],
            "exp_cluster": [annotate(m) for m in exp_members[:CONTEXT_MEMBER_CAP]],
            "base_cluster_size": len(base_members),
            "exp_cluster_size": len(exp_members),
        }

    def overview(self) -> dict:
        cp = self.cp
        impacts = {i: item_impact(cp, i) for i in cp.items}
        total = cp.total_weight

        def lifted(metric: str) -> float:
            return sum(cp.weight(i) * getattr(impacts[i], metric) for i in cp.items) / total

        return {
            "items": len(cp.items),
            "total_weight": total,
            "affected_items": len(self.partition.affected_ids),
            "affected_weight_fraction": self.partition.affected_weight / total,
            "jaccard_distance": lifted("jaccard_distance"),
            "split_distance": lifted("split_distance"),
            "merge_distance": lifted("merge_distance"),
            "jaccard_index": lifted("jaccard_index"),
            "affected_jaccard_index": self.totals.stable_total,
            "delta_precision_multiplier": self.totals.delta_precision_multiplier,
            "sample": {
                "total_draws": self.sample_set.total_draws,
                "distinct_pairs": len(self.sample_set.draws),
                "class_counts": dict(self.sample_set.class_counts),
                "strata_draws": dict(self.sample_set.strata_draws),
            },
            "progress": self.progress(),
        }


def create_app(state: SessionState, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="clusterdiff explore service")

    @app.exception_handler(ClusterDiffError)
    async def _domain_error(_, exc: ClusterDiffError):
        from fastapi.responses import JSONResponse

        status = 400 if isinstance(exc, UnknownAttributeKeyError) else 500
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.get("/api/overview")
    def overview():
        return state.overview()

    @app.get("/api/metrics/exact")
    def metrics_exact():
        return {"rows": list(impact_report_rows(state.cp, state.partition))}

    @app.get("/api/estimates")
    def estimates():
        return state.estimates()

    @app.post("/api/slices/query")
    def slices_query(query: SliceQuery):
        return state.slice(query)

    @app.get("/api/tasks/next")
    def tasks_next():
        task = state.next_task()
        return {"task": task, "progress": state.progress()}

    @app.post("/api/verdicts")
    def verdicts(post: VerdictPost):
        return state.post_verdict(post)

    @app.get("/api/pairs/{i}/{j}")
    def pair_detail(i: str, j: str):
        return state.pair_detail(i, j)

    if frontend_dir is None:
        frontend_dir = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    frontend_dir = Path(frontend_dir)
    if frontend_dir.exists():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app


def serve(session: SessionDirectory, host: str, port: int,
          lease_seconds: float = 300.0) -> None:
    import uvicorn

    state = SessionState(session, lease_seconds=lease_seconds)
    app = create_app(state)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        raise PortUnavailableError(f"cannot bind {host}:{port}: {exc}") from exc
