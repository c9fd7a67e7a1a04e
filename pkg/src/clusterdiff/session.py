"""Canonical session directory: one evaluation run's artifacts on disk.

Every pipeline stage writes only its own files and is re-runnable;
identical inputs and seeds reproduce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import SessionIncompleteError
from .model import ClusteringPair, load_joined_file
from .pairs import PairTotals
from .sampling import SampledPairSet, read_sample


@dataclass(frozen=True)
class SessionDirectory:
    root: Path

    @property
    def clustering_file(self) -> Path:
        return self.root / "clustering.jsonl"

    @property
    def config_file(self) -> Path:
        return self.root / "config.json"

    @property
    def impact_report_file(self) -> Path:
        return self.root / "impact_report.jsonl"

    @property
    def pairs_file(self) -> Path:
        return self.root / "pairs.jsonl"

    @property
    def sample_file(self) -> Path:
        return self.root / "sample.jsonl"

    @property
    def tasks_file(self) -> Path:
        return self.root / "tasks.jsonl"

    @property
    def verdicts_file(self) -> Path:
        return self.root / "verdicts.jsonl"

    @property
    def estimates_file(self) -> Path:
        return self.root / "estimates.jsonl"

    @property
    def truth_file(self) -> Path:
        return self.root / "truth.jsonl"

    def ensure_root(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def read_config(self) -> dict:
        if not self.config_file.exists():
            return {}
        return json.loads(self.config_file.read_text(encoding="utf-8"))

    def update_config(self, **entries) -> dict:
        config = self.read_config()
        config.update(entries)
        self.config_file.write_text(
            json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return config

    def require(self, path: Path, hint: str) -> Path:
        if not path.exists():
            raise SessionIncompleteError(f"missing {path.name}; run `{hint}` first")
        return path

    def load_clustering(self) -> ClusteringPair:
        self.require(self.clustering_file, "clusterdiff impact")
        return load_joined_file(self.clustering_file)

    def load_totals(self) -> PairTotals:
        config = self.read_config()
        if "pair_totals" not in config:
            raise SessionIncompleteError("missing pair totals; run `clusterdiff impact` first")
        t = config["pair_totals"]
        return PairTotals(t["split_total"], t["merge_total"], t["stable_total"])

    def load_sample(self) -> SampledPairSet:
        self.require(self.sample_file, "clusterdiff sample")
        config = self.read_config()
        if "sample" not in config:
            raise SessionIncompleteError("missing sample metadata; run `clusterdiff sample` first")
        return read_sample(self.sample_file, config["sample"])
