"""clusterdiff: impact and quality decomposition of a clustering change.

Given a baseline and an experiment clustering of the same weighted
items, this package computes the exact distance/index decomposition,
samples representative item pairs for human judgement, and turns the
verdicts into unbiased quality estimates with confidence intervals.
"""

from .errors import ClusterDiffError
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    AffectedPartition,
    ClusteringPair,
    Item,
    affected_partition,
    load_clustering_files,
    load_clustering_pair,
    load_joined_file,
    load_joined_records,
)
from .pointwise import (
    ItemImpact,
    ItemQuality,
    VantageGeometry,
    affected_index_split,
    item_impact,
    item_quality,
    lift,
)
from .pairs import (
    ItemPair,
    PairClass,
    PairTotals,
    enumerate_pairs,
    pair_label,
    pair_totals,
    pair_weight,
)
from .sampling import (
    SamplePlan,
    SampledPairSet,
    SingleStratum,
    TwoStrata,
    contribution,
    exhaustive_sample,
    sample,
)
from .judgements import (
    JudgedSample,
    JudgementTask,
    Verdict,
    VerdictValue,
    export_tasks,
    ingest_verdicts,
    synthetic_judge,
)
from .estimator import (
    EstimateReport,
    estimate_all,
    estimate_delta_precision,
    estimate_distance_quality,
    estimate_index_quality,
    weighted_sample_stats,
)
from .oracle import (
    GeneratorParams,
    SyntheticInstance,
    TruthTable,
    exact_metrics,
    generate_instance,
)

__version__ = "0.1.0"
