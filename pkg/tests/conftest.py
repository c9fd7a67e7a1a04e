import pytest

from clusterdiff.model import ClusteringPair, Item, affected_partition
from clusterdiff.oracle import TruthTable


def build_pair(base_clusters, exp_clusters, weights=None, attrs=None) -> ClusteringPair:
    """ClusteringPair from explicit member lists, unit weights by default."""
    weights = weights or {}
    attrs = attrs or {}
    base_of, exp_of, ids = {}, {}, set()
    for n, members in enumerate(base_clusters):
        for m in members:
            base_of[m] = f"b{n}"
            ids.add(m)
    for n, members in enumerate(exp_clusters):
        for m in members:
            exp_of[m] = f"e{n}"
    items = {i: Item(i, float(weights.get(i, 1.0)), attrs.get(i, {})) for i in ids}
    return ClusteringPair(items, base_of, exp_of)


@pytest.fixture
def toy3():
    """Three unit items: Base {a,b},{c}; Exp {a,c},{b}; truth a=b."""
    cp = build_pair([["a", "b"], ["c"]], [["a", "c"], ["b"]])
    truth = TruthTable({"a": "t0", "b": "t0", "c": "t1"})
    return cp, truth


@pytest.fixture
def toy3_partition(toy3):
    cp, _ = toy3
    return affected_partition(cp)


@pytest.fixture
def identity5():
    """Base == Exp over five items."""
    clusters = [["a", "b", "c"], ["d", "e"]]
    return build_pair(clusters, clusters)


@pytest.fixture
def split1000():
    """One 1000-member base cluster with one item split off in exp."""
    members = [f"x{n:04d}" for n in range(1000)]
    return build_pair([members], [members[:-1], [members[-1]]])
