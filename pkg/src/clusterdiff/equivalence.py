"""Equivalence oracle implementations besides the ground-truth table.

The metric code only sees the EquivalenceOracle protocol; where the
answers come from (a truth table, collected human verdicts, or an
attribute rule for synthetic data) is decided here.
"""

from __future__ import annotations

from typing import Mapping

from .errors import OracleIncompleteError
from .judgements import VerdictValue
from .model import ClusteringPair


class JudgementEquivalence:
    """Partial oracle backed by collected verdicts; reflexive by default."""

    def __init__(self, verdicts: Mapping[tuple[str, str], VerdictValue]):
        self.verdicts = verdicts

    def equivalent(self, i: str, j: str) -> bool:
        if i == j:
            return True
        value = self.verdicts.get((i, j))
        if value is None:
            value = self.verdicts.get((j, i))
        if value is VerdictValue.EQUIVALENT:
            return True
        if value is VerdictValue.NOT_EQUIVALENT:
            return False
        raise OracleIncompleteError(f"no usable verdict for pair ({i!r}, {j!r})")


class AttributeEquivalence:
    """Synthetic rule: items are equivalent iff they share an attribute value."""

    def __init__(self, cp: ClusteringPair, key: str):
        self.cp = cp
        self.key = key

    def equivalent(self, i: str, j: str) -> bool:
        try:
            a = self.cp.items[i].attributes[self.key]
            b = self.cp.items[j].attributes[self.key]
        except KeyError as exc:
            raise OracleIncompleteError(
                f"attribute {self.key!r} missing for {exc.args[0]!r}") from exc
        return a == b
