"""Exception types raised across the toolkit."""


class ClusterDiffError(Exception):
    """Base class for all toolkit errors."""


class MissingItemError(ClusterDiffError):
    """An item id is present in one clustering but not the other."""


class DuplicateItemError(ClusterDiffError):
    """An item id occurs more than once within one clustering source."""


class NonPositiveWeightError(ClusterDiffError):
    """An item weight is zero, negative, or not finite."""


class WeightMismatchError(ClusterDiffError):
    """The two sources disagree on an item's weight."""


class UnknownItemError(ClusterDiffError):
    """An item id is not part of the loaded population."""


class EmptySetError(ClusterDiffError):
    """A weighted average was requested over an empty item set."""


class NotAPairError(ClusterDiffError):
    """(i, j) is not a pair: j is outside i's base and exp clusters."""


class OracleIncompleteError(ClusterDiffError):
    """The equivalence oracle cannot answer a required (i, j) question."""


class EmptyStratumError(ClusterDiffError):
    """A sampling stratum with a positive draw count contains no pairs."""


class EmptySampleError(ClusterDiffError):
    """Statistics were requested for an empty sample."""


class UnknownPairError(ClusterDiffError):
    """A verdict references a pair that is not in the sample."""


class ConflictingVerdictsError(ClusterDiffError):
    """Different sources gave contradictory verdicts for the same pair."""


class UnestimableClassError(ClusterDiffError):
    """A pair class required by an estimator has no usable draws."""


class StratifiedSampleUnsupportedError(ClusterDiffError):
    """The requested estimate is only defined for single-stratum samples."""


class InstanceTooLargeError(ClusterDiffError):
    """Brute-force evaluation was requested for an instance above the pair cap."""


class InvalidParamsError(ClusterDiffError):
    """Synthetic instance generator parameters are inconsistent."""


class UnknownAttributeKeyError(ClusterDiffError):
    """A slice predicate references an attribute key that was never exported."""


class SessionIncompleteError(ClusterDiffError):
    """The session directory lacks an artifact required by this stage."""


class PortUnavailableError(ClusterDiffError):
    """The requested bind address is already in use."""
