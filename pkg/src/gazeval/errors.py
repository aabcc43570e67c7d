"""Exception and warning types shared across the package."""


class GazevalError(Exception):
    """Base class for every error raised by this package."""


# --- gaze parsing ---

class MalformedRow(GazevalError):
    """A gaze CSV row (or the header) does not match the expected format."""


class UnknownLabel(GazevalError):
    pass


class NonMonotoneTime(GazevalError):
    """Sample timestamps must be strictly increasing within a recording."""


# --- volumes and on-disk formats ---

class BadMagic(GazevalError):
    pass


class TruncatedFile(GazevalError):
    """File length does not match what the header declares."""


class NegativeValue(GazevalError):
    """Saliency values must be finite and non-negative."""


class InconsistentFrameSize(GazevalError):
    pass


class AllZero(GazevalError):
    """A frame or volume with no mass where a distribution is required."""


class FrameOutOfRange(GazevalError):
    pass


class ShapeMismatch(GazevalError):
    pass


# --- ground truth, shuffling, baselines ---

class EmptyLocations(GazevalError):
    pass


class NoDonorClips(GazevalError):
    """Shuffling needs at least one other clip with locations to donate."""


class TooFewObservers(GazevalError):
    pass


# --- metrics and aggregation ---

class EmptyScoreSet(GazevalError):
    pass


class ZeroVariance(GazevalError):
    """Correlation is undefined when one side is constant."""


class ZeroTotalWeight(GazevalError):
    pass


class TooFewClips(GazevalError):
    pass


class EmptySample(GazevalError):
    pass


class InconsistentMetricSets(GazevalError):
    """Models being ranked must report the same set of metrics."""


# --- training data sampling ---

class NegativeSamplingExhausted(GazevalError):
    """Rejection sampling could not find enough free voxels."""


class EmptyClip(GazevalError):
    pass


class EmptyConditionSetWarning(UserWarning):
    """A requested condition has no locations; the result is empty, not fatal."""
