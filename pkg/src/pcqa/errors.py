"""Exception hierarchy shared by all pcqa modules."""


class PcqaError(Exception):
    """Base class for all pcqa errors."""


class InvalidInputError(PcqaError):
    """Non-finite coordinates or otherwise malformed in-memory input."""


class ConfigError(PcqaError):
    """Invalid metric configuration (epsilon, region size, worker count...)."""


class EmptyCloudError(PcqaError):
    """An operation that requires points received a cloud with none."""


class DegenerateInputError(PcqaError):
    """Input too small for the requested operation (e.g. < 2 points)."""


class UndefinedMetricError(PcqaError):
    """No eligible region / cell set, so the metric has no value."""


class BijectivityError(PcqaError):
    """EMD requires equal-size clouds; sizes differ."""


class InstanceTooLargeError(PcqaError):
    """Instance exceeds the hard cap of an exact (non-approximating) solver."""


class EmptyResultError(PcqaError):
    """A filter (crop, ROI) removed every point."""


class ParseError(PcqaError):
    """Malformed point cloud file; message carries file and line/offset."""


class RegionTaskError(PcqaError):
    """One or more per-region tasks failed; message names the region keys."""
