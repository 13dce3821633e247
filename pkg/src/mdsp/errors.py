"""Exception hierarchy shared by the solvers and the CLI."""


class MdspError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(MdspError, ValueError):
    """An instance is malformed: duplicate ids, empty interval, negative values."""


class InstanceFormatError(MdspError, ValueError):
    """An instance or report file cannot be parsed."""


class UnknownJobError(MdspError, KeyError):
    """A schedule references a job id that the instance does not contain."""


class VariantMismatchError(MdspError, ValueError):
    """A solver was handed an instance outside the variant it supports."""


class ResourceLimitError(MdspError, RuntimeError):
    """An instance exceeds a configured size, node or time cap."""


class EmptyTopError(MdspError, ValueError):
    """The all-empty DP state has no top and no predecessors."""


class GenerationInfeasibleError(MdspError, RuntimeError):
    """Rejection sampling ran out of retries."""
