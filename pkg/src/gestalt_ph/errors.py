"""Exception hierarchy. CLI exit codes hang off the base classes."""


class GestaltError(Exception):
    exit_code = 1


class ConfigError(GestaltError, ValueError):
    """Bad user-supplied configuration (scales, flags, parameters)."""

    exit_code = 2


class ParseError(ConfigError):
    """Malformed input file. ``location`` is a line number or JSON path."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class DegenerateExtentError(ConfigError):
    pass


class ParameterError(ConfigError):
    pass


class CapacityError(GestaltError):
    exit_code = 4


class PipelineError(GestaltError):
    exit_code = 3


class EmptyInputError(PipelineError):
    pass


class InconsistentSplitError(PipelineError):
    pass


class NoCommonScaleError(PipelineError):
    """Significant loops never coexist. ``intervals`` holds each loop's [birth, death)."""

    def __init__(self, message, intervals=()):
        self.intervals = list(intervals)
        super().__init__(message)


class NoLoopError(PipelineError):
    pass


class UnsupportedRepresentativeError(PipelineError):
    pass


class DeadEndError(PipelineError):
    def __init__(self, message, path=()):
        self.path = list(path)
        super().__init__(message)


class NonTerminatingWalkError(PipelineError):
    def __init__(self, message, path=()):
        self.path = list(path)
        super().__init__(message)
