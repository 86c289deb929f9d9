
class GlanceError(Exception):
    """Base exception for all glancing-analysis errors"""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(GlanceError):
    """Invalid user input: scenes, flags or violated preconditions"""

    exit_code = 2


class SceneError(InputError):
    """Scene document failed to parse or validate"""


class DomainError(InputError):
    """An operation was called outside its domain"""


class AnalysisError(GlanceError):
    """A computation finished but its results are not trustworthy"""


class InconsistencyError(AnalysisError):
    """Two independent computations disagree (e.g. zero set vs glancing lines)"""


class ConvergenceError(AnalysisError):
    """An iterative or adaptive method did not converge"""


class StagnationError(ConvergenceError):
    """Inverse iteration stalled; a restart may help"""


class InstabilityError(AnalysisError):
    """Wave solver field growth exceeded the configured limit"""
