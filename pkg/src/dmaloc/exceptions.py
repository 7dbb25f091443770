"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent configuration, e.g. weight/layout dimension mismatch."""


class DegenerateCandidateError(RuntimeError):
    """Effective steering vector has (near-)zero norm for a candidate."""


class EstimationFailureError(RuntimeError):
    """The grid search could not produce an estimate.

    Carries the partial alternating trace in ``trace`` when raised from the
    iterative estimator.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
