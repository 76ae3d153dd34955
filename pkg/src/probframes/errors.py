"""Exception hierarchy shared by all modules."""


class ProbFrameError(Exception):
    """Base class for every error raised by probframes."""


class InvalidMeasureError(ProbFrameError, ValueError):
    """Malformed input: bad shapes, weights, dimensions or file contents."""


class PreconditionError(ProbFrameError, ValueError):
    """A mathematical precondition of an operation does not hold.

    Examples are a rank-deficient frame operator passed to the canonical
    dual, or a non-tight measure passed to the POVM builder.
    """


class ConvergenceError(ProbFrameError, RuntimeError):
    """An iterative scheme stopped without meeting its tolerance.

    The last iterate is attached as ``result`` when available.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
