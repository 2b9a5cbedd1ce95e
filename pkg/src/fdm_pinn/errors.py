"""Exception types raised across the toolkit."""


class FdmPinnError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(FdmPinnError, ValueError):
    pass


class StencilOutOfBounds(FdmPinnError, IndexError):
    """A stencil would read a node outside the grid."""

    def __init__(self, i, j, detail):
        super().__init__(f"stencil out of bounds at node ({i}, {j}): {detail}")
        self.node = (i, j)


class NumericError(FdmPinnError, ArithmeticError):
    pass


class DivergenceError(NumericError):
    pass


class NonConvergenceError(FdmPinnError, RuntimeError):
    def __init__(self, message, last_update):
        super().__init__(message)
        self.last_update = last_update


class RestrictionError(FdmPinnError, ValueError):
    pass


class SamplingError(FdmPinnError, ValueError):
    pass


class ParseError(FdmPinnError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TrainingError(FdmPinnError, RuntimeError):
    """Training stopped early; ``history`` holds the iterations completed so far."""

    def __init__(self, message, iteration, history=None):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration
        self.history = history
