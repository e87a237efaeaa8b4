"""Exception hierarchy shared by the solvers, analysis helpers and harness."""


class SpikeSimError(Exception):
    """Base class for every error raised by :mod:`spikesim`."""


class ModelRangeError(SpikeSimError, ValueError):
    """Nonlinearity evaluated outside its representable range."""


class AnalysisError(SpikeSimError):
    """Fixed-point or bound analysis could not be completed."""


class DivergenceError(SpikeSimError, ArithmeticError):
    """A solver produced a non-finite state."""


class InvertibilityError(SpikeSimError, ZeroDivisionError):
    """Phase-plane step requested where dv/dt vanishes."""


class StepSizeError(SpikeSimError):
    """Adaptive step-size rule produced a non-finite step, or stagnated."""


class OracleError(SpikeSimError):
    """Reference solver could not reach its tolerance above the step floor."""


class QuadratureError(SpikeSimError):
    """Adaptive quadrature failed to converge."""


class MeasurementError(SpikeSimError):
    """Empirical error measurement had nothing to compare."""


class DataError(SpikeSimError, ValueError):
    """Spike-train post-processing received unusable data."""


class ConfigError(SpikeSimError, ValueError):
    """Experiment configuration is malformed or inconsistent.

    ``line`` and ``key`` point at the offending entry when known.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class BlowUpError(SpikeSimError, ValueError):
    """Closed-form solution requested at or past its blow-up time."""
