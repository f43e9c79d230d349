from typing import Optional

from app.config.exceptions import ValidationError, ConfigurationError, ComputationError

class InvalidRangeError(ValidationError):
    """Raised when a target range is not strictly positive"""
    def __init__(self, message: str = "Target range must be positive"):
        super().__init__(message, "NON_POSITIVE_RANGE")

class DelayOutOfModelError(ValidationError):
    """Raised when an echo delay leaves the one-symbol delay model"""
    def __init__(self, message: str = "Round-trip delay must be shorter than one elementary symbol"):
        super().__init__(message, "DELAY_BEYOND_SYMBOL")

class DimensionMismatchError(ValidationError):
    """Raised when array shapes do not agree"""
    def __init__(self, message: str = "Dimension mismatch"):
        super().__init__(message, "DIMENSION_MISMATCH")

class WindowOutOfBoundsError(ValidationError):
    """Raised when a receive window reaches outside the signal"""
    def __init__(self, message: str = "Receive window out of bounds"):
        super().__init__(message, "WINDOW_OUT_OF_BOUNDS")

class RaggedBitsError(ValidationError):
    """Raised when a bit stream does not fill whole symbols"""
    def __init__(self, message: str = "Bit count must be a multiple of 4"):
        super().__init__(message, "RAGGED_BITS")

class IllConditionedManifoldError(ComputationError):
    """Raised when the array manifold is numerically rank deficient"""
    def __init__(self, message: str = "Array manifold is ill-conditioned", condition: Optional[float] = None):
        self.condition = condition
        super().__init__(message, "ILL_CONDITIONED_MANIFOLD")

class EmptySnapshotsError(ValidationError):
    """Raised when a covariance is requested from zero snapshots"""
    def __init__(self, message: str = "Snapshot matrix is empty"):
        super().__init__(message, "EMPTY_SNAPSHOTS")

class SourceCountError(ValidationError):
    """Raised when the source count does not fit the array"""
    def __init__(self, message: str = "Source count out of range"):
        super().__init__(message, "SOURCE_COUNT_OUT_OF_RANGE")

class ZeroSymbolError(ComputationError):
    """Raised when point division meets a zero transmit symbol"""
    def __init__(self, message: str = "Transmit grid contains a zero symbol"):
        super().__init__(message, "ZERO_TX_SYMBOL")

class CfarWindowError(ValidationError):
    """Raised when CFAR training/guard sizes are unusable"""
    def __init__(self, message: str = "Degenerate CFAR window"):
        super().__init__(message, "DEGENERATE_CFAR_WINDOW")

class GuardCoverageError(ComputationError):
    """Raised when the peak guard boxes leave no cell to estimate the floor"""
    def __init__(self, message: str = "Guard boxes cover the whole map"):
        super().__init__(message, "GUARD_COVERS_MAP")

class ScenarioConfigError(ConfigurationError):
    """Raised when a scenario file cannot be turned into a scenario"""
    def __init__(self, message: str = "Invalid scenario configuration"):
        super().__init__(message, "SCENARIO_CONFIG")

class ExperimentSpecError(ConfigurationError):
    """Raised when an experiment description is inconsistent"""
    def __init__(self, message: str = "Invalid experiment specification"):
        super().__init__(message, "EXPERIMENT_SPEC")

class TrialError(ComputationError):
    """Raised when one Monte-Carlo trial fails"""
    def __init__(self, trial_index: int, message: str = "Trial failed"):
        self.trial_index = trial_index
        self.detail = message
        super().__init__(f"Trial {trial_index}: {message}", "TRIAL_FAILED")

    def __reduce__(self):
        return (TrialError, (self.trial_index, self.detail))
