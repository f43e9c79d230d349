
class BaseAppException(Exception):
    """Base exception for application"""
    def __init__(self, message: str, error_code: str = None):
        self.message = message
        self.error_code = error_code
        super().__init__(message)

class ValidationError(BaseAppException):
    """Raised when an input violates a precondition"""
    pass

class ConfigurationError(BaseAppException):
    """Raised when a scenario or experiment description is unusable"""
    pass

class ComputationError(BaseAppException):
    """Raised when a numerical step cannot produce a trustworthy result"""
    pass
