import math
from typing import Sequence

from app.config.exceptions import ValidationError


def validate_angle(theta_deg: float) -> float:
    """Validate an elevation angle in degrees"""
    if not math.isfinite(theta_deg) or abs(theta_deg) >= 90.0:
        raise ValidationError(f"Angle must lie in (-90, 90) degrees, got {theta_deg}")
    return theta_deg


def validate_probability(name: str, value: float) -> float:
    """Validate a probability in the open interval (0, 1)"""
    if not 0.0 < value < 1.0:
        raise ValidationError(f"{name} must lie in (0, 1), got {value}")
    return value


def validate_distinct(angles: Sequence[float], tolerance: float = 1e-9) -> Sequence[float]:
    """Validate that no two angles coincide"""
    ordered = sorted(angles)
    for left, right in zip(ordered, ordered[1:]):
        if right - left <= tolerance:
            raise ValidationError(f"Angles must be pairwise distinct, got {list(angles)}")
    return angles
