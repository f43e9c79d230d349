import logging
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from app.config.setting import settings
from app.config.sensing_exceptions import SourceCountError, IllConditionedManifoldError
from app.models.signal_models import SteeringVector, Manifold, SeparationOperator
from app.schemas.scenario_schema import ArrayGeometry
from app.utils.enums import ArraySide
from app.utils.validators import validate_angle, validate_distinct

logger = logging.getLogger(__name__)


class ArrayService:
    """ULA steering, LS beamforming and manifold separation"""

    def __init__(self, cond_limit: float = None):
        self.cond_limit = cond_limit or settings.MANIFOLD_COND_LIMIT

    def _geometry_of(self, geometry: ArrayGeometry, side: ArraySide):
        if side == ArraySide.TRANSMIT:
            return geometry.nt, geometry.dt
        return geometry.nr, geometry.dr

    def steering(self, theta_deg: float, geometry: ArrayGeometry, side: ArraySide) -> SteeringVector:
        validate_angle(theta_deg)
        count, spacing = self._geometry_of(geometry, side)
        n = np.arange(count)
        phase = 2 * np.pi / geometry.wavelength * n * spacing * np.sin(np.deg2rad(theta_deg))
        return SteeringVector(elements=np.exp(-1j * phase), angle_deg=theta_deg, side=side)

    def tx_steering(self, theta_deg: float, geometry: ArrayGeometry) -> SteeringVector:
        return self.steering(theta_deg, geometry, ArraySide.TRANSMIT)

    def rx_steering(self, theta_deg: float, geometry: ArrayGeometry) -> SteeringVector:
        return self.steering(theta_deg, geometry, ArraySide.RECEIVE)

    def ls_beamformer(self, theta_deg: float, geometry: ArrayGeometry, side: ArraySide) -> np.ndarray:
        """Pseudoinverse of the steering row; aT(theta) w = 1"""
        row = self.steering(theta_deg, geometry, side).elements[None, :]
        return np.linalg.pinv(row)[:, 0]

    def beam_pattern(self, weights: np.ndarray, angles_deg, geometry: ArrayGeometry,
                     side: ArraySide = ArraySide.TRANSMIT) -> np.ndarray:
        """|aT(theta) w| over a set of angles"""
        count, spacing = self._geometry_of(geometry, side)
        angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
        n = np.arange(count)
        phase = 2 * np.pi / geometry.wavelength * np.outer(np.sin(np.deg2rad(angles)), n) * spacing
        return np.abs(np.exp(-1j * phase) @ weights)

    def half_power_beamwidth(self, geometry: ArrayGeometry, side: ArraySide = ArraySide.TRANSMIT,
                             theta_deg: float = 0.0) -> float:
        """Full width between the -3 dB (0.707 amplitude) points of an LS beam"""
        weights = self.ls_beamformer(theta_deg, geometry, side)
        count, spacing = self._geometry_of(geometry, side)
        # first null of a broadside ULA bounds the main lobe
        null = np.rad2deg(np.arcsin(min(1.0, geometry.wavelength / (count * spacing))))

        def excess(offset):
            return self.beam_pattern(weights, theta_deg + offset, geometry, side)[0] - 1 / np.sqrt(2)

        upper = min(null, 89.9 - theta_deg)
        lower = min(null, 89.9 + theta_deg)
        right = brentq(excess, 1e-9, upper * 0.999)
        left = brentq(excess, -lower * 0.999, -1e-9)
        return float(right - left)

    def manifold(self, angles_deg: Sequence[float], geometry: ArrayGeometry) -> Manifold:
        columns = np.stack([self.rx_steering(a, geometry).elements for a in angles_deg], axis=1)
        return Manifold(columns=columns, angles_deg=tuple(float(a) for a in angles_deg))

    def build_separator(self, angles_deg: Sequence[float], geometry: ArrayGeometry) -> SeparationOperator:
        """B^dagger = (B^H B)^-1 B^H with lambda_u the squared row norms"""
        count = len(angles_deg)
        if count < 1 or count > geometry.nr:
            raise SourceCountError(f"Cannot separate {count} sources with {geometry.nr} receive elements")
        validate_distinct(angles_deg)

        manifold = self.manifold(angles_deg, geometry)
        b = manifold.columns
        gram = b.conj().T @ b
        condition = float(np.linalg.cond(gram))
        if not np.isfinite(condition) or condition > self.cond_limit:
            logger.warning(f"Manifold for angles {list(angles_deg)} has condition {condition:.3e}")
            raise IllConditionedManifoldError(
                f"Manifold condition number {condition:.3e} exceeds {self.cond_limit:.1e}",
                condition=condition,
            )
        pinv = np.linalg.solve(gram, b.conj().T)
        lambdas = np.sum(np.abs(pinv) ** 2, axis=1)
        return SeparationOperator(
            pinv=pinv, lambdas=lambdas, angles_deg=manifold.angles_deg, condition=condition
        )


array_service = ArrayService()
