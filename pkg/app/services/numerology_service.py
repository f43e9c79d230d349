import logging

import numpy as np

from app.config.exceptions import ValidationError
from app.config.sensing_exceptions import InvalidRangeError, DelayOutOfModelError
from app.models.signal_models import SampleOffsets
from app.schemas.scenario_schema import C0, OfdmNumerology

logger = logging.getLogger(__name__)


class NumerologyService:
    """Delay, Doppler and sample-count arithmetic shared by every other service"""

    def __init__(self, c0: float = C0):
        self.c0 = c0

    def round_trip_delay(self, range_m: float, c0: float = None) -> float:
        if range_m <= 0:
            raise InvalidRangeError(f"Target range must be positive, got {range_m}")
        return 2.0 * range_m / (c0 or self.c0)

    def doppler_shift(self, velocity_mps: float, fc: float, c0: float = None) -> float:
        if fc <= 0:
            raise ValidationError(f"Carrier frequency must be positive, got {fc}")
        return 2.0 * velocity_mps * fc / (c0 or self.c0)

    def sample_offsets(self, tau: float, num: OfdmNumerology) -> SampleOffsets:
        """Samples past the CP (Ne) and total delay samples (Ns), rounded half-to-even"""
        if tau < 0:
            raise ValidationError(f"Delay must be non-negative, got {tau}")
        if tau >= num.td:
            raise DelayOutOfModelError(
                f"Delay {tau:.4e} s exceeds the elementary symbol duration {num.td:.4e} s"
            )
        ns = round(tau / num.ts)
        ne = max(0, round((tau - num.tcp) / num.ts))
        return SampleOffsets(ne=ne, ns=ns)

    def offsets_for_range(self, range_m: float, num: OfdmNumerology) -> SampleOffsets:
        return self.sample_offsets(self.round_trip_delay(range_m), num)

    def max_unambiguous_range(self, num: OfdmNumerology) -> float:
        return self.c0 / (2.0 * num.delta_f)

    def max_cp_range(self, num: OfdmNumerology) -> float:
        return self.c0 * num.tcp / 2.0

    def range_resolution(self, num: OfdmNumerology) -> float:
        return self.c0 / (2.0 * num.bandwidth)

    def doppler_resolution(self, num: OfdmNumerology) -> float:
        return 1.0 / (num.m * num.t)

    def velocity_resolution(self, num: OfdmNumerology) -> float:
        return self.doppler_resolution(num) * self.c0 / (2.0 * num.fc)

    def range_bin(self, range_m: float, num: OfdmNumerology) -> int:
        """k_u = round(B * tau)"""
        return round(num.bandwidth * self.round_trip_delay(range_m)) % num.nc

    def doppler_bin(self, velocity_mps: float, num: OfdmNumerology) -> int:
        """l_u = round(M * fd * T), wrapped onto the M Doppler bins"""
        fd = self.doppler_shift(velocity_mps, num.fc)
        return round(num.m * fd * num.t) % num.m

    def doppler_bin_offset(self, velocity_mps: float, num: OfdmNumerology) -> float:
        """M * fd * T minus the nearest integer bin, within [-0.5, 0.5]"""
        exact = num.m * self.doppler_shift(velocity_mps, num.fc) * num.t
        return exact - round(exact)

    def range_axis(self, num: OfdmNumerology) -> np.ndarray:
        return np.arange(num.nc) * self.range_resolution(num)

    def velocity_axis(self, num: OfdmNumerology) -> np.ndarray:
        l = np.arange(num.m)
        signed = np.where(l < (num.m + 1) // 2, l, l - num.m)
        return signed * self.velocity_resolution(num)


numerology_service = NumerologyService()
