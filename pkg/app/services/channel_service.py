import logging
from typing import Optional, Sequence

import numpy as np

from app.config.sensing_exceptions import DimensionMismatchError
from app.models.signal_models import Attenuation, TimeSignal, MultiAntennaSignal
from app.schemas.scenario_schema import Scenario, Target
from app.services.array_service import array_service
from app.services.numerology_service import numerology_service
from app.utils.enums import ArraySide

logger = logging.getLogger(__name__)


class ChannelService:
    """Monostatic point-target echo synthesis with free-space two-way path loss"""

    def attenuation_of(self, target: Target, scenario: Scenario) -> Attenuation:
        num = scenario.numerology
        tau = numerology_service.round_trip_delay(target.range_m)
        wavelength = num.wavelength

        path_loss = np.sqrt(wavelength ** 2 / ((4 * np.pi) ** 3 * target.range_m ** 4))
        power_scale = np.sqrt(
            scenario.pt_watts * scenario.gt_linear * scenario.gr_linear / scenario.geometry.nt
        )
        # fc*tau is ~1e5 cycles; reduce before exponentiating
        phase = np.exp(-2j * np.pi * np.mod(num.fc * tau, 1.0))
        gain = power_scale * target.rcs_m2 * path_loss * phase
        return Attenuation(
            complex_gain=complex(gain),
            rcs=target.rcs_m2,
            path_loss=float(path_loss),
            phase=complex(phase),
            power_scale=float(power_scale),
        )

    def tx_weights(self, scenario: Scenario) -> np.ndarray:
        """Transmit beam is aimed at the first target (the served UE)"""
        return array_service.ls_beamformer(
            scenario.targets[0].angle_deg, scenario.geometry, ArraySide.TRANSMIT
        )

    def beam_gain(self, target: Target, scenario: Scenario, w_tx: Optional[np.ndarray] = None) -> complex:
        w_tx = self.tx_weights(scenario) if w_tx is None else w_tx
        a = array_service.tx_steering(target.angle_deg, scenario.geometry).elements
        return complex(a @ w_tx)

    def effective_gain2(self, target: Target, scenario: Scenario) -> float:
        """|alpha_u aT(theta_u) w_tx|^2"""
        alpha = self.attenuation_of(target, scenario).complex_gain
        return float(abs(alpha * self.beam_gain(target, scenario)) ** 2)

    def noise_power(self, scenario: Scenario) -> float:
        return scenario.sigma2

    def echo(self, tx: TimeSignal, target: Target, scenario: Scenario,
             w_tx: Optional[np.ndarray] = None) -> np.ndarray:
        """Single-antenna echo of one target before the receive steering"""
        num = scenario.numerology
        shift = numerology_service.offsets_for_range(target.range_m, num).ns
        n_samples = len(tx)

        delayed = np.zeros(n_samples, dtype=complex)
        if shift < n_samples:
            delayed[shift:] = tx.samples[:n_samples - shift]

        fd = numerology_service.doppler_shift(target.velocity_mps, num.fc)
        doppler = np.exp(2j * np.pi * fd * num.ts * np.arange(n_samples))
        scale = self.attenuation_of(target, scenario).complex_gain * self.beam_gain(target, scenario, w_tx)
        return scale * doppler * delayed

    def synthesize_rx(self, tx: TimeSignal, scenario: Scenario,
                      rng: Optional[np.random.Generator] = None,
                      add_noise: bool = True,
                      targets: Optional[Sequence[Target]] = None) -> MultiAntennaSignal:
        targets = scenario.targets if targets is None else targets
        geometry = scenario.geometry
        w_tx = self.tx_weights(scenario)

        rx = np.zeros((geometry.nr, len(tx)), dtype=complex)
        for target in targets:
            b = array_service.rx_steering(target.angle_deg, geometry).elements
            rx += b[:, None] * self.echo(tx, target, scenario, w_tx)[None, :]

        if add_noise:
            rng = rng if rng is not None else np.random.default_rng()
            rx += self.cscg_noise(rx.shape, self.noise_power(scenario), rng)

        logger.debug(f"Synthesized {len(targets)} echoes on {geometry.nr} antennas")
        return MultiAntennaSignal(data=rx, sample_rate=tx.sample_rate)

    def cscg_noise(self, shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
        scale = np.sqrt(sigma2 / 2)
        return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    def beamform_combine(self, rx: MultiAntennaSignal, w_rx: np.ndarray) -> np.ndarray:
        """y(t) = w_rx^T rx(t)"""
        w_rx = np.asarray(w_rx)
        if w_rx.shape != (rx.nr,):
            raise DimensionMismatchError(f"Combiner length {w_rx.shape} does not match {rx.nr} antennas")
        return w_rx @ rx.data


channel_service = ChannelService()
