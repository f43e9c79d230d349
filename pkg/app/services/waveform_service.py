import logging
from typing import Optional

import numpy as np

from app.config.sensing_exceptions import RaggedBitsError, DimensionMismatchError, WindowOutOfBoundsError
from app.models.signal_models import SymbolGrid, TimeSignal
from app.schemas.scenario_schema import OfdmNumerology

logger = logging.getLogger(__name__)

# Gray levels indexed by 2*b0 + b1
_GRAY_LEVELS = np.array([-3.0, -1.0, 3.0, 1.0])
_QAM16_SCALE = 1.0 / np.sqrt(10.0)

CONSTELLATION = np.array(
    [complex(i, q) for i in _GRAY_LEVELS for q in _GRAY_LEVELS]
) * _QAM16_SCALE

MEAN_INV_SYMBOL_POWER = float(np.mean(1.0 / np.abs(CONSTELLATION) ** 2))


class WaveformService:
    def __init__(self):
        self.constellation = CONSTELLATION

    def qam16_map(self, bits) -> np.ndarray:
        """Gray-mapped unit-power 16-QAM: bits (b0 b1) pick I, (b2 b3) pick Q"""
        bits = np.asarray(bits, dtype=np.int64).ravel()
        if bits.size % 4 != 0:
            raise RaggedBitsError(f"Bit count must be a multiple of 4, got {bits.size}")
        if np.any((bits != 0) & (bits != 1)):
            raise RaggedBitsError("Bit stream may only contain 0 and 1")

        quads = bits.reshape(-1, 4)
        i_level = _GRAY_LEVELS[2 * quads[:, 0] + quads[:, 1]]
        q_level = _GRAY_LEVELS[2 * quads[:, 2] + quads[:, 3]]
        return (i_level + 1j * q_level) * _QAM16_SCALE

    def qam16_demap(self, symbols) -> np.ndarray:
        """Hard decision back to bits (nearest constellation point)"""
        symbols = np.asarray(symbols).ravel()
        nearest = np.argmin(np.abs(symbols[:, None] - self.constellation[None, :]), axis=1)
        # constellation index = 4*i_idx + q_idx, level index = 2*b0 + b1
        i_idx, q_idx = np.divmod(nearest, 4)
        bits = np.stack([i_idx // 2, i_idx % 2, q_idx // 2, q_idx % 2], axis=1)
        return bits.ravel().astype(np.int8)

    def random_grid(self, num: OfdmNumerology, rng: Optional[np.random.Generator] = None) -> SymbolGrid:
        """Nc x M grid drawn i.i.d. uniform over the constellation"""
        rng = rng if rng is not None else np.random.default_rng()
        indices = rng.integers(0, self.constellation.size, size=(num.nc, num.m))
        return SymbolGrid(data=self.constellation[indices])

    def ofdm_modulate(self, grid: SymbolGrid, num: OfdmNumerology) -> TimeSignal:
        if grid.data.shape != (num.nc, num.m):
            raise DimensionMismatchError(
                f"Grid shape {grid.data.shape} does not match numerology ({num.nc}, {num.m})"
            )
        cp = num.cp_samples
        blocks = np.fft.ifft(grid.data, axis=0) * np.sqrt(num.nc)
        with_cp = np.concatenate([blocks[-cp:, :], blocks], axis=0)
        samples = with_cp.reshape(-1, order='F')
        logger.debug(f"Modulated {num.m} symbols into {samples.size} samples")
        return TimeSignal(samples=samples, sample_rate=num.sample_rate)

    def ofdm_demod_window(self, samples: np.ndarray, n: int, num: OfdmNumerology) -> np.ndarray:
        """DFT of the CP-stripped window of symbol n"""
        start = n * num.symbol_samples + num.cp_samples
        stop = start + num.nc
        if n < 0 or stop > samples.shape[-1]:
            raise WindowOutOfBoundsError(
                f"Window [{start}, {stop}) of symbol {n} exceeds {samples.shape[-1]} samples"
            )
        return np.fft.fft(samples[..., start:stop], axis=-1) / np.sqrt(num.nc)


waveform_service = WaveformService()
