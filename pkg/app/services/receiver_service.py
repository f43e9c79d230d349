import logging
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage

from app.config.setting import settings
from app.config.exceptions import ValidationError
from app.config.sensing_exceptions import (
    DimensionMismatchError,
    ZeroSymbolError,
    CfarWindowError,
    GuardCoverageError,
    WindowOutOfBoundsError,
)
from app.models.signal_models import (
    MultiAntennaSignal,
    SeparationOperator,
    SeparatedStream,
    CompensatedBlock,
    ReceivedGrid,
    SymbolGrid,
    RangeDopplerMap,
    Detection,
)
from app.schemas.scenario_schema import OfdmNumerology
from app.services.numerology_service import numerology_service
from app.utils.validators import validate_probability

logger = logging.getLogger(__name__)

GridLike = Union[np.ndarray, SymbolGrid, ReceivedGrid]


def _as_array(grid: GridLike) -> np.ndarray:
    return grid if isinstance(grid, np.ndarray) else grid.data


class ReceiverService:
    """Separation, coherent compensation, RDM formation and CFAR detection"""

    # ===== SEPARATION =====
    def ls_separate(self, rx: MultiAntennaSignal, sep: SeparationOperator) -> List[SeparatedStream]:
        if sep.pinv.shape[1] != rx.nr:
            raise DimensionMismatchError(
                f"Separator expects {sep.pinv.shape[1]} antennas, signal has {rx.nr}"
            )
        streams = sep.pinv @ rx.data
        return [
            SeparatedStream(
                samples=streams[u],
                target_index=u,
                lambda_u=float(sep.lambdas[u]),
                angle_deg=sep.angles_deg[u],
            )
            for u in range(streams.shape[0])
        ]

    # ===== COMPENSATION =====
    def _check_na(self, na: int, num: OfdmNumerology) -> int:
        if not 0 <= na <= num.nc:
            raise ValidationError(f"Compensation length must lie in [0, {num.nc}], got {na}")
        return int(na)

    def coherent_compensate(self, samples: np.ndarray, n: int, na: int, num: OfdmNumerology) -> CompensatedBlock:
        """CP-stripped window of symbol n with the na samples after it added onto its head"""
        na = self._check_na(na, num)
        start = n * num.symbol_samples + num.cp_samples
        stop = start + num.nc
        if n < 0 or stop > samples.shape[-1]:
            raise WindowOutOfBoundsError(
                f"Window [{start}, {stop}) of symbol {n} exceeds {samples.shape[-1]} samples"
            )
        window = np.array(samples[start:stop], dtype=complex)
        available = min(na, samples.shape[-1] - stop)
        window[:available] += samples[stop:stop + available]
        if available < na:
            logger.debug(f"Compensation of symbol {n} clipped to {available} of {na} samples")
        return CompensatedBlock(samples=window, na_requested=na, na_applied=available)

    def demod_grid(self, samples: np.ndarray, na: int, num: OfdmNumerology) -> ReceivedGrid:
        """Compensate and demodulate every symbol of a frame into an Nc x M grid"""
        na = self._check_na(na, num)
        frame_len = num.frame_samples
        if samples.shape[-1] < frame_len:
            raise WindowOutOfBoundsError(
                f"Frame needs {frame_len} samples, stream has {samples.shape[-1]}"
            )
        frame = samples[:frame_len].reshape(num.m, num.symbol_samples)
        windows = np.array(frame[:, num.cp_samples:], dtype=complex)

        partial: Tuple[int, ...] = ()
        if na > 0:
            windows[:-1, :na] += frame[1:, :na]
            extra = samples[frame_len:frame_len + na]
            windows[-1, :extra.size] += extra
            if extra.size < na:
                partial = (num.m - 1,)

        data = np.fft.fft(windows, axis=1).T / np.sqrt(num.nc)
        return ReceivedGrid(data=data, na=na, partial_symbols=partial)

    # ===== RANGE-DOPPLER =====
    def build_rdm(self, rx_grid: GridLike, tx_grid: GridLike, num: OfdmNumerology) -> RangeDopplerMap:
        """Point division by the transmit symbols, IDFT over subcarriers, DFT over symbols"""
        received = _as_array(rx_grid)
        transmitted = _as_array(tx_grid)
        if received.shape != transmitted.shape or received.shape != (num.nc, num.m):
            raise DimensionMismatchError(
                f"Grid shapes {received.shape} / {transmitted.shape} do not match ({num.nc}, {num.m})"
            )
        if np.any(transmitted == 0):
            raise ZeroSymbolError()

        channel = received / transmitted
        bins = np.fft.fft(np.fft.ifft(channel, axis=0), axis=1) / num.m
        return RangeDopplerMap(
            bins=bins,
            range_axis_m=numerology_service.range_axis(num),
            velocity_axis_mps=numerology_service.velocity_axis(num),
        )

    # ===== DETECTION =====
    def cfar_threshold_factor(self, pfa: float, n_train: int) -> float:
        return n_train * (pfa ** (-1.0 / n_train) - 1.0)

    def cfar_detect(self, rdm: RangeDopplerMap, pfa: float = None,
                    train: int = None, guard: int = None) -> List[Detection]:
        """2D cell-averaging CFAR with toroidal wrap at the map edges"""
        pfa = settings.PFA if pfa is None else pfa
        train = settings.CFAR_TRAIN if train is None else train
        guard = settings.CFAR_GUARD if guard is None else guard
        validate_probability("pfa", pfa)

        outer = 2 * (train + guard) + 1
        inner = 2 * guard + 1
        if train < 1 or guard < 0 or outer > min(rdm.shape):
            raise CfarWindowError(
                f"CFAR window of {outer} cells (train={train}, guard={guard}) does not fit map {rdm.shape}"
            )

        power = rdm.power
        n_train = outer ** 2 - inner ** 2
        outer_sum = ndimage.uniform_filter(power, size=outer, mode='wrap') * outer ** 2
        inner_sum = ndimage.uniform_filter(power, size=inner, mode='wrap') * inner ** 2
        noise = np.maximum(outer_sum - inner_sum, 0.0) / n_train
        threshold = self.cfar_threshold_factor(pfa, n_train) * noise

        hits = np.argwhere(power > threshold)
        logger.debug(f"CFAR produced {len(hits)} hits at pfa={pfa:.1e}")
        return [
            Detection(k=int(k), l=int(l), power=float(power[k, l]), threshold=float(threshold[k, l]))
            for k, l in hits
        ]

    def cluster_detections(self, detections: Sequence[Detection], shape: Tuple[int, int]) -> List[Detection]:
        """Collapse 8-connected hits to the strongest cell of each cluster"""
        if not detections:
            return []
        mask = np.zeros(shape, dtype=bool)
        for det in detections:
            mask[det.k, det.l] = True
        labels, count = ndimage.label(mask, structure=np.ones((3, 3)))

        strongest = {}
        for det in detections:
            label = labels[det.k, det.l]
            if label not in strongest or det.power > strongest[label].power:
                strongest[label] = det
        return sorted(strongest.values(), key=lambda d: d.power, reverse=True)

    def matches_target(self, detections: Iterable[Detection], k_u: int, l_u: int,
                       shape: Tuple[int, int], tolerance: int = 1) -> bool:
        """True when any hit lies within `tolerance` bins of (k_u, l_u) on the torus"""
        nc, m = shape
        for det in detections:
            dk = min((det.k - k_u) % nc, (k_u - det.k) % nc)
            dl = min((det.l - l_u) % m, (l_u - det.l) % m)
            if dk <= tolerance and dl <= tolerance:
                return True
        return False

    def bin_to_range_velocity(self, detection: Detection, rdm: RangeDopplerMap) -> Tuple[float, float]:
        return float(rdm.range_axis_m[detection.k]), float(rdm.velocity_axis_mps[detection.l])

    # ===== SINR MEASUREMENT =====
    def measure_rdm_sinr(self, rdm: RangeDopplerMap, k_u: int, l_u: int,
                         known_peaks: Optional[Sequence[Tuple[int, int]]] = None,
                         guard: Optional[Tuple[int, int]] = None, doppler_offset: float = 0.0) -> float:
        """Peak power over the mean power outside the guard boxes of every known peak, in dB

        A nonzero `doppler_offset` (in bins) evaluates the peak at l_u + offset on range row k_u,
        so an echo whose Doppler falls between two bins is measured without scalloping loss.
        """
        guard = guard or (settings.SINR_GUARD_RANGE, settings.SINR_GUARD_DOPPLER)
        nc, m = rdm.shape
        if not (0 <= k_u < nc and 0 <= l_u < m):
            raise ValidationError(f"Peak bin ({k_u}, {l_u}) outside map {rdm.shape}")
        peaks = list(known_peaks) if known_peaks else [(k_u, l_u)]
        if (k_u, l_u) not in peaks:
            peaks.append((k_u, l_u))

        mask = np.ones(rdm.shape, dtype=bool)
        for k, l in peaks:
            rows = np.arange(k - guard[0], k + guard[0] + 1) % nc
            cols = np.arange(l - guard[1], l + guard[1] + 1) % m
            mask[np.ix_(rows, cols)] = False
        if not mask.any():
            raise GuardCoverageError()

        power = rdm.power
        peak = power[k_u, l_u]
        if doppler_offset:
            slow_time = m * np.fft.ifft(rdm.bins[k_u, :])
            phase = np.exp(-2j * np.pi * (l_u + doppler_offset) * np.arange(m) / m)
            peak = np.abs(np.mean(slow_time * phase)) ** 2
        return float(10 * np.log10(peak / np.mean(power[mask])))

    def measure_block_sinr(self, grid: GridLike, reference: np.ndarray) -> float:
        """Linear useful-to-residual power after LS projection onto the ideal useful component"""
        received = _as_array(grid).ravel()
        reference = np.asarray(reference).ravel()
        if received.shape != reference.shape:
            raise DimensionMismatchError(f"Grid {received.shape} and reference {reference.shape} differ")
        scale = np.vdot(reference, received) / np.vdot(reference, reference)
        useful = np.abs(scale) ** 2 * np.vdot(reference, reference).real
        residual = np.sum(np.abs(received - scale * reference) ** 2)
        return float(useful / residual)


receiver_service = ReceiverService()
