import logging
from typing import Optional

import numpy as np
from scipy.signal import find_peaks

from app.config.setting import settings
from app.config.exceptions import ValidationError
from app.config.sensing_exceptions import EmptySnapshotsError, SourceCountError, WindowOutOfBoundsError
from app.models.signal_models import SubspaceSplit, MusicSpectrum, DoaEstimate, MultiAntennaSignal
from app.schemas.scenario_schema import ArrayGeometry, OfdmNumerology

logger = logging.getLogger(__name__)


class DoaService:
    """MUSIC direction finding restricted to the transmit beam"""

    def __init__(self, floor: float = None, min_prominence_db: float = 1.0):
        self.floor = floor or settings.MUSIC_FLOOR
        self.min_prominence_db = min_prominence_db

    def snapshots(self, rx: MultiAntennaSignal, num: OfdmNumerology, count: int, symbol: int = 1) -> np.ndarray:
        """First `count` CP-stripped samples of one OFDM symbol on every antenna"""
        if count < 1 or count > num.nc:
            raise ValidationError(f"Snapshot count must lie in [1, {num.nc}], got {count}")
        start = symbol * num.symbol_samples + num.cp_samples
        if start + count > rx.n_samples:
            raise WindowOutOfBoundsError(f"Snapshots of symbol {symbol} exceed the receive frame")
        return rx.data[:, start:start + count]

    def sample_covariance(self, y: np.ndarray) -> np.ndarray:
        """R = Y Y^H / N"""
        y = np.atleast_2d(y)
        if y.shape[1] == 0:
            raise EmptySnapshotsError()
        r = y @ y.conj().T / y.shape[1]
        return (r + r.conj().T) / 2

    def split_subspaces(self, r: np.ndarray, sources: int) -> SubspaceSplit:
        nr = r.shape[0]
        if not 1 <= sources < nr:
            raise SourceCountError(f"Source count must lie in [1, {nr - 1}], got {sources}")
        eigenvalues, eigenvectors = np.linalg.eigh(r)
        order = np.argsort(eigenvalues)[::-1]
        eigenvalues = eigenvalues[order]
        eigenvectors = eigenvectors[:, order]
        return SubspaceSplit(
            signal_basis=eigenvectors[:, :sources],
            noise_basis=eigenvectors[:, sources:],
            eigenvalues=eigenvalues,
        )

    def estimate_source_count(self, eigenvalues: np.ndarray, max_sources: Optional[int] = None) -> int:
        """Largest successive eigenvalue ratio marks the signal/noise boundary"""
        values = np.maximum(np.sort(np.real(eigenvalues))[::-1], self.floor)
        if values.size < 2:
            raise SourceCountError("Need at least two eigenvalues to estimate a source count")
        ratios = values[:-1] / values[1:]
        limit = values.size - 1 if max_sources is None else min(max_sources, values.size - 1)
        return int(np.argmax(ratios[:limit]) + 1)

    def music_spectrum(self, split: SubspaceSplit, grid_deg: np.ndarray, geometry: ArrayGeometry) -> MusicSpectrum:
        grid_deg = np.asarray(grid_deg, dtype=float)
        if grid_deg.size == 0:
            raise ValidationError("MUSIC grid is empty")
        n = np.arange(geometry.nr)
        phase = 2 * np.pi / geometry.wavelength * geometry.dr * np.outer(n, np.sin(np.deg2rad(grid_deg)))
        steering = np.exp(-1j * phase)
        projected = split.noise_basis.conj().T @ steering
        denominator = np.sum(np.abs(projected) ** 2, axis=0)
        return MusicSpectrum(grid_deg=grid_deg, values=1.0 / np.maximum(denominator, self.floor))

    def search_grid(self, beam_center: float, beam_halfwidth: float, grid_step: float) -> np.ndarray:
        lower, upper = beam_center - beam_halfwidth, beam_center + beam_halfwidth
        if lower <= -90 or upper >= 90:
            raise ValidationError(f"Search window [{lower}, {upper}] leaves (-90, 90) degrees")
        points = int(round((upper - lower) / grid_step)) + 1
        return np.linspace(lower, upper, points)

    def estimate_doas(self, y: np.ndarray, sources: int, geometry: ArrayGeometry,
                      beam_center: float = 0.0, beam_halfwidth: float = 6.36,
                      grid_step: float = None) -> DoaEstimate:
        grid_step = grid_step or settings.MUSIC_GRID_STEP_DEG
        split = self.split_subspaces(self.sample_covariance(y), sources)
        grid = self.search_grid(beam_center, beam_halfwidth, grid_step)
        spectrum = self.music_spectrum(split, grid, geometry)

        values_db = spectrum.values_db
        peaks, _ = find_peaks(values_db, prominence=self.min_prominence_db)
        strongest = peaks[np.argsort(values_db[peaks])[::-1][:sources]]

        angles = sorted(self._refine(grid, values_db, index, grid_step) for index in strongest)
        estimate = DoaEstimate(angles_deg=tuple(angles), requested=sources, spectrum=spectrum)
        if estimate.under_detected:
            logger.warning(f"MUSIC found {len(angles)} of {sources} requested peaks")
        return estimate

    @staticmethod
    def _refine(grid: np.ndarray, values_db: np.ndarray, index: int, step: float) -> float:
        """Parabolic interpolation through the peak and its two neighbours"""
        if index == 0 or index == grid.size - 1:
            return float(grid[index])
        left, centre, right = values_db[index - 1:index + 2]
        curvature = left - 2 * centre + right
        if curvature >= 0:
            return float(grid[index])
        offset = 0.5 * (left - right) / curvature
        return float(grid[index] + np.clip(offset, -0.5, 0.5) * step)


doa_service = DoaService()
