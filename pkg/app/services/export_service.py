import logging
from pathlib import Path
from typing import List, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from app.models.signal_models import MusicSpectrum, RangeDopplerMap, Detection, MultiAntennaSignal
from app.schemas.experiment_schema import ResultRow
from app.services.receiver_service import receiver_service
from app.utils.enums import ResultSource

logger = logging.getLogger(__name__)

RAW_HEADER = np.dtype([('nr', '<u4'), ('n_samples', '<u4'), ('sample_rate', '<f8')])


class ExportService:
    """CSV, binary and SVG artifacts; CSV is the contract, plots are cosmetic"""

    def _target(self, out_dir: Path, name: str) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir / name

    # ===== RESULTS =====
    def results_frame(self, rows: Sequence[ResultRow]) -> pd.DataFrame:
        records = []
        for row in rows:
            record = row.model_dump(mode='json', exclude={'pd_ci95'})
            record['pd_ci95_low'], record['pd_ci95_high'] = row.pd_ci95
            records.append(record)
        return pd.DataFrame.from_records(records, columns=[
            'sweep_value', 'method', 'target_index', 'sinr_rdm_db_sim', 'sinr_rdm_db_theory',
            'pd', 'pd_ci95_low', 'pd_ci95_high', 'trials_used', 'trials',
        ])

    def long_frame(self, rows: Sequence[ResultRow]) -> pd.DataFrame:
        """One SINR value per line with a source column"""
        wide = self.results_frame(rows)
        long = wide.melt(
            id_vars=['sweep_value', 'method', 'target_index'],
            value_vars=['sinr_rdm_db_sim', 'sinr_rdm_db_theory'],
            var_name='source',
            value_name='sinr_rdm_db',
        )
        long['source'] = long['source'].map({
            'sinr_rdm_db_sim': ResultSource.SIM.value,
            'sinr_rdm_db_theory': ResultSource.THEORY.value,
        })
        return long.dropna(subset=['sinr_rdm_db']).reset_index(drop=True)

    def write_results(self, rows: Sequence[ResultRow], out_dir: Path, name: str) -> List[Path]:
        wide_path = self._target(out_dir, f"{name}.csv")
        long_path = self._target(out_dir, f"{name}_sinr_long.csv")
        self.results_frame(rows).to_csv(wide_path, index=False)
        self.long_frame(rows).to_csv(long_path, index=False)
        logger.info(f"Wrote {len(rows)} result rows to {wide_path}")
        return [wide_path, long_path]

    def plot_results(self, rows: Sequence[ResultRow], out_dir: Path, name: str, xlabel: str) -> List[Path]:
        frame = self.results_frame(rows)
        if frame['sweep_value'].isna().all():
            return []
        paths = []

        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (method, target), group in frame.groupby(['method', 'target_index']):
            group = group.sort_values('sweep_value')
            line, = ax.plot(group['sweep_value'], group['sinr_rdm_db_sim'], marker='o',
                            label=f"{method} target {target} sim")
            if group['sinr_rdm_db_theory'].notna().any():
                ax.plot(group['sweep_value'], group['sinr_rdm_db_theory'], linestyle='--',
                        color=line.get_color(), label=f"{method} target {target} theory")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("RDM SINR (dB)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
        paths.append(self._save(fig, out_dir, f"{name}_sinr.svg"))

        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (method, target), group in frame.groupby(['method', 'target_index']):
            group = group.sort_values('sweep_value')
            ax.plot(group['sweep_value'], group['pd'], marker='s', label=f"{method} target {target}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("Detection probability")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
        paths.append(self._save(fig, out_dir, f"{name}_pd.svg"))
        return paths

    def _save(self, fig, out_dir: Path, name: str) -> Path:
        path = self._target(out_dir, name)
        fig.tight_layout()
        fig.savefig(path, format='svg')
        plt.close(fig)
        return path

    # ===== SIGNAL DUMPS =====
    def write_spectrum(self, spectrum: MusicSpectrum, out_dir: Path, name: str = "music_spectrum") -> Path:
        path = self._target(out_dir, f"{name}.csv")
        pd.DataFrame({'angle_deg': spectrum.grid_deg, 'p_music': spectrum.values}).to_csv(path, index=False)

        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(spectrum.grid_deg, spectrum.values_db)
        ax.set_xlabel("Angle (deg)")
        ax.set_ylabel("P_MUSIC (dB)")
        ax.grid(True, alpha=0.3)
        self._save(fig, out_dir, f"{name}.svg")
        return path

    def write_rdm(self, rdm: RangeDopplerMap, out_dir: Path, name: str = "rdm") -> List[Path]:
        csv_path = self._target(out_dir, f"{name}.csv")
        npy_path = self._target(out_dir, f"{name}.npy")
        k, l = np.meshgrid(np.arange(rdm.shape[0]), np.arange(rdm.shape[1]), indexing='ij')
        power_db = 10 * np.log10(np.maximum(rdm.power, np.finfo(float).tiny))
        pd.DataFrame({
            'k': k.ravel(),
            'l': l.ravel(),
            'range_m': rdm.range_axis_m[k].ravel(),
            'velocity_mps': rdm.velocity_axis_mps[l].ravel(),
            'power_db': power_db.ravel(),
        }).to_csv(csv_path, index=False)
        np.save(npy_path, rdm.bins)
        return [csv_path, npy_path]

    def write_detections(self, detections: Sequence[Detection], rdm: RangeDopplerMap,
                         out_dir: Path, name: str = "detections") -> Path:
        path = self._target(out_dir, f"{name}.csv")
        records = []
        for d in detections:
            range_m, velocity_mps = receiver_service.bin_to_range_velocity(d, rdm)
            records.append({
                'k': d.k,
                'l': d.l,
                'range_m': range_m,
                'velocity_mps': velocity_mps,
                'power': d.power,
                'threshold': d.threshold,
            })
        columns = ['k', 'l', 'range_m', 'velocity_mps', 'power', 'threshold']
        pd.DataFrame(records, columns=columns).to_csv(path, index=False)
        return path

    def write_raw(self, rx: MultiAntennaSignal, out_dir: Path, name: str = "rx_raw") -> Path:
        """Header (u4 nr, u4 samples, f8 rate) then per-antenna interleaved complex64, little-endian"""
        path = self._target(out_dir, f"{name}.bin")
        header = np.array([(rx.nr, rx.n_samples, rx.sample_rate)], dtype=RAW_HEADER)
        with open(path, 'wb') as fh:
            fh.write(header.tobytes())
            fh.write(rx.data.astype('<c8').tobytes(order='C'))
        return path

    def read_raw(self, path: Path) -> MultiAntennaSignal:
        with open(path, 'rb') as fh:
            header = np.frombuffer(fh.read(RAW_HEADER.itemsize), dtype=RAW_HEADER)[0]
            data = np.frombuffer(fh.read(), dtype='<c8')
        nr, n_samples = int(header['nr']), int(header['n_samples'])
        return MultiAntennaSignal(data=data.reshape(nr, n_samples).astype(complex),
                                  sample_rate=float(header['sample_rate']))


export_service = ExportService()
