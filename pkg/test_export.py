import numpy as np
import pandas as pd
import pytest

from app.models.signal_models import Detection, MultiAntennaSignal, MusicSpectrum, RangeDopplerMap
from app.schemas.experiment_schema import ResultRow
from app.services.export_service import export_service
from app.utils.enums import Method


def _rows():
    return [
        ResultRow(sweep_value=value, method=method, target_index=0, sinr_rdm_db_sim=20.0 + value,
                  sinr_rdm_db_theory=None if method == Method.FFT2D else 21.0 + value,
                  pd=0.5, pd_ci95=(0.2, 0.8), trials_used=4, trials=4)
        for value in (0.0, 1.0)
        for method in (Method.FFT2D, Method.SNC)
    ]


def test_results_csv_columns(tmp_path):
    wide, long = export_service.write_results(_rows(), tmp_path, "sweep_na")
    frame = pd.read_csv(wide)
    assert list(frame.columns) == [
        'sweep_value', 'method', 'target_index', 'sinr_rdm_db_sim', 'sinr_rdm_db_theory',
        'pd', 'pd_ci95_low', 'pd_ci95_high', 'trials_used', 'trials',
    ]
    assert len(frame) == 4
    assert set(frame['method']) == {'fft2d', 'snc'}


def test_long_format_splits_sources():
    long = export_service.long_frame(_rows())
    assert set(long['source']) == {'sim', 'theory'}
    # fft2d rows carry no theory value
    assert len(long) == 4 + 2
    theory = long[long['source'] == 'theory']
    assert set(theory['method']) == {'snc'}


def test_plots_written(tmp_path):
    paths = export_service.plot_results(_rows(), tmp_path, "sweep_na", "Na")
    assert [p.name for p in paths] == ["sweep_na_sinr.svg", "sweep_na_pd.svg"]
    assert all(p.read_text().lstrip().startswith("<?xml") for p in paths)


def test_no_plot_without_sweep(tmp_path):
    rows = [ResultRow(method=Method.SEP, target_index=0, pd=1.0, pd_ci95=(0.5, 1.0), trials_used=1, trials=1)]
    assert export_service.plot_results(rows, tmp_path, "single", "none") == []


def test_spectrum_and_rdm_dumps(tmp_path):
    spectrum = MusicSpectrum(grid_deg=np.linspace(-1, 1, 5), values=np.array([1.0, 2.0, 10.0, 2.0, 1.0]))
    path = export_service.write_spectrum(spectrum, tmp_path)
    assert pd.read_csv(path)['p_music'].max() == 10.0
    assert (tmp_path / "music_spectrum.svg").exists()

    bins = np.zeros((8, 4), dtype=complex)
    bins[3, 1] = 2.0
    rdm = RangeDopplerMap(bins=bins, range_axis_m=np.arange(8) * 5.0, velocity_axis_mps=np.array([0.0, 1.0, -2.0, -1.0]))
    csv_path, npy_path = export_service.write_rdm(rdm, tmp_path)
    frame = pd.read_csv(csv_path)
    assert len(frame) == 32
    peak = frame.loc[frame['power_db'].idxmax()]
    assert (peak['k'], peak['l'], peak['range_m']) == (3, 1, 15.0)
    np.testing.assert_array_equal(np.load(npy_path), bins)

    det_path = export_service.write_detections([Detection(3, 1, 4.0, 1.0)], rdm, tmp_path)
    row = pd.read_csv(det_path).iloc[0]
    assert (row['range_m'], row['velocity_mps']) == (15.0, 1.0)


def test_raw_dump_keeps_layout(tmp_path, rng):
    data = rng.standard_normal((4, 10)) + 1j * rng.standard_normal((4, 10))
    path = export_service.write_raw(MultiAntennaSignal(data=data, sample_rate=30.72e6), tmp_path)
    assert path.stat().st_size == 16 + 4 * 10 * 8
    loaded = export_service.read_raw(path)
    assert loaded.sample_rate == 30.72e6
    np.testing.assert_allclose(loaded.data, data, rtol=1e-6)
