import pandas as pd
import pytest

from app.cli import main, parse_methods
from app.config.sensing_exceptions import ExperimentSpecError
from app.utils.enums import Method

# ranges sit on whole samples of the reduced numerology (Ns = 102 and 53)
SCENARIO = (
    "nc=256\n"
    "m=16\n"
    "seed=3\n"
    "targets=498.046875,0,0,10;258.7890625,0,2,10\n"
)
FAST = ['--trials', '1', '--oracle-angles', '--pfa', '1e-6', '--cfar-train', '4', '--cfar-guard', '2']


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.env"
    path.write_text(SCENARIO)
    return path


def test_parse_methods():
    assert parse_methods("sep, snc") == [Method.SEP, Method.SNC]
    with pytest.raises(ExperimentSpecError):
        parse_methods("sep,bogus")


def test_sweep_na_writes_results(scenario_file, tmp_path):
    out = tmp_path / "out"
    code = main(['sweep-na', '--scenario', str(scenario_file), '--methods', 'sep,snc',
                 '--values', '0,102', '--out', str(out), *FAST])
    assert code == 0
    frame = pd.read_csv(out / "sweep_na.csv")
    assert len(frame) == 2 * 2 * 2
    assert (out / "sweep_na_sinr_long.csv").exists()
    assert (out / "sweep_na_sinr.svg").exists()


def test_single_run_dumps(scenario_file, tmp_path):
    out = tmp_path / "single"
    code = main(['single-run', '--scenario', str(scenario_file), '--out', str(out), '--dump-raw', *FAST])
    assert code == 0
    assert (out / "rdm_fft2d.npy").exists()
    assert (out / "rdm_snc_target1.csv").exists()
    assert (out / "detections_sep_target0.csv").exists()
    assert (out / "rx_raw.bin").exists()


def test_doa_spectrum_command(scenario_file, tmp_path):
    out = tmp_path / "doa"
    assert main(['doa-spectrum', '--scenario', str(scenario_file), '--out', str(out)]) == 0
    assert (out / "music_spectrum.csv").exists()


def test_bad_scenario_exits_with_status_two(tmp_path):
    path = tmp_path / "broken.env"
    path.write_text("colour=blue\n")
    assert main(['doa-spectrum', '--scenario', str(path), '--out', str(tmp_path)]) == 2


def test_bad_method_exits_with_status_two(scenario_file, tmp_path):
    code = main(['sweep-power', '--scenario', str(scenario_file), '--methods', 'radar',
                 '--out', str(tmp_path), *FAST])
    assert code == 2


def test_single_run_reports_detected_range(scenario_file, tmp_path, capsys):
    out = tmp_path / "single"
    code = main(['single-run', '--scenario', str(scenario_file), '--out', str(out),
                 '--methods', 'sep', '--log-level', 'INFO', *FAST])
    assert code == 0
    logged = capsys.readouterr().out
    assert "sep_target0: detection at 498.0 m, 0.0 m/s" in logged
    detections = pd.read_csv(out / "detections_sep_target0.csv")
    assert detections['range_m'].round(1).eq(498.0).any()
