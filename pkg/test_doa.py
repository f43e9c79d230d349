import numpy as np
import pytest

from app.config.exceptions import ValidationError
from app.config.sensing_exceptions import EmptySnapshotsError, SourceCountError
from app.models.signal_models import DoaEstimate, MusicSpectrum
from app.schemas.scenario_schema import Scenario
from app.services.array_service import array_service
from app.services.doa_service import doa_service
from app.services.experiment_service import experiment_service, trial_rng


def _noiseless_snapshots(angles, geometry, rng, count=256):
    b = array_service.manifold(angles, geometry).columns
    x = rng.standard_normal((len(angles), count)) + 1j * rng.standard_normal((len(angles), count))
    return b @ x


def test_single_snapshot_covariance_is_rank_one(rng):
    y = rng.standard_normal((16, 1)) + 1j * rng.standard_normal((16, 1))
    r = doa_service.sample_covariance(y)
    np.testing.assert_allclose(r, r.conj().T)
    assert np.linalg.matrix_rank(r) == 1


def test_empty_snapshots_rejected():
    with pytest.raises(EmptySnapshotsError):
        doa_service.sample_covariance(np.zeros((16, 0), dtype=complex))


def test_subspaces_are_orthonormal_and_ordered(geometry, rng):
    r = doa_service.sample_covariance(_noiseless_snapshots([0.0, 2.0], geometry, rng)) + 0.01 * np.eye(16)
    split = doa_service.split_subspaces(r, 2)
    assert np.all(np.diff(split.eigenvalues) <= 1e-12)
    basis = np.hstack([split.signal_basis, split.noise_basis])
    np.testing.assert_allclose(basis.conj().T @ basis, np.eye(16), atol=1e-10)
    projector = split.noise_basis @ split.noise_basis.conj().T
    np.testing.assert_allclose(projector @ projector, projector, atol=1e-10)


def test_noise_subspace_is_orthogonal_to_source(geometry):
    b = array_service.rx_steering(5.0, geometry).elements
    split = doa_service.split_subspaces(np.outer(b, b.conj()), 1)
    assert np.linalg.norm(split.noise_basis.conj().T @ b) < 1e-8


def test_source_count_bounds(rng):
    r = np.eye(16, dtype=complex)
    with pytest.raises(SourceCountError):
        doa_service.split_subspaces(r, 0)
    with pytest.raises(SourceCountError):
        doa_service.split_subspaces(r, 16)


def test_source_count_from_eigenvalue_gap():
    eigenvalues = np.array([10.0, 9.0] + [0.1] * 14)
    assert doa_service.estimate_source_count(eigenvalues) == 2


def test_spectrum_peaks_at_true_angle(geometry):
    b = array_service.rx_steering(5.0, geometry).elements
    split = doa_service.split_subspaces(np.outer(b, b.conj()), 1)
    spectrum = doa_service.music_spectrum(split, np.array([5.0]), geometry)
    assert spectrum.values[0] >= 1e8


def test_search_window_must_stay_inside_half_plane():
    with pytest.raises(ValidationError):
        doa_service.search_grid(88.0, 6.36, 0.01)


def test_noiseless_sources_resolved(geometry, rng):
    y = _noiseless_snapshots([0.0, 2.0], geometry, rng)
    estimate = doa_service.estimate_doas(y, 2, geometry)
    assert not estimate.under_detected
    np.testing.assert_allclose(estimate.angles_deg, [0.0, 2.0], atol=0.01)


def test_source_outside_window_reported_as_under_detection(geometry, rng):
    y = _noiseless_snapshots([0.0, 30.0], geometry, rng)
    estimate = doa_service.estimate_doas(y, 2, geometry)
    assert estimate.under_detected
    assert len(estimate.angles_deg) == 1
    assert estimate.angles_deg[0] == pytest.approx(0.0, abs=0.01)


def test_under_detection_flag():
    spectrum = MusicSpectrum(grid_deg=np.array([0.0]), values=np.array([1.0]))
    assert DoaEstimate(angles_deg=(1.0,), requested=2, spectrum=spectrum).under_detected
    assert not DoaEstimate(angles_deg=(1.0, 2.0), requested=2, spectrum=spectrum).under_detected


def test_simulated_echoes_resolved_inside_beam(small_scenario):
    frame = experiment_service.simulate_frame(small_scenario, trial_rng(small_scenario.seed, 0, 0))
    y = doa_service.snapshots(frame.rx, small_scenario.numerology, 256)
    estimate = doa_service.estimate_doas(y, 2, small_scenario.geometry)
    assert not estimate.under_detected
    np.testing.assert_allclose(estimate.angles_deg, [0.0, 2.0], atol=0.1)


def _mean_abs_error(scenario, trials):
    halfwidth = experiment_service.beam_halfwidth(scenario)
    truth = np.array([t.angle_deg for t in scenario.targets])
    errors = []
    for trial in range(trials):
        estimate = experiment_service.doa_spectrum(scenario, trial=trial, beam_halfwidth=halfwidth)
        assert not estimate.under_detected, trial
        errors.append(np.abs(np.sort(estimate.angles_deg) - truth))
    return np.mean(errors, axis=0)


def test_noisy_echoes_estimated_within_a_tenth_of_a_degree(small_scenario):
    assert np.all(_mean_abs_error(small_scenario, 20) < 0.1)


@pytest.mark.full_scale
def test_full_band_echoes_estimated_within_a_tenth_of_a_degree():
    # 4096 subcarriers; two symbols are enough for the snapshot window
    scenario = Scenario(numerology={'m': 2})
    assert np.all(_mean_abs_error(scenario, 200) < 0.1)
