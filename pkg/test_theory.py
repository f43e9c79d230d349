import math

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from app.config.exceptions import ValidationError
from app.schemas.theory_schema import BlockSinrInputs, OptimalNaRequest, RdmSinrInputs, TargetLink
from app.services.theory_service import theory_service, to_db
from app.utils.enums import RdmSinrMethod

NE_FAR = 1348 / 4096
NS_FAR = 1638 / 4096


def _rdm_inputs(**overrides):
    values = dict(
        ne_tilde=0.3, na_tilde=0.0, ns_tilde=0.4, fd_t=0.0, m=256, nc=4096,
        lambda_u=0.1, sigma2=1e-3, gain2=1.0,
    )
    values.update(overrides)
    return RdmSinrInputs(**values)


# ===== BLOCK =====
def test_powers_before_compensation():
    useful, isi, ici = theory_service.powers_before(0.3291, 1.0)
    assert useful == pytest.approx(0.4501, abs=1e-4)
    assert isi == pytest.approx(0.3291)
    assert ici == pytest.approx(0.2208, abs=1e-4)


def test_uncompensated_block_sinr_at_high_snr():
    sinr = theory_service.sinr_block_before(0.3291, 1e12)
    assert sinr == pytest.approx(0.8186, abs=1e-3)
    assert to_db(sinr) == pytest.approx(-0.87, abs=0.01)


def test_compensating_ne_at_high_snr_leaves_inverse_overrun():
    inputs = BlockSinrInputs(ne_tilde=NE_FAR, na_tilde=NE_FAR, ns_tilde=NS_FAR, gamma0=1e12)
    assert theory_service.sinr_block_after(inputs) == pytest.approx(4096 / 1348, rel=1e-6)
    assert 4096 / 1348 == pytest.approx(3.039, abs=1e-3)


def test_zero_compensation_matches_uncompensated_form():
    for ne in np.linspace(0.0, 0.99, 100):
        for gamma0 in (0.1, 10.0, 1e6):
            inputs = BlockSinrInputs(ne_tilde=ne, na_tilde=0.0, ns_tilde=ne, gamma0=gamma0)
            assert theory_service.sinr_block_after(inputs) == pytest.approx(
                theory_service.sinr_block_before(ne, gamma0), rel=1e-12
            )


def test_powers_after_reduce_to_powers_before_without_compensation():
    useful, isi, ici, noise = theory_service.powers_after(0.3291, 0.0, 2.0, 0.1, 1e-3)
    before = theory_service.powers_before(0.3291, 2.0)
    assert (useful, isi, ici) == pytest.approx(before)
    assert noise == pytest.approx(1e-4)


def test_block_sinr_rises_until_overrun_is_covered():
    values = theory_service.scan_block_sinr(ne=1348, ns=1638, nc=4096, gamma0=5.0, na_values=range(1348))
    assert np.all(np.diff(values) >= -1e-12)


def test_compensation_past_delay_adds_only_noise_and_interference():
    inside = BlockSinrInputs(ne_tilde=NE_FAR, na_tilde=NS_FAR, ns_tilde=NS_FAR, gamma0=5.0)
    beyond = BlockSinrInputs(ne_tilde=NE_FAR, na_tilde=NS_FAR + 0.1, ns_tilde=NS_FAR, gamma0=5.0)
    assert theory_service.block_branch(beyond) == "na_gt_ns"
    assert theory_service.sinr_block_after(beyond) < theory_service.sinr_block_after(inside)


def test_block_inputs_reject_overrun_beyond_delay():
    with pytest.raises(PydanticValidationError):
        BlockSinrInputs(ne_tilde=0.5, ns_tilde=0.4, gamma0=1.0)


def test_far_target_at_low_snr_prefers_full_delay():
    result = theory_service.optimal_na(OptimalNaRequest(ne=1348, ns=1638, nc=4096, gamma0=3.0))
    assert result.argmax == 1638
    assert result.sinr_at_ns > result.sinr_at_ne


def test_near_target_at_high_snr_prefers_overrun():
    result = theory_service.optimal_na(OptimalNaRequest(ne=562, ns=852, nc=4096, gamma0=10.0))
    assert result.argmax == 562


@pytest.mark.parametrize("ne, ns, gamma0", [(1348, 1638, 3.0), (562, 852, 10.0), (1348, 1638, 100.0)])
def test_optimal_na_agrees_with_dense_scan(ne, ns, gamma0):
    values = theory_service.scan_block_sinr(ne=ne, ns=ns, nc=4096, gamma0=gamma0)
    result = theory_service.optimal_na(OptimalNaRequest(ne=ne, ns=ns, nc=4096, gamma0=gamma0))
    assert int(np.argmax(values)) == result.argmax
    assert result.sinr_max_db == pytest.approx(to_db(values.max()))


# ===== RANGE-DOPPLER =====
def test_ici_coefficient_limits():
    assert theory_service.ici_coeff_a(0.0, 0.3) == pytest.approx(0.3 * 0.7)
    assert theory_service.ici_coeff_a(0.3, 0.3) == pytest.approx(0.0, abs=1e-15)
    for na in np.linspace(0, 1, 51):
        for ne in np.linspace(0, 1, 51):
            d = abs(na - ne)
            assert theory_service.ici_coeff_a(na, ne) == pytest.approx(d * (1 - d), abs=1e-12)


def test_compensated_rdm_sinr_without_compensation_equals_separated():
    for ne in np.linspace(0.0, 0.9, 46):
        inputs = _rdm_inputs(ne_tilde=ne, ns_tilde=0.95)
        cc = theory_service.sinr_rdm(RdmSinrMethod.CC, inputs)
        sep = theory_service.sinr_rdm(RdmSinrMethod.SEP, inputs)
        assert cc == pytest.approx(sep, rel=1e-12)


def test_rdm_sinr_is_infinite_without_impairments():
    inputs = _rdm_inputs(ne_tilde=0.0, sigma2=0.0)
    assert math.isinf(theory_service.sinr_rdm(RdmSinrMethod.SEP, inputs))


def test_rdm_sinr_never_below_one():
    inputs = _rdm_inputs(gain2=1e-30, sigma2=1.0)
    for method in (RdmSinrMethod.CC, RdmSinrMethod.SEP, RdmSinrMethod.CC_LARGE_NA):
        assert theory_service.sinr_rdm(method, inputs) >= 1.0
    links = [TargetLink(gain2=1e-30, ne_tilde=0.3)]
    assert theory_service.sinr_rdm(RdmSinrMethod.TRAD, inputs, links) >= 1.0


def test_rdm_sinr_saturates_at_high_power():
    quiet = theory_service.sinr_rdm(RdmSinrMethod.SEP, _rdm_inputs(sigma2=1e-30))
    silent = theory_service.sinr_rdm(RdmSinrMethod.SEP, _rdm_inputs(sigma2=0.0))
    assert math.isfinite(silent)
    assert quiet == pytest.approx(silent, rel=1e-9)


def test_compensation_improves_rdm_sinr_of_far_target():
    plain = theory_service.sinr_rdm(RdmSinrMethod.SEP, _rdm_inputs(ne_tilde=NE_FAR, ns_tilde=NS_FAR))
    compensated = theory_service.sinr_rdm(
        RdmSinrMethod.CC, _rdm_inputs(ne_tilde=NE_FAR, na_tilde=NS_FAR, ns_tilde=NS_FAR)
    )
    assert compensated > plain


def test_compensated_dispatch_switches_past_delay():
    inputs = _rdm_inputs(na_tilde=0.6)
    assert theory_service.sinr_rdm(RdmSinrMethod.CC, inputs) == theory_service.sinr_rdm(
        RdmSinrMethod.CC_LARGE_NA, inputs
    )


def test_traditional_sinr_counts_every_target():
    inputs = _rdm_inputs()
    alone = theory_service.sinr_rdm(RdmSinrMethod.TRAD, inputs, [TargetLink(gain2=1.0, ne_tilde=0.3)])
    crowded = theory_service.sinr_rdm(
        RdmSinrMethod.TRAD, inputs, [TargetLink(gain2=1.0, ne_tilde=0.3), TargetLink(gain2=5.0, ne_tilde=0.1)]
    )
    assert crowded < alone
    assert alone == pytest.approx(theory_service.sinr_rdm(RdmSinrMethod.SEP, inputs))


def test_traditional_sinr_needs_links():
    with pytest.raises(ValidationError):
        theory_service.sinr_rdm(RdmSinrMethod.TRAD, _rdm_inputs())


# ===== RANGES =====
def test_range_report(default_numerology):
    report = theory_service.max_range_report(default_numerology)
    assert report.max_unambiguous_range_m == pytest.approx(1250.0)
    assert report.max_cp_range_m == pytest.approx(88.5)
    assert report.range_resolution_m == pytest.approx(3e8 / (2 * 491.52e6))


def test_gamma0_scales_with_gain():
    assert theory_service.gamma0(2.0, 0.1, 1.0) == pytest.approx(2 * theory_service.gamma0(1.0, 0.1, 1.0))
