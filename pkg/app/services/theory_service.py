import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from app.config.exceptions import ValidationError
from app.schemas.scenario_schema import OfdmNumerology
from app.schemas.theory_schema import (
    BlockSinrInputs,
    OptimalNaRequest,
    OptimalNaResult,
    RdmSinrInputs,
    TargetLink,
    RangeReport,
)
from app.services.numerology_service import numerology_service
from app.utils.enums import RdmSinrMethod

logger = logging.getLogger(__name__)


def to_db(value: float) -> float:
    if value <= 0:
        return -math.inf
    return 10 * math.log10(value)


def _ratio(numerator: float, denominator: float) -> float:
    if denominator <= 0:
        return math.inf
    return numerator / denominator


class TheoryService:
    """Closed-form block and range-Doppler SINR evaluators, all in linear power"""

    # ===== BLOCK =====
    def gamma0(self, gain2: float, lambda_u: float, sigma2: float, symbol_power: float = 1.0) -> float:
        return _ratio(gain2 * symbol_power, lambda_u * sigma2)

    def powers_before(self, ne_tilde: float, gain2: float, symbol_power: float = 1.0) -> Tuple[float, float, float]:
        """Useful, ISI and ICI power of an uncompensated block"""
        g = gain2 * symbol_power
        return (1 - ne_tilde) ** 2 * g, ne_tilde * g, ne_tilde * (1 - ne_tilde) * g

    def powers_after(self, ne_tilde: float, na_tilde: float, gain2: float, lambda_u: float,
                     sigma2: float, fd_t: float = 0.0, symbol_power: float = 1.0) -> Tuple[float, float, float, float]:
        """Useful, ISI, ICI and noise power after adding na_tilde*Nc tail samples"""
        g = gain2 * symbol_power
        cos = math.cos(2 * math.pi * fd_t)
        useful = ((1 - ne_tilde) ** 2 + na_tilde ** 2 + 2 * na_tilde * (1 - ne_tilde) * cos) * g
        ici = (na_tilde * (1 - na_tilde) + ne_tilde * (1 - ne_tilde)
               + 2 * (na_tilde * ne_tilde - min(na_tilde, ne_tilde)) * cos) * g
        return useful, ne_tilde * g, ici, self.noise_power_after(na_tilde, lambda_u, sigma2)

    def noise_power_after(self, na_tilde: float, lambda_u: float, sigma2: float) -> float:
        return (1 + na_tilde) * lambda_u * sigma2

    def sinr_block_before(self, ne_tilde: float, gamma0: float) -> float:
        return _ratio((1 - ne_tilde) ** 2, ne_tilde * (2 - ne_tilde) + 1 / gamma0)

    def sinr_block_after(self, inputs: BlockSinrInputs) -> float:
        ne, na, ns = inputs.ne_tilde, inputs.na_tilde, inputs.ns_tilde
        cos = math.cos(2 * math.pi * inputs.fd_t)
        inv_gamma = 1 / inputs.gamma0

        if na <= ns:
            numerator = (1 - ne) ** 2 + na ** 2 + 2 * na * (1 - ne) * cos
            denominator = (na * (1 - na + 2 * ne * cos) + ne * (2 - ne)
                           - 2 * min(na, ne) * cos + (1 + na) * inv_gamma)
        else:
            numerator = (1 - ne) ** 2 + ns ** 2 + 2 * ns * (1 - ne) * cos
            denominator = (ns * (1 - ns) + ne * (2 - ne) + (na - ns)
                           + 2 * (ns * ne - ne) * cos + (1 + na) * inv_gamma)
        return _ratio(numerator, denominator)

    def block_branch(self, inputs: BlockSinrInputs) -> str:
        if inputs.na_tilde == 0:
            return "uncompensated"
        return "na_le_ns" if inputs.na_tilde <= inputs.ns_tilde else "na_gt_ns"

    def optimal_na(self, request: OptimalNaRequest) -> OptimalNaResult:
        """Compare the two candidate lengths Ne and Ns"""
        def sinr_at(na: int) -> float:
            return self.sinr_block_after(BlockSinrInputs(
                ne_tilde=request.ne / request.nc,
                na_tilde=na / request.nc,
                ns_tilde=request.ns / request.nc,
                gamma0=request.gamma0,
                fd_t=request.fd_t,
            ))

        at_ne = sinr_at(request.ne)
        at_ns = at_ne if request.ns == request.ne else sinr_at(request.ns)
        argmax = request.ns if at_ns > at_ne else request.ne
        return OptimalNaResult(
            ne_samples=request.ne,
            ns_samples=request.ns,
            sinr_at_ne=at_ne,
            sinr_at_ns=at_ns,
            argmax=argmax,
            sinr_max_db=to_db(max(at_ne, at_ns)),
        )

    # ===== RANGE-DOPPLER =====
    def ici_coeff_a(self, na_tilde: float, ne_tilde: float, fd_t: float = 0.0) -> float:
        cos = math.cos(2 * math.pi * fd_t)
        return (na_tilde * (1 - na_tilde)
                + (2 * na_tilde * ne_tilde - 2 * min(ne_tilde, na_tilde)) * cos
                + ne_tilde * (1 - ne_tilde))

    def _sinr_rdm_cc(self, p: RdmSinrInputs) -> float:
        cos = math.cos(2 * math.pi * p.fd_t)
        signal = (1 - p.ne_tilde) ** 2 + p.na_tilde ** 2 + 2 * p.na_tilde * (1 - p.ne_tilde) * cos
        a = self.ici_coeff_a(p.na_tilde, p.ne_tilde, p.fd_t)
        variance = (p.mean_inv_symbol_power / (p.m * p.nc)) * (
            (a + p.ne_tilde) * p.gain2 * p.symbol_power + (1 + p.na_tilde) * p.lambda_u * p.sigma2
        )
        return 1 + _ratio(signal * p.gain2, variance)

    def _sinr_rdm_cc_large_na(self, p: RdmSinrInputs) -> float:
        signal = (1 + p.ns_tilde - p.ne_tilde) ** 2
        variance = (p.mean_inv_symbol_power / (p.m * p.nc)) * (
            (p.na_tilde - (p.ns_tilde - p.ne_tilde) ** 2) * p.gain2 * p.symbol_power
            + (1 + p.na_tilde) * p.lambda_u * p.sigma2
        )
        return 1 + _ratio(signal * p.gain2, variance)

    def _sinr_rdm_sep(self, p: RdmSinrInputs) -> float:
        numerator = p.m * p.nc * (1 - p.ne_tilde) ** 2 * p.gain2
        denominator = p.mean_inv_symbol_power * (
            p.ne_tilde * (2 - p.ne_tilde) * p.gain2 * p.symbol_power + p.lambda_u * p.sigma2
        )
        return 1 + _ratio(numerator, denominator)

    def _sinr_rdm_trad(self, p: RdmSinrInputs, links: Sequence[TargetLink]) -> float:
        numerator = p.m * p.nc * (1 - p.ne_tilde) ** 2 * p.gain2
        interference = sum(link.ne_tilde * (2 - link.ne_tilde) * link.gain2 for link in links)
        denominator = p.mean_inv_symbol_power * (interference * p.symbol_power + p.lambda_u * p.sigma2)
        return 1 + _ratio(numerator, denominator)

    def sinr_rdm(self, method: RdmSinrMethod, inputs: RdmSinrInputs,
                 links: Optional[Sequence[TargetLink]] = None) -> float:
        method = RdmSinrMethod(method)
        if method == RdmSinrMethod.CC:
            if inputs.na_tilde > inputs.ns_tilde:
                return self._sinr_rdm_cc_large_na(inputs)
            return self._sinr_rdm_cc(inputs)
        if method == RdmSinrMethod.CC_LARGE_NA:
            return self._sinr_rdm_cc_large_na(inputs)
        if method == RdmSinrMethod.SEP:
            return self._sinr_rdm_sep(inputs)
        if not links:
            raise ValidationError("Traditional RDM SINR needs the gain and overrun of every target")
        return self._sinr_rdm_trad(inputs, links)

    # ===== RANGE LIMITS =====
    def max_range_report(self, num: OfdmNumerology) -> RangeReport:
        report = RangeReport(
            max_unambiguous_range_m=numerology_service.max_unambiguous_range(num),
            max_cp_range_m=numerology_service.max_cp_range(num),
            range_resolution_m=numerology_service.range_resolution(num),
            velocity_resolution_mps=numerology_service.velocity_resolution(num),
        )
        logger.debug(f"Range report: {report}")
        return report

    def scan_block_sinr(self, ne: int, ns: int, nc: int, gamma0: float, fd_t: float = 0.0,
                        na_values: Optional[Sequence[int]] = None) -> np.ndarray:
        """Block SINR over a set of compensation lengths (default 0..Ns)"""
        na_values = range(ns + 1) if na_values is None else na_values
        return np.array([
            self.sinr_block_after(BlockSinrInputs(
                ne_tilde=ne / nc, na_tilde=na / nc, ns_tilde=ns / nc, gamma0=gamma0, fd_t=fd_t
            ))
            for na in na_values
        ])


theory_service = TheoryService()
