import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import binomtest

from app.config.exceptions import BaseAppException
from app.config.setting import settings
from app.config.sensing_exceptions import IllConditionedManifoldError, TrialError, ExperimentSpecError
from app.models.signal_models import (
    SymbolGrid,
    MultiAntennaSignal,
    RangeDopplerMap,
    Detection,
    DoaEstimate,
)
from app.schemas.experiment_schema import ExperimentSpec, ResultRow
from app.schemas.scenario_schema import Scenario
from app.schemas.theory_schema import OptimalNaRequest, RdmSinrInputs, TargetLink
from app.services.array_service import array_service
from app.services.channel_service import channel_service
from app.services.doa_service import doa_service
from app.services.numerology_service import numerology_service
from app.services.receiver_service import receiver_service
from app.services.theory_service import theory_service, to_db
from app.services.waveform_service import waveform_service, MEAN_INV_SYMBOL_POWER
from app.utils.enums import ArraySide, Method, NaPolicy, RdmSinrMethod, SweepKind

logger = logging.getLogger(__name__)


# ===== TRIAL TYPES =====
@dataclass(frozen=True)
class TrialOptions:
    """Per-sweep-point receiver settings shared by every trial"""
    na_values: Tuple[int, ...]
    oracle_angles: bool = False
    estimate_sources: bool = False
    pfa: float = settings.PFA
    cfar_train: int = settings.CFAR_TRAIN
    cfar_guard: int = settings.CFAR_GUARD
    beam_halfwidth: Optional[float] = None


@dataclass(frozen=True)
class TargetOutcome:
    target_index: int
    rdm_sinr_db: Optional[float]
    detected: bool


@dataclass(frozen=True, eq=False)
class Frame:
    grid: SymbolGrid
    rx: MultiAntennaSignal


@dataclass(frozen=True, eq=False)
class MethodArtifacts:
    """Intermediate products of one method on one frame, kept for export"""
    method: Method
    outcomes: List[TargetOutcome]
    rdms: Dict[int, RangeDopplerMap] = field(default_factory=dict)
    detections: Dict[int, List[Detection]] = field(default_factory=dict)
    doa: Optional[DoaEstimate] = None


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    """Independent substream per (sweep point, trial) regardless of worker layout"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, trial)))


class ExperimentService:
    """Monte-Carlo orchestration of the fft2d, sep and snc receive chains"""

    # ===== FRAME =====
    def simulate_frame(self, scenario: Scenario, rng: np.random.Generator) -> Frame:
        num = scenario.numerology
        grid = waveform_service.random_grid(num, rng)
        tx = waveform_service.ofdm_modulate(grid, num)
        rx = channel_service.synthesize_rx(tx, scenario, rng)
        return Frame(grid=grid, rx=rx)

    def expected_bins(self, scenario: Scenario) -> List[Tuple[int, int]]:
        num = scenario.numerology
        return [
            (numerology_service.range_bin(t.range_m, num), numerology_service.doppler_bin(t.velocity_mps, num))
            for t in scenario.targets
        ]

    def doppler_offsets(self, scenario: Scenario) -> List[float]:
        return [numerology_service.doppler_bin_offset(t.velocity_mps, scenario.numerology) for t in scenario.targets]

    def beam_halfwidth(self, scenario: Scenario) -> float:
        return array_service.half_power_beamwidth(scenario.geometry)

    # ===== NA POLICY =====
    def resolve_na(self, scenario: Scenario, policy: NaPolicy, design_range_m: float = 500.0) -> Tuple[int, ...]:
        num = scenario.numerology
        offsets = [numerology_service.offsets_for_range(t.range_m, num) for t in scenario.targets]
        if policy == NaPolicy.PER_TARGET_NS:
            return tuple(o.ns for o in offsets)
        if policy == NaPolicy.PER_TARGET_NE:
            return tuple(o.ne for o in offsets)
        if policy == NaPolicy.FIXED:
            design = numerology_service.offsets_for_range(design_range_m, num)
            return tuple(design.ns for _ in offsets)

        separator = array_service.build_separator([t.angle_deg for t in scenario.targets], scenario.geometry)
        chosen = []
        for index, (target, o) in enumerate(zip(scenario.targets, offsets)):
            gamma0 = theory_service.gamma0(
                channel_service.effective_gain2(target, scenario),
                float(separator.lambdas[index]),
                scenario.sigma2,
            )
            fd_t = numerology_service.doppler_shift(target.velocity_mps, num.fc) * num.t
            result = theory_service.optimal_na(
                OptimalNaRequest(ne=o.ne, ns=o.ns, nc=num.nc, gamma0=gamma0, fd_t=fd_t)
            )
            chosen.append(result.argmax)
        return tuple(chosen)

    # ===== PIPELINES =====
    def _detect(self, rdm: RangeDopplerMap, options: TrialOptions) -> List[Detection]:
        return receiver_service.cfar_detect(rdm, options.pfa, options.cfar_train, options.cfar_guard)

    def _fft2d(self, scenario: Scenario, frame: Frame, options: TrialOptions) -> MethodArtifacts:
        num = scenario.numerology
        w_rx = array_service.ls_beamformer(scenario.targets[0].angle_deg, scenario.geometry, ArraySide.RECEIVE)
        combined = channel_service.beamform_combine(frame.rx, w_rx)
        received = receiver_service.demod_grid(combined, 0, num)
        rdm = receiver_service.build_rdm(received, frame.grid, num)
        detections = self._detect(rdm, options)

        bins = self.expected_bins(scenario)
        offsets = self.doppler_offsets(scenario)
        outcomes = [
            TargetOutcome(
                target_index=u,
                rdm_sinr_db=receiver_service.measure_rdm_sinr(rdm, k, l, bins, doppler_offset=offsets[u]),
                detected=receiver_service.matches_target(detections, k, l, rdm.shape),
            )
            for u, (k, l) in enumerate(bins)
        ]
        return MethodArtifacts(Method.FFT2D, outcomes, {0: rdm}, {0: detections})

    def _angles(self, scenario: Scenario, frame: Frame, options: TrialOptions):
        """Angle estimates and, per target, the index of the estimate that serves it"""
        truth = [t.angle_deg for t in scenario.targets]
        if options.oracle_angles:
            return truth, list(range(len(truth))), None

        snapshots = doa_service.snapshots(frame.rx, scenario.numerology, scenario.music_snapshots)
        sources = len(truth)
        if options.estimate_sources:
            eigenvalues = np.linalg.eigvalsh(doa_service.sample_covariance(snapshots))
            sources = doa_service.estimate_source_count(eigenvalues, scenario.geometry.nr - 1)
        estimate = doa_service.estimate_doas(
            snapshots,
            sources,
            scenario.geometry,
            beam_center=truth[0],
            beam_halfwidth=options.beam_halfwidth or self.beam_halfwidth(scenario),
        )
        angles = list(estimate.angles_deg)
        assignment: List[Optional[int]] = [None] * len(truth)
        if angles:
            cost = np.abs(np.subtract.outer(truth, angles))
            rows, cols = linear_sum_assignment(cost)
            for row, col in zip(rows, cols):
                assignment[row] = int(col)
        return angles, assignment, estimate

    def _separated(self, scenario: Scenario, frame: Frame, options: TrialOptions, method: Method) -> MethodArtifacts:
        num = scenario.numerology
        angles, assignment, estimate = self._angles(scenario, frame, options)
        missed = [TargetOutcome(u, None, False) for u in range(len(scenario.targets))]
        if not angles or (estimate is not None and estimate.under_detected):
            return MethodArtifacts(method, missed, doa=estimate)
        try:
            separator = array_service.build_separator(angles, scenario.geometry)
        except IllConditionedManifoldError as e:
            logger.warning(f"Separation skipped: {e.message}")
            return MethodArtifacts(method, missed, doa=estimate)

        streams = receiver_service.ls_separate(frame.rx, separator)
        bins = self.expected_bins(scenario)
        offsets = self.doppler_offsets(scenario)
        outcomes, rdms, hits = [], {}, {}
        for u, (k, l) in enumerate(bins):
            stream_index = assignment[u]
            if stream_index is None:
                outcomes.append(TargetOutcome(u, None, False))
                continue
            na = options.na_values[u] if method == Method.SNC else 0
            received = receiver_service.demod_grid(streams[stream_index].samples, na, num)
            rdm = receiver_service.build_rdm(received, frame.grid, num)
            detections = self._detect(rdm, options)
            rdms[u], hits[u] = rdm, detections
            outcomes.append(TargetOutcome(
                target_index=u,
                rdm_sinr_db=receiver_service.measure_rdm_sinr(rdm, k, l, bins, doppler_offset=offsets[u]),
                detected=receiver_service.matches_target(detections, k, l, rdm.shape),
            ))
        return MethodArtifacts(method, outcomes, rdms, hits, estimate)

    def process_frame(self, scenario: Scenario, frame: Frame, method: Method, options: TrialOptions) -> MethodArtifacts:
        method = Method(method)
        if method == Method.FFT2D:
            return self._fft2d(scenario, frame, options)
        return self._separated(scenario, frame, options, method)

    def run_trial(self, scenario: Scenario, method: Method, options: TrialOptions,
                  rng: np.random.Generator) -> List[TargetOutcome]:
        frame = self.simulate_frame(scenario, rng)
        return self.process_frame(scenario, frame, method, options).outcomes

    # ===== THEORY =====
    def theory_sinr(self, scenario: Scenario, method: Method, na_values: Sequence[int]) -> List[float]:
        """Closed-form RDM SINR in dB for every target under one method"""
        num = scenario.numerology
        geometry = scenario.geometry
        sigma2 = scenario.sigma2
        offsets = [numerology_service.offsets_for_range(t.range_m, num) for t in scenario.targets]
        gains = [channel_service.effective_gain2(t, scenario) for t in scenario.targets]
        fd_t = [numerology_service.doppler_shift(t.velocity_mps, num.fc) * num.t for t in scenario.targets]

        if method == Method.FFT2D:
            w_rx = array_service.ls_beamformer(scenario.targets[0].angle_deg, geometry, ArraySide.RECEIVE)
            combiner = [abs(w_rx @ array_service.rx_steering(t.angle_deg, geometry).elements) ** 2
                        for t in scenario.targets]
            links = [TargetLink(gain2=g * c, ne_tilde=o.ne / num.nc) for g, c, o in zip(gains, combiner, offsets)]
            noise_gains = [float(np.sum(np.abs(w_rx) ** 2))] * len(gains)
            gains = [link.gain2 for link in links]
        else:
            links = None
            separator = array_service.build_separator([t.angle_deg for t in scenario.targets], geometry)
            noise_gains = [float(x) for x in separator.lambdas]

        values = []
        for u, o in enumerate(offsets):
            if gains[u] <= 0:
                values.append(None)
                continue
            inputs = RdmSinrInputs(
                ne_tilde=o.ne / num.nc,
                na_tilde=(na_values[u] / num.nc) if method == Method.SNC else 0.0,
                ns_tilde=o.ns / num.nc,
                fd_t=fd_t[u],
                m=num.m,
                nc=num.nc,
                lambda_u=noise_gains[u],
                sigma2=sigma2,
                gain2=gains[u],
                mean_inv_symbol_power=MEAN_INV_SYMBOL_POWER,
            )
            rdm_method = {
                Method.FFT2D: RdmSinrMethod.TRAD,
                Method.SEP: RdmSinrMethod.SEP,
                Method.SNC: RdmSinrMethod.CC,
            }[method]
            values.append(to_db(theory_service.sinr_rdm(rdm_method, inputs, links)))
        return values

    # ===== EXPERIMENT =====
    def scenario_at(self, spec: ExperimentSpec, value: Optional[float]) -> Scenario:
        if spec.sweep == SweepKind.POWER_DBM:
            return spec.scenario.with_updates(pt_dbm=value)
        if spec.sweep == SweepKind.RANGE_M:
            return spec.scenario.with_target_range(spec.swept_target, value)
        return spec.scenario

    def options_at(self, spec: ExperimentSpec, scenario: Scenario, value: Optional[float]) -> TrialOptions:
        if spec.sweep == SweepKind.NA:
            na_values = tuple(int(value) for _ in scenario.targets)
        else:
            na_values = self.resolve_na(scenario, spec.na_policy, spec.design_range_m)
        return TrialOptions(
            na_values=na_values,
            oracle_angles=spec.oracle_angles,
            estimate_sources=spec.estimate_sources,
            pfa=spec.pfa,
            cfar_train=spec.cfar_train,
            cfar_guard=spec.cfar_guard,
            beam_halfwidth=None if spec.oracle_angles else self.beam_halfwidth(scenario),
        )

    def aggregate(self, value: Optional[float], method: Method, target_index: int,
                  outcomes: Sequence[TargetOutcome], theory_db: Optional[float]) -> ResultRow:
        trials = len(outcomes)
        hits = sum(1 for o in outcomes if o.detected)
        sinrs = [10 ** (o.rdm_sinr_db / 10) for o in outcomes if o.rdm_sinr_db is not None]
        interval = binomtest(hits, trials).proportion_ci(confidence_level=0.95, method='wilson')
        return ResultRow(
            sweep_value=value,
            method=method,
            target_index=target_index,
            sinr_rdm_db_sim=to_db(float(np.mean(sinrs))) if sinrs else None,
            sinr_rdm_db_theory=theory_db if theory_db is None or math.isfinite(theory_db) else None,
            pd=hits / trials,
            pd_ci95=(float(interval.low), float(interval.high)),
            trials_used=len(sinrs),
            trials=trials,
        )

    def run_experiment(self, spec: ExperimentSpec) -> List[ResultRow]:
        started = time.perf_counter()
        rows: List[ResultRow] = []
        seed = spec.scenario.seed
        logger.info(
            f"Experiment: sweep={spec.sweep.value}, points={len(spec.sweep_points())}, "
            f"methods={[m.value for m in spec.methods]}, trials={spec.trials}"
        )

        for point, value in enumerate(spec.sweep_points()):
            scenario = self.scenario_at(spec, value)
            options = self.options_at(spec, scenario, value)
            jobs = [(scenario, tuple(spec.methods), options, seed, point, trial) for trial in range(spec.trials)]
            results = self._execute(jobs, spec.max_workers)

            for method in spec.methods:
                theory = self.theory_sinr(scenario, method, options.na_values)
                for u in range(len(scenario.targets)):
                    outcomes = [result[method][u] for result in results]
                    rows.append(self.aggregate(value, method, u, outcomes, theory[u]))
            logger.info(f"Sweep point {point} ({spec.sweep.value}={value}) done")

        logger.info(f"Experiment finished in {time.perf_counter() - started:.1f}s, {len(rows)} rows")
        return rows

    def _execute(self, jobs: list, max_workers: int) -> List[Dict[Method, List[TargetOutcome]]]:
        if max_workers <= 1 or len(jobs) <= 1:
            return [_run_job(job) for job in jobs]
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * max_workers))))

    # ===== SINGLE RUNS =====
    def single_run(self, scenario: Scenario, methods: Sequence[Method], options: TrialOptions,
                   trial: int = 0) -> List[MethodArtifacts]:
        frame = self.simulate_frame(scenario, trial_rng(scenario.seed, 0, trial))
        return [self.process_frame(scenario, frame, method, options) for method in methods]

    def doa_spectrum(self, scenario: Scenario, trial: int = 0,
                     beam_halfwidth: Optional[float] = None) -> DoaEstimate:
        frame = self.simulate_frame(scenario, trial_rng(scenario.seed, 0, trial))
        snapshots = doa_service.snapshots(frame.rx, scenario.numerology, scenario.music_snapshots)
        return doa_service.estimate_doas(
            snapshots,
            len(scenario.targets),
            scenario.geometry,
            beam_center=scenario.targets[0].angle_deg,
            beam_halfwidth=beam_halfwidth or self.beam_halfwidth(scenario),
        )

    def default_na_values(self, scenario: Scenario, target_index: int = 0) -> List[float]:
        """0, Ne/2, Ne, (Ne+Ns)/2, Ns, Ns+200 for one target"""
        num = scenario.numerology
        target = scenario.targets[target_index]
        o = numerology_service.offsets_for_range(target.range_m, num)
        if o.ns == 0:
            raise ExperimentSpecError(f"Target {target_index} has no delay to compensate")
        points = [0, o.ne // 2, o.ne, (o.ne + o.ns) // 2, o.ns, min(o.ns + 200, num.nc)]
        return [float(p) for p in sorted(set(points))]


def _run_job(job) -> Dict[Method, List[TargetOutcome]]:
    scenario, methods, options, seed, point, trial = job
    try:
        frame = experiment_service.simulate_frame(scenario, trial_rng(seed, point, trial))
        return {
            method: experiment_service.process_frame(scenario, frame, method, options).outcomes
            for method in methods
        }
    except TrialError:
        raise
    except BaseAppException as e:
        logger.error(f"Trial {trial} at sweep point {point} failed: {e.message}")
        raise TrialError(trial, e.message) from e
    except Exception as e:
        logger.error(f"Trial {trial} at sweep point {point} failed: {e}")
        raise TrialError(trial, str(e)) from e


experiment_service = ExperimentService()
