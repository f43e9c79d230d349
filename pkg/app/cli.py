"""Command line entry point: `isac-sim <subcommand> [options]`."""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.config.exceptions import BaseAppException
from app.config.logging import setup_logging
from app.config.setting import settings
from app.config.sensing_exceptions import ExperimentSpecError
from app.schemas.experiment_schema import ExperimentSpec
from app.services.experiment_service import experiment_service, trial_rng
from app.services.export_service import export_service
from app.services.receiver_service import receiver_service
from app.utils.enums import Method, NaPolicy, SweepKind
from app.utils.scenario_loader import load_scenario

logger = logging.getLogger(__name__)

DEFAULT_POWERS_DBM = [26.0, 30.0, 34.0, 38.0, 42.0, 46.0]
DEFAULT_RANGES_M = [float(r) for r in np.arange(400, 801, 50)]

SWEEP_LABELS = {
    SweepKind.NA: "Compensation length Na (samples)",
    SweepKind.POWER_DBM: "Transmit power (dBm)",
    SweepKind.RANGE_M: "Target range (m)",
}


def parse_methods(raw: str) -> List[Method]:
    try:
        return [Method(name.strip()) for name in raw.split(',') if name.strip()]
    except ValueError:
        raise ExperimentSpecError(f"Unknown method in '{raw}'; choose from {[m.value for m in Method]}")


def parse_values(raw: Optional[str]) -> Optional[List[float]]:
    if raw is None:
        return None
    try:
        return [float(value) for value in raw.split(',') if value.strip()]
    except ValueError:
        raise ExperimentSpecError(f"Sweep values must be comma-separated numbers, got '{raw}'")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scenario', type=Path, default=None, help='key=value scenario file')
    common.add_argument('--trials', type=int, default=settings.DEFAULT_TRIALS)
    common.add_argument('--methods', default='fft2d,sep,snc')
    common.add_argument('--seed', type=int, default=None, help='overrides the scenario seed')
    common.add_argument('--out', type=Path, default=Path(settings.OUTPUT_DIR))
    common.add_argument('--oracle-angles', action='store_true', help='separate with the true angles')
    common.add_argument('--estimate-sources', action='store_true', help='estimate the source count')
    common.add_argument('--pfa', type=float, default=settings.PFA)
    common.add_argument('--cfar-train', type=int, default=settings.CFAR_TRAIN)
    common.add_argument('--cfar-guard', type=int, default=settings.CFAR_GUARD)
    common.add_argument('--na-policy', choices=[p.value for p in NaPolicy], default=NaPolicy.OPTIMAL.value)
    common.add_argument('--design-range', type=float, default=500.0)
    common.add_argument('--workers', type=int, default=settings.MAX_WORKERS)
    common.add_argument('--log-level', default=settings.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog='isac-sim', description='Monostatic MIMO-OFDM sensing simulator')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('doa-spectrum', parents=[common], help='MUSIC spectrum inside the transmit beam')
    for name, helptext in (
        ('sweep-na', 'RDM SINR and pd versus compensation length'),
        ('sweep-power', 'RDM SINR and pd versus transmit power'),
        ('sweep-range', 'RDM SINR and pd versus range of one target'),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument('--values', default=None, help='comma-separated sweep points')
        p.add_argument('--target', type=int, default=0, help='target the sweep refers to')
    single = sub.add_parser('single-run', parents=[common], help='one frame with RDM and detection dumps')
    single.add_argument('--dump-raw', action='store_true', help='also write the raw receive signal')
    return parser


def _scenario(args):
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_updates(seed=args.seed)
    return scenario


def _spec(args, scenario, sweep: SweepKind, values) -> ExperimentSpec:
    return ExperimentSpec(
        scenario=scenario,
        sweep=sweep,
        values=values or [],
        methods=parse_methods(args.methods),
        trials=args.trials,
        na_policy=NaPolicy(args.na_policy),
        design_range_m=args.design_range,
        oracle_angles=args.oracle_angles,
        estimate_sources=args.estimate_sources,
        pfa=args.pfa,
        cfar_train=args.cfar_train,
        cfar_guard=args.cfar_guard,
        swept_target=getattr(args, 'target', 0),
        max_workers=args.workers,
    )


def run_sweep(args, sweep: SweepKind) -> None:
    scenario = _scenario(args)
    values = parse_values(args.values)
    if values is None:
        if sweep == SweepKind.NA:
            values = experiment_service.default_na_values(scenario, args.target)
        elif sweep == SweepKind.POWER_DBM:
            values = DEFAULT_POWERS_DBM
        else:
            values = DEFAULT_RANGES_M
    spec = _spec(args, scenario, sweep, values)
    rows = experiment_service.run_experiment(spec)

    name = f"sweep_{sweep.value}"
    paths = export_service.write_results(rows, args.out, name)
    paths += export_service.plot_results(rows, args.out, name, SWEEP_LABELS[sweep])
    for path in paths:
        logger.info(f"Artifact: {path}")


def run_doa_spectrum(args) -> None:
    scenario = _scenario(args)
    estimate = experiment_service.doa_spectrum(scenario)
    path = export_service.write_spectrum(estimate.spectrum, args.out)
    truth = [t.angle_deg for t in scenario.targets]
    logger.info(f"MUSIC angles {list(estimate.angles_deg)} (true {truth}), spectrum in {path}")


def run_single(args) -> None:
    scenario = _scenario(args)
    spec = _spec(args, scenario, SweepKind.NONE, None)
    options = experiment_service.options_at(spec, scenario, None)
    artifacts = experiment_service.single_run(scenario, spec.methods, options)

    for result in artifacts:
        for u, rdm in result.rdms.items():
            stem = f"{result.method.value}_target{u}" if result.method != Method.FFT2D else result.method.value
            export_service.write_rdm(rdm, args.out, f"rdm_{stem}")
            export_service.write_detections(result.detections[u], rdm, args.out, f"detections_{stem}")
            for hit in receiver_service.cluster_detections(result.detections[u], rdm.shape):
                range_m, velocity_mps = receiver_service.bin_to_range_velocity(hit, rdm)
                logger.info(f"{stem}: detection at {range_m:.1f} m, {velocity_mps:.1f} m/s")
        for outcome in result.outcomes:
            sinr = "n/a" if outcome.rdm_sinr_db is None else f"{outcome.rdm_sinr_db:.2f} dB"
            logger.info(
                f"{result.method.value}: target {outcome.target_index} "
                f"SINR {sinr}, detected={outcome.detected}"
            )
    if args.dump_raw:
        frame = experiment_service.simulate_frame(scenario, trial_rng(scenario.seed, 0, 0))
        logger.info(f"Raw dump: {export_service.write_raw(frame.rx, args.out)}")


COMMANDS = {
    'doa-spectrum': run_doa_spectrum,
    'sweep-na': lambda args: run_sweep(args, SweepKind.NA),
    'sweep-power': lambda args: run_sweep(args, SweepKind.POWER_DBM),
    'sweep-range': lambda args: run_sweep(args, SweepKind.RANGE_M),
    'single-run': run_single,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, settings.LOG_FILE)
    try:
        COMMANDS[args.command](args)
    except BaseAppException as e:
        logger.error(f"{e.__class__.__name__} [{e.error_code}]: {e.message}")
        return 2
    except PydanticValidationError as e:
        logger.error(f"Invalid input: {e.errors()[0].get('msg')}")
        return 2
    except Exception:
        logger.exception("Unexpected failure")
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
