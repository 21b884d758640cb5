# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
gaussdyn evolve | phase-diagram | esd | robustness | asymptotic | validate

Exit codes: 0 ok, 1 usage or parse errors, 2 nonphysical input, 3 divergent dynamics with an unbounded horizon,
4 validation failure.
"""

import argparse
import json
import logging
import math
import os
import sys
from contextlib import contextmanager
from enum import IntEnum, unique
from typing import (
    IO, Any, Callable, Dict, Iterator, List, Mapping, NoReturn, Optional,
    Sequence, Tuple
)

import numpy as np
from marshmallow import ValidationError

from gaussdyn import __version__
from gaussdyn.columns import Table, write_csv
from gaussdyn.config import load_config
from gaussdyn.dynamics_engine import (
    Divergent, DivergentDynamicsError, PhysicalityDriftError,
    PropagationMethod, Trajectory, asymptotic_state, progress,
    require_asymptotic_state, run_schedule
)
from gaussdyn.fock_oracle.lindblad import FockConfig
from gaussdyn.fock_oracle.suites import Suite, validate
from gaussdyn.gaussian_core import (
    EprPair, NonPhysicalStateError, TwoModeCovariance, assert_physical,
    eof_from_x, eof_symmetric, epr_variance_sum, in_real_symmetric_family,
    is_symmetric, log_negativity, optimal_epr_squeeze
)
from gaussdyn.phase_analysis import (
    Measure, PhaseTag, boundary_nT, boundary_nT_printed, classify,
    esd_large_R_limit, esd_time_closed, esd_time_numeric, robustness_ratio,
    sweep
)
from gaussdyn.reservoir_models import (
    DegenerateDriveError, EngineeredParams, Variant, build_drift
)
from gaussdyn.scenario import Scenario, read_scenario, scenario_hash

LOGGER = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


@unique
class ExitCode(IntEnum):
    ok = 0
    usage = 1
    nonphysical = 2
    divergent = 3
    validation_failed = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """
    argparse exits 2 on bad arguments, which is taken by nonphysical input here
    """
    def error(self, message: str) -> NoReturn:
        raise UsageError(f'{self.prog}: {message}')


def parse_grid(value: str) -> Tuple[float, ...]:
    """
    'lo:hi:n' for n evenly spaced points, or a comma separated list; 'inf' is allowed
    """
    try:
        parts = value.split(':')
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1 or hi < lo or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(value)
            return tuple(float(x) for x in np.linspace(lo, hi, n))
        elif len(parts) == 1:
            values = tuple(float(x) for x in value.split(','))
            if any(math.isnan(x) for x in values):
                raise ValueError(value)
            return values
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 'lo:hi:n' or a comma separated list: {value}")


def parse_range(value: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(x) for x in value.split(':'))
        if hi >= lo and math.isfinite(lo) and math.isfinite(hi):
            return lo, hi
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 'lo:hi' with lo <= hi: {value}")


def parse_shape(value: str) -> Tuple[int, int]:
    try:
        rows, columns = (int(x) for x in value.lower().split('x'))
        if rows >= 1 and columns >= 1:
            return rows, columns
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 'NxM': {value}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


@contextmanager
def _output(path: str, *, suffix: Optional[str] = None) -> Iterator[IO[str]]:
    """
    '-' is stdout.  suffix names a companion file next to path: out.csv -> out<suffix>
    """
    if suffix is not None:
        path = os.path.splitext(path)[0] + suffix
    if path == '-':
        yield sys.stdout
        return
    with open(path, 'w', newline='', encoding='utf-8') as file:
        yield file


def _command_hash(args: argparse.Namespace, *parts: Any) -> str:
    # arguments that cannot change the numbers are left out so the hash identifies the computation
    relevant = dict((k, v) for k, v in sorted(vars(args).items())
                    if k not in ('out', 'log_level', 'threads', 'config', 'seed', 'command', 'scenario'))
    return scenario_hash(relevant, *parts)


def _load_scenario(path: str) -> Tuple[Scenario, str]:
    try:
        with open(path, encoding='utf-8') as file:
            return read_scenario(file)
    except OSError as e:
        raise UsageError(f'cannot read scenario {path}: {e}')
    except AssertionError as e:
        raise ValidationError(f'scenario cannot be realized: {e}')


def _moment_columns(V: TwoModeCovariance) -> Dict[str, float]:
    return dict(zip(('n1', 'n2', 're_m1', 'im_m1', 're_m2', 'im_m2', 're_mc', 'im_mc', 're_ms', 'im_ms'),
                    (float(x) for x in V.to_vector())))


def _optimal_pair(V: Optional[TwoModeCovariance]) -> Optional[EprPair]:
    if V is None or not in_real_symmetric_family(V, tol=1e-9):
        return None
    return optimal_epr_squeeze(V)


def _epr_sum(V: TwoModeCovariance, pair: Optional[EprPair]) -> Optional[float]:
    return epr_variance_sum(V, pair) if pair is not None and in_real_symmetric_family(V, tol=1e-9) else None


def cmd_evolve(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    scenario, raw_hash = _load_scenario(args.scenario)
    schedule = scenario.schedule(paper_verbatim=config['PAPER_VERBATIM'])
    times: Sequence[float] = args.times
    _require(all(t >= 0 for t in times) and all(b > a for a, b in zip(times, times[1:])),
             f'expected strictly ascending non-negative times: {times}')
    _require(times[-1] <= schedule.total_duration, f'expected times within the schedule: {schedule.total_duration}')

    V0 = scenario.initial_state.covariance()
    assert_physical(V0, tol=config['PHYSICALITY_TOL'])
    last = schedule.stages[-1].drift
    finite = [t for t in times if math.isfinite(t)]
    asymptote = asymptotic_state(last, divergence_rel_tol=config['DIVERGENCE_REL_TOL'],
                                 condition_warn=config['CONDITION_WARN'])
    if len(finite) < len(times):
        # t = inf is the asymptote, which a divergent generator does not have
        asymptote = require_asymptotic_state(last, divergence_rel_tol=config['DIVERGENCE_REL_TOL'],
                                             condition_warn=config['CONDITION_WARN'])

    evolved = run_schedule(V0, schedule, finite, rtol=config['PROPAGATE_RTOL'],
                           physicality_tol=config['PHYSICALITY_TOL'], method=PropagationMethod(args.method))
    states = list(evolved.states)
    if len(finite) < len(times):
        assert not isinstance(asymptote, Divergent)
        states.append(asymptote)
    trajectory = Trajectory(times=times, states=states)

    want_epr = 'epr' in scenario.outputs
    initial_pair = _optimal_pair(V0) if want_epr else None
    final_pair = _optimal_pair(None if isinstance(asymptote, Divergent) else asymptote) if want_epr else None
    first = schedule.stages[0].drift

    def rows() -> Iterator[Mapping[str, Any]]:
        for t, V, S, logneg in zip(trajectory.times, trajectory.states, trajectory.simon_S(),
                                   trajectory.log_negativity()):
            instant_pair = _optimal_pair(V) if want_epr else None
            yield dict(t=t, p=1.0 if math.isinf(t) else progress(first, t), **_moment_columns(V), simon_S=S,
                       eof=eof_symmetric(V) if 'eof' in scenario.outputs and is_symmetric(V) else None,
                       logneg=logneg, epr_sum_initial_opt=_epr_sum(V, initial_pair),
                       epr_sum_final_opt=_epr_sum(V, final_pair), epr_sum_instant_opt=_epr_sum(V, instant_pair))

    with _output(args.out) as file:
        write_csv(file, Table.Evolve, rows(), scenario_hash=scenario_hash(raw_hash, list(times), args.method))
    return ExitCode.ok


def cmd_phase_diagram(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    (R_lo, R_hi), (nT_lo, nT_hi) = args.R_range, args.nT_range
    _require(R_lo > 0 and nT_lo >= 0, f'expected R > 0 and nT >= 0: R={args.R_range}, nT={args.nT_range}')
    _require(args.r > 0, f'expected r > 0: {args.r}')
    rows_R, rows_nT = args.grid
    R_values = tuple(float(x) for x in np.linspace(R_lo, R_hi, rows_R))
    nT_values = tuple(float(x) for x in np.linspace(nT_lo, nT_hi, rows_nT))
    variant = Variant(args.variant)
    measure = Measure.logneg if variant is Variant.asymmetric else Measure.EoF

    points = sweep(r=args.r, R_values=R_values, nT_values=nT_values, measure=measure, variant=variant, phi=args.phi,
                   lam=config['DEFAULT_LAMBDA'], boundary_tol=config['BOUNDARY_TOL'],
                   paper_verbatim=config['PAPER_VERBATIM'], threads=config['THREADS'],
                   chunk_size=config['SWEEP_CHUNK_SIZE'])
    digest = _command_hash(args, config['PAPER_VERBATIM'])
    with _output(args.out) as file:
        write_csv(file, Table.PhaseDiagram, (
            dict(R=row.R, nT=row.nT, phase=row.phase.value, simon_S=row.simon_S, eof_or_logneg=row.value,
                 divergent=row.divergent)
            for row in points), scenario_hash=digest)

    if variant is Variant.asymmetric:
        LOGGER.info('no analytic boundary for the asymmetric reservoir')
    elif args.out == '-':
        LOGGER.info('writing to stdout, so the boundary curve is not written')
    else:
        curve = boundary_nT_printed if config['PAPER_VERBATIM'] else boundary_nT
        with _output(args.out, suffix='.boundary.csv') as file:
            write_csv(file, Table.Boundary, (dict(R=R, nT=curve(args.r, R)) for R in R_values), scenario_hash=digest)
    return ExitCode.ok


def cmd_esd(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    _require(args.r > 0, f'expected r > 0: {args.r}')
    _require(all(R > 0 and math.isfinite(R) for R in args.R_range), f'expected finite R > 0: {args.R_range}')
    _require(all(nT >= 0 and math.isfinite(nT) for nT in args.nT_list), f'expected finite nT >= 0: {args.nT_list}')
    V0 = TwoModeCovariance.tmsv(args.r, args.phi)
    lam = config['DEFAULT_LAMBDA']

    def rows() -> Iterator[Mapping[str, Any]]:
        for nT in args.nT_list:
            for R in args.R_range:
                closed = esd_time_closed(args.r, args.phi, R, nT, boundary_tol=config['BOUNDARY_TOL'])
                gen = build_drift(EngineeredParams.symmetric(r=args.r, phi=args.phi, kappa=lam / R, lam=lam,
                                                             n_thermal=nT), variant=Variant.symmetric)
                numeric = esd_time_numeric(V0, gen, scan_points=config['ESD_SCAN_POINTS'], p_tol=config['ESD_P_TOL'],
                                           boundary_tol=config['BOUNDARY_TOL'],
                                           physicality_tol=config['PHYSICALITY_TOL'])
                # the closed form is already lambda t; the numeric scan runs in absolute time
                yield dict(R=R, nT=nT, p_esd=closed.p_esd, lambda_t_esd=closed.t_esd,
                           p_esd_numeric=numeric.p_esd, lambda_t_esd_numeric=numeric.t_esd * lam,
                           lambda_t_large_R=esd_large_R_limit(args.r, nT))

    with _output(args.out) as file:
        write_csv(file, Table.Esd, rows(), scenario_hash=_command_hash(args))
    return ExitCode.ok


def cmd_robustness(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    _require(all(r > 0 for r in args.r_list), f'expected r > 0: {args.r_list}')
    _require(all(R >= 0 and math.isfinite(R) for R in args.R_range), f'expected finite R >= 0: {args.R_range}')
    _require(args.time > 0, f'expected a positive time: {args.time}')

    def rows() -> Iterator[Mapping[str, Any]]:
        for r in args.r_list:
            ideal = eof_from_x(math.exp(-2 * r))
            for R in args.R_range:
                ratio = robustness_ratio(r, args.nT, R, args.time)
                yield dict(r=r, R=R, eof=ratio * ideal, eof_normalized=ratio)

    with _output(args.out) as file:
        write_csv(file, Table.Robustness, rows(), scenario_hash=_command_hash(args))
    return ExitCode.ok


def cmd_asymptotic(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    scenario, raw_hash = _load_scenario(args.scenario)
    params = scenario.params
    phase = classify(params, boundary_tol=config['BOUNDARY_TOL'], variant=scenario.variant,
                     paper_verbatim=config['PAPER_VERBATIM'])
    row: Dict[str, Any] = dict(R=params.ratio, nT=params.n_thermal, phase=phase.tag.value,
                               divergent=phase.tag is PhaseTag.Divergent)
    if phase.asymptote is not None:
        V = phase.asymptote
        row.update(_moment_columns(V), simon_S=phase.s_value, logneg=log_negativity(V),
                   eof=eof_symmetric(V) if is_symmetric(V) else None)
    else:
        LOGGER.warning(f'the moments grow without bound: {params}')
    with _output(args.out) as file:
        write_csv(file, Table.Asymptotic, [row], scenario_hash=scenario_hash(raw_hash, config['PAPER_VERBATIM']))
    return ExitCode.ok


def cmd_validate(args: argparse.Namespace, config: Mapping[str, Any]) -> ExitCode:
    _require(0 <= args.r <= 0.5 and 0 <= args.nT <= 0.5, f'expected r, nT in [0, 0.5]: {args.r}, {args.nT}')
    try:
        cfg = FockConfig.create_from_config(config)
    except AssertionError as e:
        raise UsageError(str(e))
    report = validate(Suite(args.suite), cfg, rtol=config['FOCK_RTOL'], paper_verbatim=config['PAPER_VERBATIM'],
                      r=args.r, n_thermal=args.nT, convergence_cutoff=args.convergence_cutoff)
    with _output(args.out) as file:
        file.write(json.dumps(report, sort_keys=True, indent=2) + '\n')
    return ExitCode.ok if report['passed'] else ExitCode.validation_failed


def _scenario_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--scenario', required=True, help='JSON scenario file')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='gaussdyn', description='two-mode Gaussian cavity dynamics under engineered reservoirs')
    parser.add_argument('--version', action='version', version=f'gaussdyn {__version__}')
    parser.add_argument('--config', help='JSON file of configuration overrides')
    parser.add_argument('--out', default='-', help="output file, '-' for stdout")
    parser.add_argument('--seed', type=int, help='reserved; the dynamics is deterministic')
    parser.add_argument('--paper-verbatim', action='store_true', default=None,
                        help='use the asymmetric equations and boundary curve exactly as originally printed')
    parser.add_argument('--threads', type=int, help='worker threads for sweeps')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command', required=True)

    evolve = commands.add_parser('evolve', help='moments and entanglement along a trajectory')
    _scenario_argument(evolve)
    evolve.add_argument('--times', type=parse_grid, default=parse_grid('0:2:21'))
    evolve.add_argument('--method', choices=[m.value for m in PropagationMethod], default=PropagationMethod.expm.value)
    evolve.set_defaults(handler=cmd_evolve)

    phase_diagram = commands.add_parser('phase-diagram', help='asymptotic phases over (R, nT)')
    phase_diagram.add_argument('--r', type=float, required=True)
    phase_diagram.add_argument('--phi', type=float, default=0.0)
    phase_diagram.add_argument('--R-range', dest='R_range', type=parse_range, default=(0.1, 5.0))
    phase_diagram.add_argument('--nT-range', dest='nT_range', type=parse_range, default=(0.0, 2.0))
    phase_diagram.add_argument('--grid', type=parse_shape, default=(50, 50), help="'NxM': N values of R, M of nT")
    phase_diagram.add_argument('--variant', choices=[Variant.symmetric.value, Variant.asymmetric.value],
                               default=Variant.symmetric.value)
    phase_diagram.set_defaults(handler=cmd_phase_diagram)

    esd = commands.add_parser('esd', help='sudden-death times of the two-mode squeezed vacuum')
    esd.add_argument('--r', type=float, required=True)
    esd.add_argument('--phi', type=float, default=0.0)
    esd.add_argument('--R-range', dest='R_range', type=parse_grid, default=parse_grid('0.1:5:50'))
    esd.add_argument('--nT-list', dest='nT_list', type=parse_grid, default=parse_grid('1'))
    esd.set_defaults(handler=cmd_esd)

    robustness = commands.add_parser('robustness', help='generated entanglement relative to the ideal')
    robustness.add_argument('--r-list', dest='r_list', type=parse_grid, default=parse_grid('1,1.5,2,2.5'))
    robustness.add_argument('--nT', type=float, default=0.05)
    robustness.add_argument('--R-range', dest='R_range', type=parse_grid, default=parse_grid('0:0.5:51'))
    robustness.add_argument('--time', type=float, default=math.inf, help='kappa t, inf for the asymptote')
    robustness.set_defaults(handler=cmd_robustness)

    asymptotic = commands.add_parser('asymptotic', help='the asymptotic state of a scenario')
    _scenario_argument(asymptotic)
    asymptotic.set_defaults(handler=cmd_asymptotic)

    validate_command = commands.add_parser('validate', help='check the moment equations against the Fock oracle')
    validate_command.add_argument('--suite', choices=[s.value for s in Suite], default=Suite.symmetric.value)
    validate_command.add_argument('--cutoff', type=int)
    validate_command.add_argument('--convergence-cutoff', dest='convergence_cutoff', type=int)
    validate_command.add_argument('--r', type=float, default=0.3)
    validate_command.add_argument('--nT', type=float, default=0.2)
    validate_command.set_defaults(handler=cmd_validate)
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=level, stream=sys.stderr, format=LOG_FORMAT)


_EXIT_CODES: List[Tuple[Tuple[type, ...], ExitCode]] = [
    ((UsageError, ValidationError, DegenerateDriveError), ExitCode.usage),
    ((NonPhysicalStateError, PhysicalityDriftError), ExitCode.nonphysical),
    ((DivergentDynamicsError,), ExitCode.divergent),
]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return ExitCode.usage

    overrides = dict(LOG_LEVEL=args.log_level, THREADS=args.threads, PAPER_VERBATIM=args.paper_verbatim,
                     FOCK_CUTOFF=getattr(args, 'cutoff', None))
    try:
        config = load_config(config_file=args.config, overrides=overrides)
    except (OSError, ValueError) as e:
        print(f'gaussdyn: cannot load configuration: {e}', file=sys.stderr)
        return ExitCode.usage
    _configure_logging(config['LOG_LEVEL'])
    if args.seed is not None:
        LOGGER.debug(f'ignoring --seed {args.seed}, nothing here is random')

    handler: Callable[[argparse.Namespace, Mapping[str, Any]], ExitCode] = args.handler
    try:
        return handler(args, config)
    except Exception as e:
        for types, code in _EXIT_CODES:
            if isinstance(e, types):
                LOGGER.error(f'{type(e).__name__}: {e}')
                return code
        raise


if __name__ == '__main__':
    sys.exit(main())
