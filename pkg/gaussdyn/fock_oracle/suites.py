# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import logging
from enum import Enum, unique
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from typing_extensions import Final, TypedDict

from gaussdyn.dynamics_engine import propagate
from gaussdyn.fock_oracle.lindblad import (
    FockConfig, TraceDriftError, TruncationLeakError, evolve_and_extract,
    moments, pure_state, vacuum_state
)
from gaussdyn.reservoir_models import (
    Coordinate, EngineeredParams, Variant, build_drift
)

LOGGER = logging.getLogger(__name__)

SAMPLES_PER_CASE: Final[int] = 8

# both first and second moments of this state are nonzero in every coordinate
PROBE_AMPLITUDES: Final = {(0, 0): 1.0, (1, 0): 0.3, (0, 1): 0.3j, (2, 0): 0.25, (0, 2): -0.2j, (1, 1): 0.35}


@unique
class Suite(Enum):
    symmetric = 'symmetric'
    asymmetric = 'asymmetric'
    laser_frame = 'laser_frame'
    all = 'all'

    def variants(self) -> Tuple[Variant, ...]:
        if self is Suite.all:
            return (Variant.symmetric, Variant.asymmetric, Variant.laser_frame)
        return (Variant(self.value),)


@unique
class SuiteStatus(Enum):
    passed = 'pass'
    failed = 'fail'
    leak = 'leak'


class SuiteReport(TypedDict):
    suite: str
    status: str
    paper_verbatim: bool
    cutoff: int
    tolerance: float
    max_rel_error: Optional[float]
    worst_coordinate: Optional[str]
    leak_time: Optional[float]
    cutoff_change: Optional[float]
    detail: str


class ValidationReport(TypedDict):
    passed: bool
    suites: List[SuiteReport]


class OracleCase(NamedTuple):
    name: str
    variant: Variant
    params: EngineeredParams
    rho0: np.ndarray

    def times(self) -> Tuple[float, ...]:
        horizon = 2 / (max(self.params.kappa1, self.params.kappa2) + self.params.lam)
        return tuple(float(t) for t in np.linspace(0, horizon, SAMPLES_PER_CASE + 1)[1:])


def params_for(variant: Variant, *, r: float = 0.3, n_thermal: float = 0.2) -> EngineeredParams:
    if variant is Variant.asymmetric:
        return EngineeredParams.asymmetric(r=r, kappa=1.0, lam=2.0, n_thermal=n_thermal)
    elif variant is Variant.laser_frame:
        return EngineeredParams.symmetric(r=r, kappa=1.0, lam=1.0, n_thermal=n_thermal, phi=0.4, d=0.7)
    return EngineeredParams.symmetric(r=r, kappa=1.0, lam=1.0, n_thermal=n_thermal)


def cases_for(variant: Variant, cutoff: int, *, r: float = 0.3, n_thermal: float = 0.2) -> Tuple[OracleCase, ...]:
    params = params_for(variant, r=r, n_thermal=n_thermal)
    return (OracleCase(name='vacuum', variant=variant, params=params, rho0=vacuum_state(cutoff)),
            OracleCase(name='probe', variant=variant, params=params, rho0=pure_state(cutoff, PROBE_AMPLITUDES)))


class CaseComparison(NamedTuple):
    max_rel_error: float
    worst_coordinate: Coordinate


def compare_case(case: OracleCase, cfg: FockConfig, *, paper_verbatim: bool = False) -> CaseComparison:
    """
    relative error: the largest coordinate deviation over all sample times, over the largest moment magnitude
    """
    times = case.times()
    oracle = evolve_and_extract(case.rho0, case.params, times, cfg, variant=case.variant)
    drift = build_drift(case.params, variant=case.variant, paper_verbatim=paper_verbatim)
    V0 = moments(case.rho0)
    expected = np.array([propagate(V0, drift, t).to_vector() for t in times])
    actual = np.array([V.to_vector() for V in oracle])
    deviation = np.abs(actual - expected)
    scale = max(float(np.max(np.abs(expected))), 1e-12)
    worst = int(np.argmax(np.max(deviation, axis=0)))
    return CaseComparison(max_rel_error=float(np.max(deviation)) / scale, worst_coordinate=Coordinate(worst))


def cutoff_change(variant: Variant, *, low: FockConfig, high: FockConfig, r: float = 0.3,
                  n_thermal: float = 0.2) -> float:
    """
    largest absolute change of the extracted moments between two cutoffs
    """
    change = 0.0
    for low_case, high_case in zip(cases_for(variant, low.cutoff, r=r, n_thermal=n_thermal),
                                   cases_for(variant, high.cutoff, r=r, n_thermal=n_thermal)):
        times = low_case.times()
        coarse = evolve_and_extract(low_case.rho0, low_case.params, times, low, variant=variant)
        fine = evolve_and_extract(high_case.rho0, high_case.params, times, high, variant=variant)
        change = max(change, max(float(np.max(np.abs(a.to_vector() - b.to_vector()))) for a, b in zip(coarse, fine)))
    return change


def run_suite(variant: Variant, cfg: FockConfig, *, rtol: float = 1e-3, paper_verbatim: bool = False,
              r: float = 0.3, n_thermal: float = 0.2, convergence_cutoff: Optional[int] = None) -> SuiteReport:
    verbatim = paper_verbatim and variant is Variant.asymmetric
    report = SuiteReport(suite=variant.value, status=SuiteStatus.passed.value, paper_verbatim=verbatim,
                         cutoff=cfg.cutoff, tolerance=rtol, max_rel_error=None, worst_coordinate=None, leak_time=None,
                         cutoff_change=None, detail='')
    worst: Optional[CaseComparison] = None
    try:
        for case in cases_for(variant, cfg.cutoff, r=r, n_thermal=n_thermal):
            comparison = compare_case(case, cfg, paper_verbatim=verbatim)
            LOGGER.debug(f'{variant.value}/{case.name}: max relative error {comparison.max_rel_error}')
            if worst is None or comparison.max_rel_error > worst.max_rel_error:
                worst = comparison
        if convergence_cutoff is not None:
            report['cutoff_change'] = cutoff_change(variant, low=cfg, high=cfg._replace(cutoff=convergence_cutoff),
                                                    r=r, n_thermal=n_thermal)
    except TruncationLeakError as e:
        report['status'] = SuiteStatus.leak.value
        report['leak_time'] = e.t
        report['detail'] = str(e)
        LOGGER.warning(f'{variant.value} suite aborted: {e}')
        return report
    except TraceDriftError as e:
        report['status'] = SuiteStatus.failed.value
        report['detail'] = str(e)
        LOGGER.warning(f'{variant.value} suite failed: {e}')
        return report

    assert worst is not None
    report['max_rel_error'] = worst.max_rel_error
    report['worst_coordinate'] = worst.worst_coordinate.name.lower()
    if worst.max_rel_error > rtol:
        report['status'] = SuiteStatus.failed.value
        report['detail'] = f'moments disagree: {worst.max_rel_error} > {rtol} on {report["worst_coordinate"]}'
        LOGGER.warning(f'{variant.value} suite failed: {report["detail"]}')
    return report


def validate(suite: Suite, cfg: FockConfig, *, rtol: float = 1e-3, paper_verbatim: bool = False, r: float = 0.3,
             n_thermal: float = 0.2, convergence_cutoff: Optional[int] = None) -> ValidationReport:
    reports: Sequence[SuiteReport] = [
        run_suite(variant, cfg, rtol=rtol, paper_verbatim=paper_verbatim, r=r, n_thermal=n_thermal,
                  convergence_cutoff=convergence_cutoff)
        for variant in suite.variants()]
    return ValidationReport(passed=all(report['status'] == SuiteStatus.passed.value for report in reports),
                            suites=list(reports))
