# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import logging
import math
from enum import Enum, unique
from typing import (
    Any, List, NamedTuple, Optional, Sequence, Tuple, Type, Union
)

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from gaussdyn.gaussian_core import (
    VECTOR_SIZE, EprPair, TwoModeCovariance, assert_physical, eof_symmetric,
    epr_variance_sum, in_real_symmetric_family, is_symmetric, log_negativity,
    optimal_epr_squeeze, simon_S, symplectic_eigenvalues
)
from gaussdyn.reservoir_models import DriftAffine, EngineeredParams

LOGGER = logging.getLogger(__name__)


class DivergentDynamicsError(RuntimeError):
    pass


class PhysicalityDriftError(RuntimeError):
    pass


class Divergent(NamedTuple):
    # the eigenvalues of M that are not in the open left half plane
    eigenvalues: Tuple[complex, ...]


@unique
class PropagationMethod(Enum):
    expm = 'expm'
    rk45 = 'rk45'


class Stage(NamedTuple):
    drift: DriftAffine
    # math.inf only for the last stage
    duration: float


class Schedule(NamedTuple):
    stages: Tuple[Stage, ...]

    @classmethod
    def create(cls: Type["Schedule"], stages: Sequence[Stage]) -> "Schedule":
        assert stages, f'expected at least one stage'
        for i, stage in enumerate(stages):
            assert stage.duration >= 0, f'expected a non-negative duration: stage {i} {stage.duration}'
            assert math.isfinite(stage.duration) or i == len(stages) - 1, \
                f'expected only the last stage to be unbounded: stage {i}'
        return cls(stages=tuple(stages))

    @classmethod
    def single(cls: Type["Schedule"], drift: DriftAffine) -> "Schedule":
        return cls.create([Stage(drift=drift, duration=math.inf)])

    @classmethod
    def two_stage(cls: Type["Schedule"], *, prepare: DriftAffine, prepare_duration: float,
                  probe: DriftAffine) -> "Schedule":
        """
        prepare for prepare_duration, then switch the reservoir and keep it
        """
        return cls.create([Stage(drift=prepare, duration=prepare_duration), Stage(drift=probe, duration=math.inf)])

    @property
    def total_duration(self) -> float:
        return sum(stage.duration for stage in self.stages)

    def is_bounded(self) -> bool:
        return math.isfinite(self.total_duration)


class Trajectory:
    """
    Immutable time-stamped states.  The derived series are computed on demand.
    """
    def __init__(self, *, times: Sequence[float], states: Sequence[TwoModeCovariance]) -> None:
        assert len(times) == len(states), f'expected one state per time: {len(times)} != {len(states)}'
        assert all(b > a for a, b in zip(times, times[1:])), f'expected strictly ascending times: {times}'
        self._times: Tuple[float, ...] = tuple(float(t) for t in times)
        self._states: Tuple[TwoModeCovariance, ...] = tuple(states)

    @property
    def times(self) -> Tuple[float, ...]:
        return self._times

    @property
    def states(self) -> Tuple[TwoModeCovariance, ...]:
        return self._states

    def __len__(self) -> int:
        return len(self._times)

    def simon_S(self) -> Tuple[float, ...]:
        return tuple(simon_S(V) for V in self._states)

    def eof(self) -> Tuple[Optional[float], ...]:
        """
        None where the state is not symmetric
        """
        return tuple(eof_symmetric(V) if is_symmetric(V) else None for V in self._states)

    def log_negativity(self) -> Tuple[float, ...]:
        return tuple(log_negativity(V) for V in self._states)

    def epr_sums(self, pair: Optional[EprPair] = None) -> Tuple[Optional[float], ...]:
        """
        :param pair: a fixed EprPair, or None for the instantaneous optimum of every state; the optimum is None for the
        states outside the real symmetric family
        """
        if pair is None:
            return tuple(epr_variance_sum(V, optimal_epr_squeeze(V)) if in_real_symmetric_family(V) else None
                         for V in self._states)
        return tuple(epr_variance_sum(V, pair) for V in self._states)


def relaxation_rate(gen: DriftAffine) -> float:
    """
    minus the spectral abscissa of M: the slowest relaxation rate, 2(kappa + lambda) for the symmetric reservoir
    """
    return float(-np.max(np.linalg.eigvals(gen.M).real))


def progress(gen: DriftAffine, t: float) -> float:
    """
    p(t) = 1 - exp(-rate t)
    """
    return -math.expm1(-relaxation_rate(gen) * t)


def _symmetric_rate(params: EngineeredParams) -> float:
    assert params.kappa1 == params.kappa2, f'expected symmetric params: {params}'
    return 2 * (params.kappa1 + params.lam)


def symmetric_asymptote(params: EngineeredParams) -> TwoModeCovariance:
    """
    n_f = (kappa |B|^2 + lambda nT) / (kappa + lambda), mc_f = kappa A B^* / (kappa + lambda)
    """
    total = params.kappa1 + params.lam
    assert params.kappa1 == params.kappa2, f'expected symmetric params: {params}'
    assert total > 0, f'expected some dissipation: {params}'
    n_final = (params.kappa1 * abs(params.B) ** 2 + params.lam * params.n_thermal) / total
    return TwoModeCovariance(n1=n_final, n2=n_final, mc=params.kappa1 * params.A * params.B.conjugate() / total)


def propagate_closed_form(V0: TwoModeCovariance, params: EngineeredParams, t: float) -> TwoModeCovariance:
    """
    the symmetric reservoir moves every coordinate on a straight line: v(t) = v0 + p(t) (v_f - v0) with
    p(t) = 1 - exp(-2(kappa + lambda) t)
    """
    assert t >= 0, f'expected a non-negative time: {t}'
    rate = _symmetric_rate(params)
    if rate == 0:
        return V0
    p = 1.0 if math.isinf(t) else -math.expm1(-rate * t)
    v0 = V0.to_vector()
    return TwoModeCovariance.from_vector(v0 + p * (symmetric_asymptote(params).to_vector() - v0))


def _homogenized(gen: DriftAffine) -> np.ndarray:
    # [[M, c], [0, 0]] acting on (v, 1)
    H = np.zeros((VECTOR_SIZE + 1, VECTOR_SIZE + 1))
    H[:VECTOR_SIZE, :VECTOR_SIZE] = gen.M
    H[:VECTOR_SIZE, VECTOR_SIZE] = gen.c
    return H


def propagate(V0: TwoModeCovariance, gen: DriftAffine, t: float, *, rtol: float = 1e-10,
              method: PropagationMethod = PropagationMethod.expm) -> TwoModeCovariance:
    """
    solves v' = M v + c from V0 for time t.  Divergent generators are fine here.
    """
    assert t >= 0 and math.isfinite(t), f'expected a finite non-negative time: {t}'
    assert rtol > 0, f'expected a positive tolerance: {rtol}'
    if t == 0:
        return V0
    v0 = V0.to_vector()
    if method is PropagationMethod.expm:
        extended = expm(_homogenized(gen) * t) @ np.append(v0, 1.0)
        return TwoModeCovariance.from_vector(extended[:VECTOR_SIZE])
    elif method is PropagationMethod.rk45:
        solution = solve_ivp(lambda _, v: gen.rhs(v), (0.0, t), v0, method='RK45', rtol=rtol, atol=rtol * 1e-2)
        assert solution.success, f'expected the integrator to succeed: {solution.message}'
        return TwoModeCovariance.from_vector(solution.y[:, -1])
    else:
        raise AssertionError(f'unknown method: {method}')


def asymptotic_state(gen: DriftAffine, *, divergence_rel_tol: float = 1e-12,
                     condition_warn: float = 1e12) -> Union[TwoModeCovariance, Divergent]:
    """
    v* solving M v* = -c when M is Hurwitz; else Divergent with the offending eigenvalues
    """
    eigenvalues = np.linalg.eigvals(gen.M)
    threshold = -divergence_rel_tol * np.linalg.norm(gen.M)
    offending = tuple(complex(e) for e in eigenvalues if e.real >= threshold)
    if offending:
        return Divergent(eigenvalues=offending)
    condition = np.linalg.cond(gen.M)
    if condition > condition_warn:
        LOGGER.warning(f'drift matrix is ill-conditioned, the asymptotic state may be inaccurate: cond={condition}')
    return TwoModeCovariance.from_vector(np.linalg.solve(gen.M, -gen.c))


def require_asymptotic_state(gen: DriftAffine, **kwargs: Any) -> TwoModeCovariance:
    asymptote = asymptotic_state(gen, **kwargs)
    if isinstance(asymptote, Divergent):
        raise DivergentDynamicsError(f'drift is not Hurwitz, the moments grow without bound: '
                                     f'eigenvalues={asymptote.eigenvalues}')
    return asymptote


def _check_physical(V: TwoModeCovariance, *, t: float, tol: float) -> None:
    nu_minus, _ = symplectic_eigenvalues(V)
    if not nu_minus >= 0.5 - tol:
        raise PhysicalityDriftError(f'propagation left the physical states: t={t}, nu_minus={nu_minus}, state={V}')


def run_schedule(V0: TwoModeCovariance, schedule: Schedule, sample_times: Sequence[float], *,
                 rtol: float = 1e-10, physicality_tol: float = 1e-8,
                 method: PropagationMethod = PropagationMethod.expm) -> Trajectory:
    """
    piecewise propagation through the stages, continuous at every switch, sampled at sample_times
    """
    assert_physical(V0, tol=physicality_tol)
    assert all(b > a for a, b in zip(sample_times, sample_times[1:])), \
        f'expected strictly ascending sample times: {sample_times}'
    assert not sample_times or (sample_times[0] >= 0 and sample_times[-1] <= schedule.total_duration), \
        f'expected sample times within [0, {schedule.total_duration}]: {sample_times}'

    states: List[TwoModeCovariance] = []
    stage_start = 0.0
    stage_state = V0
    samples = iter(sample_times)
    t = next(samples, None)
    for i, stage in enumerate(schedule.stages):
        stage_end = stage_start + stage.duration
        last = i == len(schedule.stages) - 1
        while t is not None and (t < stage_end or (last and t <= stage_end)):
            V = propagate(stage_state, stage.drift, t - stage_start, rtol=rtol, method=method)
            _check_physical(V, t=t, tol=physicality_tol)
            states.append(V)
            t = next(samples, None)
        if last or t is None:
            break
        LOGGER.debug(f'stage {i} ends at t={stage_end}')
        stage_state = propagate(stage_state, stage.drift, stage.duration, rtol=rtol, method=method)
        stage_start = stage_end
    return Trajectory(times=sample_times, states=states)


def trajectory_of(V0: TwoModeCovariance, gen: DriftAffine, times: Sequence[float], **kwargs: Any) -> Trajectory:
    return run_schedule(V0, Schedule.single(gen), times, **kwargs)
