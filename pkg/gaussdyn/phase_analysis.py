# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
Asymptotic entanglement phases, the phase boundary, sudden-death times, sweeps over (R, nT) and the robustness of the
generated entanglement.  R = lambda / kappa throughout; sweeps fix lambda and set kappa = lambda / R, so times come out
in units of 1 / lambda.
"""

import logging
import math
from concurrent.futures import Future, ThreadPoolExecutor
from enum import Enum, unique
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from gaussdyn.dynamics_engine import (
    Divergent, Trajectory, asymptotic_state, propagate, relaxation_rate,
    require_asymptotic_state, symmetric_asymptote
)
from gaussdyn.gaussian_core import (
    TwoModeCovariance, assert_physical, eof_from_x, eof_symmetric,
    is_symmetric, log_negativity, optimal_epr_squeeze, simon_S
)
from gaussdyn.reservoir_models import (
    DriftAffine, EngineeredParams, Variant, build_drift
)
from gaussdyn.utils.streams import reduce_in_chunks

LOGGER = logging.getLogger(__name__)

BOUNDARY_CROSS_CHECK_TOL = 1e-9


class NotEntangledError(ValueError):
    pass


@unique
class PhaseTag(Enum):
    PersistentEntanglement = 'PersistentEntanglement'
    SuddenDeath = 'SuddenDeath'
    Boundary = 'Boundary'
    Divergent = 'Divergent'


class Phase(NamedTuple):
    tag: PhaseTag
    # Simon S of the asymptotic state, None when Divergent
    s_value: Optional[float] = None
    asymptote: Optional[TwoModeCovariance] = None


@unique
class Fate(Enum):
    """
    what happens to the entanglement of one initially entangled state
    """
    persistent = 'persistent'
    sudden_death = 'sudden_death'
    asymptotic_death = 'asymptotic_death'
    death_and_revival = 'death_and_revival'


class EsdResult(NamedTuple):
    # None when S never reaches zero; 1.0 when only the asymptote touches the boundary
    p_esd: Optional[float]
    # lambda t from the closed form, t in the units of the generator from the numeric scan; math.inf unless p_esd
    # is in (0, 1)
    t_esd: float
    revival_p: Optional[float] = None
    revival_t: Optional[float] = None

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.t_esd)


@unique
class Measure(Enum):
    S = 'S'
    EoF = 'EoF'
    logneg = 'logneg'
    phase = 'phase'
    esd_time = 'esd_time'


class SweepRow(NamedTuple):
    R: float
    nT: float
    phase: PhaseTag
    simon_S: Optional[float]
    # the requested measure; None for the Divergent points and for Measure.phase
    value: Optional[float]
    divergent: bool


def _tag(s_value: float, boundary_tol: float) -> PhaseTag:
    if s_value < -boundary_tol:
        return PhaseTag.PersistentEntanglement
    elif s_value > boundary_tol:
        return PhaseTag.SuddenDeath
    return PhaseTag.Boundary


def classify(params: EngineeredParams, *, boundary_tol: float = 1e-9, variant: Variant = Variant.symmetric,
             paper_verbatim: bool = False) -> Phase:
    """
    the fate of entanglement decided by the asymptotic state of the reservoir
    """
    assert boundary_tol > 0, f'expected a positive boundary tolerance: {boundary_tol}'
    asymptote = asymptotic_state(build_drift(params, variant=variant, paper_verbatim=paper_verbatim))
    if isinstance(asymptote, Divergent):
        return Phase(tag=PhaseTag.Divergent)
    s_value = simon_S(asymptote)
    return Phase(tag=_tag(s_value, boundary_tol), s_value=s_value, asymptote=asymptote)


def _normalized_params(*, r: float, R: float, nT: float, phi: float = 0.0, lam: float = 1.0,
                       variant: Variant = Variant.symmetric) -> EngineeredParams:
    if variant is Variant.asymmetric:
        return EngineeredParams.asymmetric(r=r, kappa=lam / R, lam=lam, n_thermal=nT, phi=phi)
    return EngineeredParams.symmetric(r=r, kappa=lam / R, lam=lam, n_thermal=nT, phi=phi)


def _bracket_root(f: Callable[[float], float], *, hi: float) -> float:
    # f(0) < 0 and f increases; widen until the sign changes
    for _ in range(64):
        if f(hi) > 0:
            return hi
        hi *= 2
    raise AssertionError(f'expected to bracket the boundary, last tried nT={hi}')


def boundary_nT(r: float, R: float, *, cross_check_tol: float = BOUNDARY_CROSS_CHECK_TOL) -> float:
    """
    The nT at which the asymptotic state of the symmetric reservoir sits on the separable boundary: n_f = |mc_f| gives
    nT* = (1 - exp(-2r)) / (2R).  Always cross-checked with a root find of S over nT.
    """
    assert r > 0, f'expected a positive squeezing: {r}'
    assert R > 0, f'expected a positive ratio: {R}'
    analytic = -math.expm1(-2 * r) / (2 * R)

    def s_of(nT: float) -> float:
        return simon_S(symmetric_asymptote(_normalized_params(r=r, R=R, nT=nT)))

    root = brentq(s_of, 0.0, _bracket_root(s_of, hi=2 * analytic + 1e-3), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    assert abs(root - analytic) <= cross_check_tol * max(1.0, analytic), \
        f'expected the analytic boundary to match the root of S: analytic={analytic}, root={root}'
    return analytic


def boundary_nT_printed(r: float, R: float) -> float:
    """
    the boundary curve (exp(2r) - 1) / (2R) as originally printed, for comparison plots only
    """
    assert r > 0 and R > 0, f'expected positive r and R: r={r}, R={R}'
    return math.expm1(2 * r) / (2 * R)


def esd_time_closed(r: float, phi: float, R: float, nT: float, *, boundary_tol: float = 1e-9) -> EsdResult:
    """
    From the ideal two-mode squeezed vacuum of the reservoir: p_esd = (1 + R) u / (R (u + nT)) with
    u = A|B| - |B|^2 = sinh(r) exp(-r), and lambda t = R / (2(1 + R)) ln(1 / (1 - p_esd)).  phi drops out.

    nT within boundary_tol (relative) of the boundary u / R is the boundary itself: p_esd = 1 and the state only dies
    asymptotically.
    """
    assert R > 0, f'expected a positive ratio: {R}'
    u = math.sinh(r) * math.exp(-r)
    if u + nT <= 0:
        return EsdResult(p_esd=None, t_esd=math.inf)
    if abs(nT - u / R) <= boundary_tol * max(1.0, u / R):
        return EsdResult(p_esd=1.0, t_esd=math.inf)
    p_esd = (1 + R) * u / (R * (u + nT))
    if not 0 < p_esd < 1:
        return EsdResult(p_esd=None, t_esd=math.inf)
    return EsdResult(p_esd=p_esd, t_esd=R / (2 * (1 + R)) * -math.log1p(-p_esd))


def esd_large_R_limit(r: float, nT: float) -> float:
    """
    lambda t_esd as R -> infinity: (1/2) ln(1 / (1 - p_inf)) with p_inf = u / (nT + u); math.inf at nT = 0
    """
    u = math.sinh(r) * math.exp(-r)
    if nT <= 0:
        return math.inf
    return -0.5 * math.log1p(-u / (nT + u))


class _Crossings(NamedTuple):
    ps: Tuple[float, ...]
    final_s: float


def _trajectory_crossings(V0: TwoModeCovariance, gen: DriftAffine, asymptote: TwoModeCovariance, *,
                          rate: float, scan_points: int, p_tol: float) -> _Crossings:
    def s_at(p: float) -> float:
        if p >= 1:
            return simon_S(asymptote)
        return simon_S(propagate(V0, gen, -math.log1p(-p) / rate))

    ps = np.linspace(0.0, 1.0, scan_points)
    values = [s_at(p) for p in ps]
    crossings: List[float] = []
    for (p_a, s_a), (p_b, s_b) in zip(zip(ps, values), zip(ps[1:], values[1:])):
        if s_a == 0 or (s_a < 0) == (s_b < 0):
            continue
        root = brentq(s_at, p_a, p_b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if root >= 1 - p_tol:
            # the asymptote itself on the boundary
            continue
        crossings.append(float(root))
    return _Crossings(ps=tuple(crossings), final_s=values[-1])


def _time_of(p: float, rate: float) -> float:
    return -math.log1p(-p) / rate


def esd_time_numeric(V0: TwoModeCovariance, gen: DriftAffine, *, scan_points: int = 1001, p_tol: float = 1e-6,
                     boundary_tol: float = 1e-9, physicality_tol: float = 1e-8) -> EsdResult:
    """
    The first zero of S along the trajectory, in p = 1 - exp(-rate t) with rate the slowest relaxation rate of gen (the
    symmetric reservoir moves on a straight line in p).  A second crossing is reported as the revival.
    """
    assert_physical(V0, tol=physicality_tol)
    if simon_S(V0) >= 0:
        raise NotEntangledError(f'initial state not entangled: S={simon_S(V0)}')
    asymptote = require_asymptotic_state(gen)
    rate = relaxation_rate(gen)
    crossings = _trajectory_crossings(V0, gen, asymptote, rate=rate, scan_points=scan_points, p_tol=p_tol)
    if len(crossings.ps) > 2:
        LOGGER.warning(f'more than two entanglement crossings along one trajectory: {crossings.ps}')
    if not crossings.ps:
        if abs(crossings.final_s) <= boundary_tol:
            return EsdResult(p_esd=1.0, t_esd=math.inf)
        return EsdResult(p_esd=None, t_esd=math.inf)
    p_esd = crossings.ps[0]
    if len(crossings.ps) >= 2:
        revival_p = crossings.ps[1]
        return EsdResult(p_esd=p_esd, t_esd=_time_of(p_esd, rate), revival_p=revival_p,
                         revival_t=_time_of(revival_p, rate))
    return EsdResult(p_esd=p_esd, t_esd=_time_of(p_esd, rate))


def classify_fate(V0: TwoModeCovariance, gen: DriftAffine, *, boundary_tol: float = 1e-9, scan_points: int = 1001,
                  p_tol: float = 1e-6) -> Fate:
    result = esd_time_numeric(V0, gen, boundary_tol=boundary_tol, scan_points=scan_points, p_tol=p_tol)
    if result.revival_p is not None:
        return Fate.death_and_revival
    elif result.is_finite:
        return Fate.sudden_death
    elif result.p_esd == 1.0:
        return Fate.asymptotic_death
    return Fate.persistent


def _entanglement(V: TwoModeCovariance, variant: Variant) -> float:
    # the asymmetric asymptotic states are not symmetric, so they get the log-negativity
    if variant is Variant.asymmetric or not is_symmetric(V):
        return log_negativity(V)
    return eof_symmetric(V)


def _evaluate_point(*, r: float, phi: float, R: float, nT: float, measure: Measure, variant: Variant, lam: float,
                    boundary_tol: float, paper_verbatim: bool) -> SweepRow:
    params = _normalized_params(r=r, R=R, nT=nT, phi=phi, lam=lam, variant=variant)
    phase = classify(params, boundary_tol=boundary_tol, variant=variant, paper_verbatim=paper_verbatim)
    if phase.tag is PhaseTag.Divergent:
        return SweepRow(R=R, nT=nT, phase=phase.tag, simon_S=None, value=None, divergent=True)
    assert phase.asymptote is not None and phase.s_value is not None
    value: Optional[float]
    if measure is Measure.S:
        value = phase.s_value
    elif measure is Measure.EoF:
        value = _entanglement(phase.asymptote, variant)
    elif measure is Measure.logneg:
        value = log_negativity(phase.asymptote)
    elif measure is Measure.phase:
        value = None
    elif measure is Measure.esd_time:
        if variant is Variant.asymmetric:
            gen = build_drift(params, variant=variant, paper_verbatim=paper_verbatim)
            value = esd_time_numeric(TwoModeCovariance.tmsv(r, phi), gen).t_esd
        else:
            value = esd_time_closed(r, phi, R, nT, boundary_tol=boundary_tol).t_esd
    else:
        raise AssertionError(f'unknown measure: {measure}')
    return SweepRow(R=R, nT=nT, phase=phase.tag, simon_S=phase.s_value, value=value, divergent=False)


def sweep(*, r: float, R_values: Sequence[float], nT_values: Sequence[float], measure: Measure,
          variant: Variant = Variant.symmetric, phi: float = 0.0, lam: float = 1.0, boundary_tol: float = 1e-9,
          paper_verbatim: bool = False, threads: int = 1, chunk_size: int = 256) -> Tuple[SweepRow, ...]:
    """
    One row per (R, nT) point, R-major.  Chunks of points are evaluated on a thread pool; the rows come back in grid
    order.  Divergent points are flagged, not dropped.
    """
    assert R_values and nT_values, f'expected a non-empty grid: R={R_values}, nT={nT_values}'
    assert all(R > 0 for R in R_values), f'expected positive ratios: {R_values}'
    assert variant is not Variant.laser_frame, f'expected a symmetric or asymmetric sweep, not {variant}'
    assert threads >= 1, f'expected at least one thread: {threads}'

    def evaluate_chunk(points: Iterable[Tuple[float, float]]) -> Tuple[SweepRow, ...]:
        rows = tuple(_evaluate_point(r=r, phi=phi, R=R, nT=nT, measure=measure, variant=variant, lam=lam,
                                     boundary_tol=boundary_tol, paper_verbatim=paper_verbatim) for R, nT in points)
        LOGGER.debug(f'evaluated {len(rows)} grid points')
        return rows

    grid = ((R, nT) for R in R_values for nT in nT_values)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        def submit(points: Iterable[Tuple[float, float]],
                   futures: List["Future[Tuple[SweepRow, ...]]"]) -> List["Future[Tuple[SweepRow, ...]]"]:
            futures.append(executor.submit(evaluate_chunk, tuple(points)))
            return futures
        futures = reduce_in_chunks(stream=grid, n=chunk_size, initial=[], consumer=submit)
        return tuple(row for future in futures for row in future.result())


def robustness_ratio(r: float, nT: float, R: float, kappa_t: float) -> float:
    """
    EoF of the state grown from vacuum by the symmetric reservoir after time kappa_t (units of 1/kappa), normalized by
    the EoF of the ideal two-mode squeezed vacuum.  The state has n = p (|B|^2 + nT R) / (1 + R) and
    mc = p A|B| / (1 + R) with p = 1 - exp(-2(1 + R) kappa t); kappa_t may be math.inf.
    """
    assert r > 0, f'expected a positive squeezing, the ideal entanglement vanishes at r=0: {r}'
    assert kappa_t > 0, f'expected a positive time: {kappa_t}'
    assert R >= 0, f'expected a non-negative ratio: {R}'
    p = 1.0 if math.isinf(kappa_t) else -math.expm1(-2 * (1 + R) * kappa_t)
    n = p * (math.sinh(r) ** 2 + nT * R) / (1 + R)
    mc = p * math.cosh(r) * math.sinh(r) / (1 + R)
    return eof_symmetric(TwoModeCovariance(n1=n, n2=n, mc=mc)) / eof_from_x(math.exp(-2 * r))


class EprComparison(NamedTuple):
    initial_opt: Tuple[Optional[float], ...]
    final_opt: Tuple[Optional[float], ...]
    # None where the state leaves the real symmetric family
    instant_opt: Tuple[Optional[float], ...]


def epr_comparison(trajectory: Trajectory, asymptote: TwoModeCovariance) -> EprComparison:
    """
    EPR variance sums along a real symmetric trajectory for the pair optimal at the start, the pair optimal for the
    asymptote, and the instantaneous optimum
    """
    assert len(trajectory) > 0, f'expected a non-empty trajectory'
    initial_pair = optimal_epr_squeeze(trajectory.states[0])
    final_pair = optimal_epr_squeeze(asymptote)
    return EprComparison(initial_opt=trajectory.epr_sums(initial_pair),
                         final_opt=trajectory.epr_sums(final_pair),
                         instant_opt=trajectory.epr_sums())
