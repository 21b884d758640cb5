# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
The full master equation on a truncated two-mode Fock space, integrated with a fixed-step RK4, as an independent
check of the moment equations.  Density matrices are (N^2 x N^2) with mode 1 the slow index: |n1, n2> is
n1 * N + n2.
"""

import logging
import math
from functools import lru_cache
from typing import (
    Any, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Type
)

import numpy as np
import scipy.sparse as sp
from typing_extensions import Final

from gaussdyn.gaussian_core import TwoModeCovariance
from gaussdyn.reservoir_models import EngineeredParams, Variant

LOGGER = logging.getLogger(__name__)

MAX_CUTOFF: Final[int] = 24
MIN_CUTOFF: Final[int] = 4
TRACE_DRIFT_TOL: Final[float] = 1e-9


class TruncationLeakError(RuntimeError):
    def __init__(self, message: str, *, t: float, population: float) -> None:
        super().__init__(message)
        self.t = t
        self.population = population


class TraceDriftError(RuntimeError):
    pass


class FockConfig(NamedTuple):
    cutoff: int = 12
    # None means 1e-3 / (kappa + lambda + 1)
    dt: Optional[float] = None
    leak_tol: float = 1e-4

    @classmethod
    def create(cls: Type["FockConfig"], *, cutoff: int = 12, dt: Optional[float] = None,
               leak_tol: float = 1e-4) -> "FockConfig":
        assert MIN_CUTOFF <= cutoff <= MAX_CUTOFF, f'expected a cutoff in [{MIN_CUTOFF}, {MAX_CUTOFF}]: {cutoff}'
        assert dt is None or dt > 0, f'expected a positive step: {dt}'
        assert 0 < leak_tol <= 1e-3, f'expected a leak tolerance in (0, 1e-3]: {leak_tol}'
        return cls(cutoff=cutoff, dt=dt, leak_tol=leak_tol)

    @classmethod
    def create_from_config(cls: Type["FockConfig"], config: Mapping[Any, Any]) -> "FockConfig":
        return cls.create(cutoff=config.get('FOCK_CUTOFF', 12), dt=config.get('FOCK_DT'),
                          leak_tol=config.get('FOCK_LEAK_TOL', 1e-4))

    def step_for(self, params: EngineeredParams) -> float:
        if self.dt is not None:
            return self.dt
        return 1e-3 / (max(params.kappa1, params.kappa2) + params.lam + 1)


class _ModeOperators(NamedTuple):
    a1: sp.csr_matrix
    a2: sp.csr_matrix
    identity: sp.csr_matrix


@lru_cache(maxsize=8)
def _operators(cutoff: int) -> _ModeOperators:
    a = sp.diags(np.sqrt(np.arange(1, cutoff)), offsets=1, format='csr', dtype=complex)
    eye = sp.identity(cutoff, format='csr', dtype=complex)
    return _ModeOperators(a1=sp.kron(a, eye, format='csr'), a2=sp.kron(eye, a, format='csr'),
                          identity=sp.identity(cutoff ** 2, format='csr', dtype=complex))


def _dissipators(params: EngineeredParams, cutoff: int) -> List[Tuple[float, sp.csr_matrix]]:
    """
    (rate, L) pairs, each entering as rate (2 L rho L^dagger - L^dagger L rho - rho L^dagger L)
    """
    ops = _operators(cutoff)
    A = params.A
    Bc = params.B.conjugate()
    b1 = A * ops.a1 - Bc * ops.a2.getH()
    b2 = A * ops.a2 - Bc * ops.a1.getH()
    jumps = [(params.kappa1, b1), (params.kappa2, b2)]
    for a in (ops.a1, ops.a2):
        jumps.append((params.lam * (params.n_thermal + 1), a))
        jumps.append((params.lam * params.n_thermal, a.getH()))
    return [(rate, L.tocsr()) for rate, L in jumps if rate > 0]


def _hamiltonian(params: EngineeredParams, cutoff: int, variant: Variant) -> sp.csr_matrix:
    ops = _operators(cutoff)
    if variant is not Variant.laser_frame or params.d == 0:
        return sp.csr_matrix((cutoff ** 2, cutoff ** 2), dtype=complex)
    # rotates m1 at +2d, m2 at -2d and ms at +2d
    return (params.d * (ops.a2.getH() @ ops.a2 - ops.a1.getH() @ ops.a1)).tocsr()


@lru_cache(maxsize=16)
def liouvillian(params: EngineeredParams, cutoff: int, variant: Variant = Variant.symmetric) -> sp.csr_matrix:
    """
    the generator acting on the row-major flattened density matrix: vec(X rho Y) = (X kron Y^T) vec(rho)
    """
    ops = _operators(cutoff)
    effective = _hamiltonian(params, cutoff, variant)
    sandwiches = []
    for rate, L in _dissipators(params, cutoff):
        effective = effective - 1j * rate * (L.getH() @ L)
        sandwiches.append(2 * rate * sp.kron(L, L.conj(), format='csr'))
    generator = -1j * (sp.kron(effective, ops.identity) - sp.kron(ops.identity, effective.conj()))
    for sandwich in sandwiches:
        generator = generator + sandwich
    LOGGER.debug(f'built liouvillian: cutoff={cutoff}, variant={variant}, nnz={generator.nnz}')
    return generator.tocsr()


def lindblad_rhs(rho: np.ndarray, params: EngineeredParams, *, variant: Variant = Variant.symmetric) -> np.ndarray:
    dimension = rho.shape[0]
    cutoff = int(round(math.sqrt(dimension)))
    assert cutoff ** 2 == dimension and rho.shape == (dimension, dimension), \
        f'expected a two-mode density matrix, not shape {rho.shape}'
    return (liouvillian(params, cutoff, variant) @ rho.ravel()).reshape(rho.shape)


def vacuum_state(cutoff: int) -> np.ndarray:
    return fock_state(cutoff, 0, 0)


def fock_state(cutoff: int, n1: int, n2: int) -> np.ndarray:
    assert 0 <= n1 < cutoff and 0 <= n2 < cutoff, f'expected levels below the cutoff {cutoff}: {n1}, {n2}'
    rho = np.zeros((cutoff ** 2, cutoff ** 2), dtype=complex)
    rho[n1 * cutoff + n2, n1 * cutoff + n2] = 1
    return rho


def thermal_state(cutoff: int, n1: float, n2: float) -> np.ndarray:
    """
    product of truncated, renormalized geometric distributions
    """
    def populations(n: float) -> np.ndarray:
        weights = (n / (n + 1)) ** np.arange(cutoff) if n > 0 else np.eye(1, cutoff)[0]
        return weights / weights.sum()
    return np.diag(np.kron(populations(n1), populations(n2))).astype(complex)


def pure_state(cutoff: int, amplitudes: Mapping[Tuple[int, int], complex]) -> np.ndarray:
    """
    the projector on the normalized superposition of |n1, n2> with the given amplitudes
    """
    psi = np.zeros(cutoff ** 2, dtype=complex)
    for (n1, n2), amplitude in amplitudes.items():
        assert 0 <= n1 < cutoff and 0 <= n2 < cutoff, f'expected levels below the cutoff {cutoff}: {n1}, {n2}'
        psi[n1 * cutoff + n2] = amplitude
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def top_level_population(rho: np.ndarray) -> float:
    """
    the larger of the two marginal populations of the highest kept level
    """
    cutoff = int(round(math.sqrt(rho.shape[0])))
    populations = np.real(np.diag(rho)).reshape(cutoff, cutoff)
    return float(max(populations[-1, :].sum(), populations[:, -1].sum()))


def moments(rho: np.ndarray) -> TwoModeCovariance:
    cutoff = int(round(math.sqrt(rho.shape[0])))
    ops = _operators(cutoff)

    def expectation(operator: sp.csr_matrix) -> complex:
        return complex((operator @ rho).diagonal().sum())
    a1, a2 = ops.a1, ops.a2
    return TwoModeCovariance(n1=expectation(a1.getH() @ a1).real, n2=expectation(a2.getH() @ a2).real,
                             m1=-expectation(a1 @ a1), m2=-expectation(a2 @ a2),
                             mc=expectation(a1 @ a2), ms=-expectation(a1 @ a2.getH()))


def _rk4_step(generator: sp.csr_matrix, v: np.ndarray, h: float) -> np.ndarray:
    k1 = generator @ v
    k2 = generator @ (v + 0.5 * h * k1)
    k3 = generator @ (v + 0.5 * h * k2)
    k4 = generator @ (v + h * k3)
    return v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(rho0: np.ndarray, params: EngineeredParams, times: Sequence[float], cfg: FockConfig, *,
           variant: Variant = Variant.symmetric) -> Tuple[np.ndarray, ...]:
    """
    Integrates from t = 0 and returns the density matrix at each of the ascending times.  Each interval is split into
    equal steps no longer than the configured step.
    :raises TruncationLeakError as soon as the top kept level holds more than cfg.leak_tol
    :raises TraceDriftError if the trace moves by more than 1e-9 in a step
    """
    dimension = cfg.cutoff ** 2
    assert rho0.shape == (dimension, dimension), f'expected a density matrix for cutoff {cfg.cutoff}: {rho0.shape}'
    assert all(t >= 0 for t in times) and all(b > a for a, b in zip(times, times[1:])), \
        f'expected ascending non-negative times: {times}'
    initial_leak = top_level_population(rho0)
    if initial_leak >= cfg.leak_tol:
        raise TruncationLeakError(f'initial state already populates the top level: {initial_leak}', t=0.0,
                                  population=initial_leak)
    generator = liouvillian(params, cfg.cutoff, variant)
    diagonal = np.arange(dimension) * (dimension + 1)
    max_step = cfg.step_for(params)

    v = rho0.ravel().astype(complex)
    t = 0.0
    states: List[np.ndarray] = []
    for target in times:
        steps = max(1, math.ceil((target - t) / max_step - 1e-9)) if target > t else 0
        h = (target - t) / steps if steps else 0.0
        for _ in range(steps):
            trace = v[diagonal].sum().real
            v = _rk4_step(generator, v, h)
            t += h
            drift = abs(v[diagonal].sum().real - trace)
            if drift > TRACE_DRIFT_TOL:
                raise TraceDriftError(f'trace drifted by {drift} in one step at t={t}')
            population = top_level_population(v.reshape(dimension, dimension))
            if population > cfg.leak_tol:
                raise TruncationLeakError(f'truncation no longer trustworthy at t={t}: top-level population '
                                          f'{population} > {cfg.leak_tol}', t=t, population=population)
        t = target
        states.append(v.reshape(dimension, dimension).copy())
    return tuple(states)


def evolve_and_extract(rho0: np.ndarray, params: EngineeredParams, times: Sequence[float], cfg: FockConfig, *,
                       variant: Variant = Variant.symmetric) -> Tuple[TwoModeCovariance, ...]:
    """
    the second moments at each of the ascending times, see evolve
    """
    return tuple(moments(rho) for rho in evolve(rho0, params, times, cfg, variant=variant))
