# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
Effective reservoir parameters and the linear-affine generators (M, c) of the second-moment equations
v' = M v + c, in the fixed coordinate layout of TwoModeCovariance.to_vector().

The engineered reservoir damps the collective modes b_1 = A a_1 - B^* a_2^dagger and b_2 = A a_2 - B^* a_1^dagger,
A = cosh r, B = e^{i phi} sinh r, with dissipators kappa_j (2 b rho b^dagger - b^dagger b rho - rho b^dagger b).  The
natural reservoir is lambda (nT + 1) D[a_j] + lambda nT D[a_j^dagger] on each mode.
"""

import cmath
import logging
import math
from enum import Enum, IntEnum, unique
from typing import Mapping, NamedTuple, Optional, Tuple, Type, Union

import numpy as np
from typing_extensions import Final

from gaussdyn.gaussian_core import VECTOR_SIZE

LOGGER = logging.getLogger(__name__)

# |Omega| should dominate |g| for the effective description; below this ratio we only warn
STRONG_DRIVE_RATIO: Final[float] = 10.0


class DegenerateDriveError(ValueError):
    pass


@unique
class Coordinate(IntEnum):
    N1 = 0
    N2 = 1
    RE_M1 = 2
    IM_M1 = 3
    RE_M2 = 4
    IM_M2 = 5
    RE_MC = 6
    IM_MC = 7
    RE_MS = 8
    IM_MS = 9


# the (n1, n2, mc) block never couples to the (m1, m2, ms) block
POPULATION_BLOCK: Final[Tuple[Coordinate, ...]] = (Coordinate.N1, Coordinate.N2, Coordinate.RE_MC, Coordinate.IM_MC)
SQUEEZING_BLOCK: Final[Tuple[Coordinate, ...]] = (Coordinate.RE_M1, Coordinate.IM_M1, Coordinate.RE_M2,
                                                  Coordinate.IM_M2, Coordinate.RE_MS, Coordinate.IM_MS)


@unique
class Variant(Enum):
    symmetric = 'symmetric'
    asymmetric = 'asymmetric'
    laser_frame = 'laser_frame'


class PhysicalSetup(NamedTuple):
    g: float
    Omega: float
    Delta: float
    tau: float
    rate1: float
    rate2: float


class EngineeredParams(NamedTuple):
    r: float
    phi: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    lam: float = 0.0
    n_thermal: float = 0.0
    # dressed splitting, only the laser frame uses it
    d: float = 0.0

    @classmethod
    def symmetric(cls: Type["EngineeredParams"], *, r: float, kappa: float, lam: float, n_thermal: float = 0.0,
                  phi: float = 0.0, d: float = 0.0) -> "EngineeredParams":
        return cls(r=r, phi=phi, kappa1=kappa, kappa2=kappa, lam=lam, n_thermal=n_thermal, d=d)

    @classmethod
    def asymmetric(cls: Type["EngineeredParams"], *, r: float, kappa: float, lam: float, n_thermal: float = 0.0,
                   phi: float = 0.0) -> "EngineeredParams":
        return cls(r=r, phi=phi, kappa1=kappa, kappa2=0.0, lam=lam, n_thermal=n_thermal)

    @property
    def A(self) -> float:
        return math.cosh(self.r)

    @property
    def B(self) -> complex:
        return cmath.exp(1j * self.phi) * math.sinh(self.r)

    @property
    def ratio(self) -> float:
        """
        R = lambda / kappa (kappa1, the rate present in both variants)
        """
        return self.lam / self.kappa1 if self.kappa1 > 0 else math.inf

    def is_symmetric(self) -> bool:
        return self.kappa1 == self.kappa2


class DriftAffine(NamedTuple):
    M: np.ndarray
    c: np.ndarray

    @classmethod
    def zero(cls: Type["DriftAffine"]) -> "DriftAffine":
        return cls(M=np.zeros((VECTOR_SIZE, VECTOR_SIZE)), c=np.zeros(VECTOR_SIZE))

    def rhs(self, v: np.ndarray) -> np.ndarray:
        return self.M @ v + self.c


_REAL_SLOTS: Final[Mapping[str, int]] = {'n1': Coordinate.N1, 'n2': Coordinate.N2}
_COMPLEX_SLOTS: Final[Mapping[str, Tuple[int, int]]] = {
    'm1': (Coordinate.RE_M1, Coordinate.IM_M1),
    'm2': (Coordinate.RE_M2, Coordinate.IM_M2),
    'mc': (Coordinate.RE_MC, Coordinate.IM_MC),
    'ms': (Coordinate.RE_MS, Coordinate.IM_MS),
}


class _DriftBuilder:
    """
    Accumulates complex moment equations into the real (M, c).  A real target (n1, n2) keeps the real part of what is
    added to it.
    """
    def __init__(self) -> None:
        self.M = np.zeros((VECTOR_SIZE, VECTOR_SIZE))
        self.c = np.zeros(VECTOR_SIZE)

    def term(self, target: str, source: str, coefficient: Union[complex, float], *, conjugate: bool = False) -> None:
        """
        target' += coefficient * source, or coefficient * conj(source) when conjugate
        """
        k = complex(coefficient)
        columns: Tuple[Tuple[int, complex], ...]
        if source in _REAL_SLOTS:
            columns = ((_REAL_SLOTS[source], 1 + 0j),)
        else:
            re, im = _COMPLEX_SLOTS[source]
            columns = ((re, 1 + 0j), (im, -1j if conjugate else 1j))
        for column, unit in columns:
            contribution = k * unit
            if target in _REAL_SLOTS:
                self.M[_REAL_SLOTS[target], column] += contribution.real
            else:
                re_target, im_target = _COMPLEX_SLOTS[target]
                self.M[re_target, column] += contribution.real
                self.M[im_target, column] += contribution.imag

    def source(self, target: str, value: Union[complex, float]) -> None:
        value = complex(value)
        if target in _REAL_SLOTS:
            self.c[_REAL_SLOTS[target]] += value.real
        else:
            re_target, im_target = _COMPLEX_SLOTS[target]
            self.c[re_target] += value.real
            self.c[im_target] += value.imag

    def thermal(self, *, lam: float, n_thermal: float) -> None:
        for n in _REAL_SLOTS:
            self.term(n, n, -2 * lam)
            self.source(n, 2 * lam * n_thermal)
        for m in ('m1', 'm2', 'mc', 'ms'):
            self.term(m, m, -2 * lam)

    def engineered(self, *, kappa1: float, kappa2: float, A: float, B: complex) -> None:
        AB = A * B
        ABc = A * B.conjugate()
        B2 = abs(B) ** 2
        # b_1 = A a_1 - B^* a_2^dagger
        self.term('n1', 'n1', -2 * A ** 2 * kappa1)
        self.term('n1', 'mc', 2 * kappa1 * AB)
        self.term('n2', 'n2', 2 * B2 * kappa1)
        self.term('n2', 'mc', -2 * kappa1 * AB)
        self.source('n2', 2 * kappa1 * B2)
        self.term('m1', 'm1', -2 * A ** 2 * kappa1)
        self.term('m1', 'ms', 2 * ABc * kappa1)
        self.term('m2', 'm2', 2 * B2 * kappa1)
        self.term('m2', 'ms', -2 * ABc * kappa1, conjugate=True)
        self.term('mc', 'mc', -kappa1)
        self.term('mc', 'n1', -ABc * kappa1)
        self.term('mc', 'n2', ABc * kappa1)
        self.source('mc', ABc * kappa1)
        self.term('ms', 'ms', -kappa1)
        self.term('ms', 'm1', -AB * kappa1)
        self.term('ms', 'm2', ABc * kappa1, conjugate=True)
        # b_2 = A a_2 - B^* a_1^dagger: the same with 1 <-> 2, under which ms -> ms^*
        self.term('n2', 'n2', -2 * A ** 2 * kappa2)
        self.term('n2', 'mc', 2 * kappa2 * AB)
        self.term('n1', 'n1', 2 * B2 * kappa2)
        self.term('n1', 'mc', -2 * kappa2 * AB)
        self.source('n1', 2 * kappa2 * B2)
        self.term('m2', 'm2', -2 * A ** 2 * kappa2)
        self.term('m2', 'ms', 2 * ABc * kappa2, conjugate=True)
        self.term('m1', 'm1', 2 * B2 * kappa2)
        self.term('m1', 'ms', -2 * ABc * kappa2)
        self.term('mc', 'mc', -kappa2)
        self.term('mc', 'n2', -ABc * kappa2)
        self.term('mc', 'n1', ABc * kappa2)
        self.source('mc', ABc * kappa2)
        self.term('ms', 'ms', -kappa2)
        self.term('ms', 'm1', AB * kappa2)
        self.term('ms', 'm2', -ABc * kappa2, conjugate=True)

    def laser_frame_rotation(self, *, d: float) -> None:
        self.term('m1', 'm1', 2j * d)
        self.term('m2', 'm2', -2j * d)
        self.term('ms', 'ms', 2j * d)

    def build(self) -> DriftAffine:
        return DriftAffine(M=self.M, c=self.c)


def effective_params(setup: PhysicalSetup, *, lam: float, n_thermal: float, phi: float = 0.0) -> EngineeredParams:
    """
    maps the cavity / atom setup onto the engineered reservoir: d = sqrt(Delta^2 + 4 Omega^2),
    tan(theta) = 2 Omega / (d - Delta), mu = tan^2 or tan^-2 (whichever is < 1), Omega_b = g sqrt((1-mu)/(1+mu)),
    r = artanh(mu) and kappa_j = rate_j Omega_b^2 tau^2 / 4
    """
    assert setup.Omega != 0 or setup.Delta != 0, f'expected a drive or a detuning: {setup}'
    assert setup.tau > 0, f'expected a positive interaction time: {setup.tau}'
    assert setup.rate1 >= 0 and setup.rate2 >= 0, f'expected non-negative preparation rates: {setup}'
    if abs(setup.Omega) < STRONG_DRIVE_RATIO * abs(setup.g):
        LOGGER.warning(f'drive is not much stronger than the coupling, the effective reservoir is approximate: '
                       f'Omega={setup.Omega}, g={setup.g}')
    d = math.sqrt(setup.Delta ** 2 + 4 * setup.Omega ** 2)
    # d == Delta only when Omega == 0 and Delta > 0, the no-drive limit
    tan_theta = 2 * setup.Omega / (d - setup.Delta) if d != setup.Delta else math.inf
    mu = tan_theta ** 2 if abs(tan_theta) < 1 else tan_theta ** -2
    if mu >= 1:
        raise DegenerateDriveError(f'degenerate drive: mu={mu} (tan(theta)={tan_theta}), Omega_b vanishes')
    omega_b_squared = setup.g ** 2 * (1 - mu) / (1 + mu)
    return EngineeredParams(r=math.atanh(mu), phi=phi,
                            kappa1=setup.rate1 * omega_b_squared * setup.tau ** 2 / 4,
                            kappa2=setup.rate2 * omega_b_squared * setup.tau ** 2 / 4,
                            lam=lam, n_thermal=n_thermal, d=d)


def drift_general(p: EngineeredParams) -> DriftAffine:
    """
    the generator for any kappa1, kappa2 >= 0
    """
    assert p.kappa1 >= 0 and p.kappa2 >= 0 and p.lam >= 0, f'expected non-negative rates: {p}'
    builder = _DriftBuilder()
    builder.thermal(lam=p.lam, n_thermal=p.n_thermal)
    builder.engineered(kappa1=p.kappa1, kappa2=p.kappa2, A=p.A, B=p.B)
    return builder.build()


def drift_symmetric(p: EngineeredParams) -> DriftAffine:
    """
    n_j' = -2(k+l) n_j + 2k|B|^2 + 2 l nT, m_j' = -2(k+l) m_j, mc' = -2(k+l) mc + 2k A B^*, ms' = -2(k+l) ms
    """
    assert p.kappa1 == p.kappa2, f'expected kappa1 == kappa2 for the symmetric reservoir: {p}'
    return drift_general(p)


def drift_asymmetric(p: EngineeredParams, *, paper_verbatim: bool = False) -> DriftAffine:
    """
    only type-1 atoms (kappa2 = 0).  paper_verbatim reproduces the equations as originally printed: the n2 decay acts
    on n1, and the m1 / m2 / ms equations use the opposite sign of ms and m2 instead of m2^*.
    """
    assert p.kappa2 == 0, f'expected kappa2 == 0 for the asymmetric reservoir: {p}'
    assert p.kappa1 > 0, f'expected kappa1 > 0 for the asymmetric reservoir: {p}'
    if not paper_verbatim:
        return drift_general(p)
    return _drift_asymmetric_as_printed(p)


def _drift_asymmetric_as_printed(p: EngineeredParams) -> DriftAffine:
    kappa = p.kappa1
    A = p.A
    AB = A * p.B
    ABc = A * p.B.conjugate()
    B2 = abs(p.B) ** 2
    builder = _DriftBuilder()
    builder.term('n1', 'n1', -2 * (A ** 2 * kappa + p.lam))
    builder.term('n1', 'mc', 2 * kappa * AB)
    builder.source('n1', 2 * p.lam * p.n_thermal)
    builder.term('n2', 'n1', -2 * (p.lam - B2 * kappa))
    builder.term('n2', 'mc', -2 * kappa * AB)
    builder.source('n2', 2 * p.lam * p.n_thermal + 2 * kappa * B2)
    builder.term('m1', 'm1', -2 * (A ** 2 * kappa + p.lam))
    builder.term('m1', 'ms', -2 * ABc * kappa)
    builder.term('m2', 'm2', -2 * (p.lam - B2 * kappa))
    builder.term('m2', 'ms', 2 * ABc * kappa, conjugate=True)
    builder.term('mc', 'mc', -(kappa + 2 * p.lam))
    builder.term('mc', 'n1', -ABc * kappa)
    builder.term('mc', 'n2', ABc * kappa)
    builder.source('mc', ABc * kappa)
    builder.term('ms', 'ms', -(kappa + 2 * p.lam))
    builder.term('ms', 'm1', AB * kappa)
    builder.term('ms', 'm2', -ABc * kappa)
    return builder.build()


def drift_laser_frame(p: EngineeredParams) -> DriftAffine:
    """
    the symmetric generator seen from the laser frame: m1 rotates at +2d, m2 at -2d and ms at +2d
    """
    assert p.kappa1 == p.kappa2, f'expected kappa1 == kappa2 for the laser frame: {p}'
    builder = _DriftBuilder()
    builder.thermal(lam=p.lam, n_thermal=p.n_thermal)
    builder.engineered(kappa1=p.kappa1, kappa2=p.kappa2, A=p.A, B=p.B)
    builder.laser_frame_rotation(d=p.d)
    return builder.build()


def build_drift(p: EngineeredParams, *, variant: Variant, paper_verbatim: bool = False) -> DriftAffine:
    if variant is Variant.symmetric:
        return drift_symmetric(p)
    elif variant is Variant.asymmetric:
        return drift_asymmetric(p, paper_verbatim=paper_verbatim)
    elif variant is Variant.laser_frame:
        return drift_laser_frame(p)
    else:
        raise AssertionError(f'unknown variant: {variant}')


def reservoir_for_asymptote(*, n_final: float, mc_final: float, ratio: float, kappa: Optional[float] = None,
                            lam: Optional[float] = None) -> EngineeredParams:
    """
    The symmetric reservoir whose asymptotic state has n = n_final and m_c = mc_final (real): from
    mc_f = A B / (1 + R) and n_f = (|B|^2 + nT R) / (1 + R), sinh(2r) = 2 mc_f (1 + R) and
    nT = (n_f (1 + R) - sinh^2 r) / R.  Give either kappa or lam (default lam = 1).
    """
    assert ratio > 0, f'expected a positive ratio: {ratio}'
    assert mc_final >= 0, f'expected a non-negative asymptotic correlation: {mc_final}'
    assert kappa is None or lam is None, f'expected kappa or lam, not both'
    r = math.asinh(2 * mc_final * (1 + ratio)) / 2
    n_thermal = (n_final * (1 + ratio) - math.sinh(r) ** 2) / ratio
    assert n_thermal >= 0, \
        f'expected an asymptote reachable with nT >= 0: n_final={n_final}, mc_final={mc_final}, ratio={ratio}'
    if kappa is None:
        lam = 1.0 if lam is None else lam
        kappa = lam / ratio
    else:
        lam = kappa * ratio
    return EngineeredParams.symmetric(r=r, kappa=kappa, lam=lam, n_thermal=n_thermal)
