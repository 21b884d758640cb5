# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
The two-mode covariance matrix and every time-independent entanglement / physicality computation on it.

Conventions: x = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)), so the vacuum variance is 1/2 and every
symplectic threshold is 1/2.  The moments are n_j = <a_j^dagger a_j>, m_j = -<a_j^2>, m_c = <a_1 a_2> and
m_s = -<a_1 a_2^dagger>.
"""

import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple, Type

import numpy as np
from typing_extensions import Final

LOGGER = logging.getLogger(__name__)

VECTOR_SIZE: Final[int] = 10
# clamp for the EoF argument; x -> 0 only for infinitely squeezed states
EOF_X_MIN: Final[float] = 1e-12
SYMMETRY_REL_TOL: Final[float] = 1e-9

# the standard symplectic form on (x1, p1, x2, p2)
OMEGA: Final[np.ndarray] = np.array([[0., 1., 0., 0.],
                                     [-1., 0., 0., 0.],
                                     [0., 0., 0., 1.],
                                     [0., 0., -1., 0.]])
_PARTIAL_TRANSPOSE: Final[np.ndarray] = np.diag([1., 1., 1., -1.])
_Z: Final[np.ndarray] = np.diag([1., -1.])


class NonPhysicalStateError(ValueError):
    pass


class AsymmetricStateError(ValueError):
    pass


class NotInFamilyError(ValueError):
    pass


class TwoModeCovariance(NamedTuple):
    n1: float = 0.0
    n2: float = 0.0
    m1: complex = 0j
    m2: complex = 0j
    mc: complex = 0j
    ms: complex = 0j

    @classmethod
    def vacuum(cls: Type["TwoModeCovariance"]) -> "TwoModeCovariance":
        return cls()

    @classmethod
    def thermal(cls: Type["TwoModeCovariance"], n1: float, n2: Optional[float] = None) -> "TwoModeCovariance":
        return cls(n1=n1, n2=n1 if n2 is None else n2)

    @classmethod
    def tmsv(cls: Type["TwoModeCovariance"], r: float, phi: float = 0.0) -> "TwoModeCovariance":
        """
        the two-mode squeezed vacuum the engineered reservoir drives towards: n = |B|^2, m_c = A B^*
        """
        return cls(n1=math.sinh(r) ** 2, n2=math.sinh(r) ** 2,
                   mc=math.cosh(r) * math.sinh(r) * complex(math.cos(phi), -math.sin(phi)))

    @classmethod
    def from_vector(cls: Type["TwoModeCovariance"], v: Sequence[float]) -> "TwoModeCovariance":
        assert len(v) == VECTOR_SIZE, f'expected {VECTOR_SIZE} coordinates, not {len(v)}: {v}'
        return cls(n1=float(v[0]), n2=float(v[1]), m1=complex(v[2], v[3]), m2=complex(v[4], v[5]),
                   mc=complex(v[6], v[7]), ms=complex(v[8], v[9]))

    def to_vector(self) -> np.ndarray:
        """
        (n1, n2, Re m1, Im m1, Re m2, Im m2, Re mc, Im mc, Re ms, Im ms)
        """
        m1, m2, mc, ms = (complex(z) for z in (self.m1, self.m2, self.mc, self.ms))
        return np.array([self.n1, self.n2, m1.real, m1.imag, m2.real, m2.imag, mc.real, mc.imag, ms.real, ms.imag],
                        dtype=float)

    def rotated(self, theta1: float, theta2: float) -> "TwoModeCovariance":
        """
        local phase rotations a_j -> e^{i theta_j} a_j
        """
        def phase(angle: float) -> complex:
            return complex(math.cos(angle), math.sin(angle))
        return self._replace(m1=self.m1 * phase(2 * theta1), m2=self.m2 * phase(2 * theta2),
                             mc=self.mc * phase(theta1 + theta2), ms=self.ms * phase(theta1 - theta2))


class SimonInvariants(NamedTuple):
    I1: float
    I2: float
    I3: float
    I4: float


class EprPair(NamedTuple):
    weight_a: float
    local_squeeze: float
    rotation_angle: float = 0.0
    # the optimizer could not find a finite squeeze (alpha <= 0)
    degenerate: bool = False

    def bound(self) -> float:
        """
        a^2 + 1/a^2: separable states never go below this
        """
        return self.weight_a ** 2 + 1 / self.weight_a ** 2


def assemble_matrix(V: TwoModeCovariance) -> np.ndarray:
    """
    the complex 4x4 matrix in the (a1, a1^dagger, a2, a2^dagger) layout:

        n1+1/2  m1      ms      mc
        m1*     n1+1/2  mc*     ms*
        ms*     mc      n2+1/2  m2
        mc*     ms      m2*     n2+1/2
    """
    m1, m2, mc, ms = (complex(z) for z in (V.m1, V.m2, V.mc, V.ms))
    a1 = V.n1 + 0.5
    a2 = V.n2 + 0.5
    return np.array([[a1, m1, ms, mc],
                     [m1.conjugate(), a1, mc.conjugate(), ms.conjugate()],
                     [ms.conjugate(), mc, a2, m2],
                     [mc.conjugate(), ms, m2.conjugate(), a2]], dtype=complex)


def to_quadrature(V: TwoModeCovariance) -> np.ndarray:
    """
    the real symmetric covariance matrix in the ordered basis (x1, p1, x2, p2); the vacuum is identity/2.  No
    physicality check here.
    """
    m1, m2, mc, ms = (complex(z) for z in (V.m1, V.m2, V.mc, V.ms))
    x1x1 = V.n1 + 0.5 - m1.real
    p1p1 = V.n1 + 0.5 + m1.real
    x1p1 = -m1.imag
    x2x2 = V.n2 + 0.5 - m2.real
    p2p2 = V.n2 + 0.5 + m2.real
    x2p2 = -m2.imag
    x1x2 = mc.real - ms.real
    p1p2 = -(mc.real + ms.real)
    x1p2 = mc.imag + ms.imag
    p1x2 = mc.imag - ms.imag
    return np.array([[x1x1, x1p1, x1x2, x1p2],
                     [x1p1, p1p1, p1x2, p1p2],
                     [x1x2, p1x2, x2x2, x2p2],
                     [x1p2, p1p2, x2p2, p2p2]], dtype=float)


def simon_invariants(V: TwoModeCovariance) -> SimonInvariants:
    matrix = assemble_matrix(V)
    V1 = matrix[:2, :2]
    V2 = matrix[2:, 2:]
    C = matrix[:2, 2:]
    I4 = np.trace(V1 @ _Z @ C @ _Z @ V2 @ _Z @ C.conj().T @ _Z)
    return SimonInvariants(I1=float(np.linalg.det(V1).real), I2=float(np.linalg.det(V2).real),
                           I3=float(np.linalg.det(C).real), I4=float(I4.real))


def simon_S(V: TwoModeCovariance) -> float:
    """
    separable iff S >= 0
    """
    I1, I2, I3, I4 = simon_invariants(V)
    return I1 * I2 + (0.25 - abs(I3)) ** 2 - I4 - 0.25 * (I1 + I2)


def symplectic_eigenvalues(V: TwoModeCovariance, *, partial_transpose: bool = False) -> Tuple[float, float]:
    """
    :returns (nu_minus, nu_plus), the moduli of the eigenvalues of i Omega V_q, with p2 -> -p2 first when
    partial_transpose is set
    """
    Vq = to_quadrature(V)
    if partial_transpose:
        Vq = _PARTIAL_TRANSPOSE @ Vq @ _PARTIAL_TRANSPOSE
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ Vq)))
    # the moduli come in equal pairs
    return float(moduli[0]), float(moduli[2])


def is_physical(V: TwoModeCovariance, *, tol: float = 1e-8) -> bool:
    assert tol >= 0, f'expected a non-negative tolerance: {tol}'
    # an indefinite V_q can still have large symplectic moduli, so positivity is checked first
    if np.linalg.eigvalsh(to_quadrature(V))[0] <= 0:
        return False
    nu_minus, _ = symplectic_eigenvalues(V)
    return nu_minus >= 0.5 - tol


def assert_physical(V: TwoModeCovariance, *, tol: float = 1e-8) -> None:
    if not is_physical(V, tol=tol):
        raise NonPhysicalStateError(f'expected a physical covariance matrix (symplectic eigenvalues >= 1/2): {V}')


def is_separable(V: TwoModeCovariance, *, tol: float = 1e-8) -> bool:
    assert_physical(V, tol=tol)
    return simon_S(V) >= 0


def is_symmetric(V: TwoModeCovariance, *, rel_tol: float = SYMMETRY_REL_TOL) -> bool:
    invariants = simon_invariants(V)
    return abs(invariants.I1 - invariants.I2) <= rel_tol * max(invariants.I1, invariants.I2)


def in_real_symmetric_family(V: TwoModeCovariance, *, tol: float = 1e-12) -> bool:
    """
    n1 = n2, m1 = m2 real, mc real and ms = 0
    """
    return (abs(V.n1 - V.n2) <= tol and abs(V.m1 - V.m2) <= tol and abs(complex(V.m1).imag) <= tol
            and abs(complex(V.mc).imag) <= tol and abs(V.ms) <= tol)


def eof_from_x(x: float) -> float:
    """
    f(x) = c+ log2 c+ - c- log2 c- with c+- = (x^{-1/2} +- x^{1/2})^2 / 4; zero for x >= 1
    """
    if x >= 1:
        return 0.0
    x = max(x, EOF_X_MIN)
    c_plus = (x ** -0.5 + x ** 0.5) ** 2 / 4
    c_minus = (x ** -0.5 - x ** 0.5) ** 2 / 4
    return c_plus * math.log2(c_plus) - c_minus * math.log2(c_minus)


def eof_symmetric(V: TwoModeCovariance, *, tol: float = 1e-8) -> float:
    """
    entanglement of formation (bits) of a symmetric two-mode state
    """
    assert_physical(V, tol=tol)
    I1, I2, I3, I4 = simon_invariants(V)
    if abs(I1 - I2) > SYMMETRY_REL_TOL * max(I1, I2):
        raise AsymmetricStateError(f'expected a symmetric state (I1 == I2), use log_negativity instead: I1={I1}, '
                                   f'I2={I2}')
    inner = I1 + abs(I3) - math.sqrt(max(I4 + 2 * I1 * abs(I3), 0.0))
    x = 2 * math.sqrt(max(inner, 0.0))
    return eof_from_x(x)


def log_negativity(V: TwoModeCovariance, *, tol: float = 1e-8) -> float:
    """
    max(0, -log2(2 nu~_minus)) in bits
    """
    assert_physical(V, tol=tol)
    nu_minus, _ = symplectic_eigenvalues(V, partial_transpose=True)
    return max(0.0, -math.log2(2 * nu_minus))


def dgcz_margin(V: TwoModeCovariance) -> float:
    """
    (n + 1/2 - |mc|)^2 - m^2 - 1/4 on the real symmetric family; negative exactly where the state is entangled
    """
    if not in_real_symmetric_family(V):
        raise NotInFamilyError(f'expected n1=n2, m1=m2 real, mc real, ms=0: {V}')
    return (V.n1 + 0.5 - abs(complex(V.mc).real)) ** 2 - complex(V.m1).real ** 2 - 0.25


def epr_variance_sum(V: TwoModeCovariance, pair: EprPair) -> float:
    """
    <du^2> + <dv^2> for u = |a| Q1 + Q2/a, v = |a| P1 - P2/a where Q = r' x_theta and P = p_theta/r'; below
    pair.bound() only for entangled states
    """
    a = pair.weight_a
    assert a != 0, f'expected a non-zero weight'
    assert pair.local_squeeze > 0, f'expected a positive local squeeze: {pair.local_squeeze}'
    s = pair.local_squeeze
    cos = math.cos(pair.rotation_angle)
    sin = math.sin(pair.rotation_angle)
    # x_theta = x cos + p sin, p_theta = -x sin + p cos
    u = np.array([abs(a) * s * cos, abs(a) * s * sin, s * cos / a, s * sin / a])
    v = np.array([-abs(a) * sin / s, abs(a) * cos / s, sin / (a * s), -cos / (a * s)])
    Vq = to_quadrature(V)
    return float(u @ Vq @ u + v @ Vq @ v)


def optimal_epr_squeeze(V: TwoModeCovariance, *, tol: float = 1e-8) -> EprPair:
    """
    The pair minimizing epr_variance_sum for a state of the real symmetric family.  With alpha = 2(n+1/2-m-|mc|) and
    beta = 2(n+1/2+m-|mc|) the sum is alpha r'^2 + beta/r'^2, so r'^4 = beta/alpha and the minimum is
    2 sqrt(alpha beta).
    """
    if not in_real_symmetric_family(V):
        raise NotInFamilyError(f'expected n1=n2, m1=m2 real, mc real, ms=0: {V}')
    assert_physical(V, tol=tol)
    n = V.n1
    m = complex(V.m1).real
    mc = complex(V.mc).real
    # u = Q1 - Q2 squeezes a state with mc > 0
    a = -1.0 if mc > 0 else 1.0
    alpha = 2 * (n + 0.5 - m - abs(mc))
    beta = 2 * (n + 0.5 + m - abs(mc))
    if alpha <= 0 or beta <= 0:
        LOGGER.warning(f'no finite optimal local squeeze: alpha={alpha}, beta={beta}')
        return EprPair(weight_a=a, local_squeeze=1.0, degenerate=True)
    return EprPair(weight_a=a, local_squeeze=(beta / alpha) ** 0.25)


def optimal_epr_sum(V: TwoModeCovariance) -> float:
    return epr_variance_sum(V, optimal_epr_squeeze(V))
