"""
Irreducible components of (1)^{⊗l}
Multiplicities, the spherical projectors P_l and the irrep matrices they induce
"""

import math
import numpy as np
from numba import njit
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple
from config.settings import SO3_CONFIG
from so3rep.rotations import Rotation, apply_per_axis
from utils.errors import BasisConventionError, InvalidType
from utils.logger import get_logger

logger = get_logger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Projector:
    """Isometry (1)^{⊗l} -> (l); p has shape [2l+1, 3, ..., 3]"""
    l: int
    p: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.p.reshape(2 * self.l + 1, -1)


@dataclass(frozen=True)
class IrrepMatrix:
    l: int
    d: np.ndarray


def _check_type(l: int, cap: int) -> None:
    if not isinstance(l, (int, np.integer)) or l < 0:
        raise InvalidType(f"type must be a non-negative integer, got {l!r}")
    if l > cap:
        raise InvalidType(f"type {l} exceeds the supported maximum {cap}")


def multiplicity(l: int, s: int) -> int:
    """
    Number of copies of (s) in (1)^{⊗l}

    Counts L_z eigenspace dimensions:
    d_{l,s} = sum_{i=s}^{⌊(s+l)/2⌋} l!/(i!(s+l-2i)!(i-s)!)
            - sum_{i=s+1}^{⌊(s+l+1)/2⌋} l!/(i!(s+l+1-2i)!(i-s-1)!)

    Raises:
        InvalidType: s outside 0..l
    """
    if l < 0 or s < 0 or s > l:
        raise InvalidType(f"multiplicity needs 0 <= s <= l, got l={l}, s={s}")
    fact = math.factorial
    first = sum(
        fact(l) // (fact(i) * fact(s + l - 2 * i) * fact(i - s))
        for i in range(s, (s + l) // 2 + 1)
    )
    second = sum(
        fact(l) // (fact(i) * fact(s + l + 1 - 2 * i) * fact(i - s - 1))
        for i in range(s + 1, (s + l + 1) // 2 + 1)
    )
    return first - second


def decompose(l: int) -> List[Tuple[int, int]]:
    """(type, multiplicity) pairs of (1)^{⊗l}, highest type first, zero counts dropped"""
    if l == 0:
        return [(0, 1)]
    out = [(s, multiplicity(l, s)) for s in range(l, -1, -1)]
    return [(s, d) for s, d in out if d > 0]


def lowering_op(l: int) -> np.ndarray:
    """
    Matrix of L_- on |m>, m ordered l..-l

    L_-|m> = sqrt((l+m)(l-m+1)) |m-1>, so the entries sit on the subdiagonal.
    """
    if l < 0:
        raise InvalidType(f"type must be non-negative, got {l}")
    n = 2 * l + 1
    out = np.zeros((n, n))
    for k in range(n - 1):
        m = l - k
        out[k + 1, k] = math.sqrt((l + m) * (l - m + 1))
    return out


def spherical_unitary() -> np.ndarray:
    """
    Rows conj(<s|) for s = +1, 0, -1 so that S @ x gives spherical components

    |+1> = -(e_x + i e_y)/sqrt(2), |0> = e_z, |-1> = (e_x - i e_y)/sqrt(2)
    """
    return np.array([
        [-SQRT_HALF, 1j * SQRT_HALF, 0.0],
        [0.0, 0.0, 1.0],
        [SQRT_HALF, 1j * SQRT_HALF, 0.0],
    ], dtype=np.complex128)


def real_basis_unitary(l: int) -> np.ndarray:
    """
    Unitary taking |m> components (m = l..-l) to real components

    Row order: cos_1, sin_1, ..., cos_l, sin_l, then m = 0. With this order the
    l = 1 real basis is exactly (x, y, z).
    """
    n = 2 * l + 1
    u = np.zeros((n, n), dtype=np.complex128)
    for m in range(1, l + 1):
        sign = (-1) ** m
        cos_row, sin_row = 2 * (m - 1), 2 * (m - 1) + 1
        u[cos_row, l - m] = sign * SQRT_HALF
        u[cos_row, l + m] = SQRT_HALF
        u[sin_row, l - m] = sign * 1j * SQRT_HALF
        u[sin_row, l + m] = -1j * SQRT_HALF
    u[n - 1, l] = 1.0
    return u


@njit(cache=True)
def _complex_projector_numba(l: int, coeff: np.ndarray) -> np.ndarray:
    """
    Numba-optimized complex-basis projector

    Digits 0, 1, 2 of the flat index stand for s = +1, 0, -1; the entry at
    row l - sum(s) is coeff[row] / 2^{#(-1)}.
    """
    total = 3 ** l
    out = np.zeros((2 * l + 1, total), dtype=np.float64)
    for flat in range(total):
        rest = flat
        m = 0
        d = 0
        for _ in range(l):
            digit = rest % 3
            rest //= 3
            if digit == 0:
                m += 1
            elif digit == 2:
                m -= 1
                d += 1
        row = l - m
        out[row, flat] = coeff[row] / (2.0 ** d)
    return out


def complex_projector(l: int) -> np.ndarray:
    """
    Projector (1)^{⊗l} -> (l) in the |m> and |s_1..s_l> bases, shape [2l+1, 3^l]

    (P_l)^{(s)}_m = 2^{-d(s)} sqrt((l-m)!(l+m)! 2^{l-m} / (2l)!) δ_{Σs, m}
    """
    _check_type(l, SO3_CONFIG['projector_max_l'])
    fact = math.factorial
    coeff = np.array([
        math.sqrt(fact(l - m) * fact(l + m) * 2 ** (l - m) / fact(2 * l))
        for m in range(l, -l - 1, -1)
    ])
    return _complex_projector_numba(l, coeff)


@lru_cache(maxsize=None)
def projector(l: int) -> Projector:
    """
    Real-basis spherical projector P_l

    Built as U_l · P_l^c · S^{⊗l}; S is applied axis by axis.

    Args:
        l: Irrep type, 0 <= l <= SO3_CONFIG['projector_max_l']

    Returns:
        Projector: Read-only tensor of shape [2l+1, 3, ..., 3] with P Pᵀ = I

    Raises:
        InvalidType: l out of range
        BasisConventionError: the imaginary residual exceeds SO3_CONFIG['imag_tol']
    """
    _check_type(l, SO3_CONFIG['projector_max_l'])
    pc = complex_projector(l).reshape((2 * l + 1,) + (3,) * l).astype(np.complex128)
    s_t = spherical_unitary().T
    p = apply_per_axis(pc, [real_basis_unitary(l)] + [s_t] * l)

    residual = float(np.max(np.abs(p.imag))) if p.size else 0.0
    if residual > SO3_CONFIG['imag_tol']:
        raise BasisConventionError(f"P_{l} keeps an imaginary part of {residual:.3e}")

    real = np.ascontiguousarray(p.real, dtype=np.float64)
    real.setflags(write=False)
    logger.debug(f"Built projector P_{l} with shape {real.shape}")
    return Projector(l, real)


def irrep_matrix(r: Rotation, l: int) -> IrrepMatrix:
    """
    D^l(R) = P_l · R^{⊗l} · P_lᵀ

    Args:
        r: Rotation
        l: Irrep type

    Returns:
        IrrepMatrix: Orthogonal (2l+1)x(2l+1) matrix
    """
    proj = projector(l)
    if l == 0:
        return IrrepMatrix(0, np.ones((1, 1)))
    rotated = apply_per_axis(proj.p, [None] + [r.m] * l).reshape(2 * l + 1, -1)
    return IrrepMatrix(l, proj.matrix @ rotated.T)


def rotate_spherical(r: Rotation, x: np.ndarray, l: int) -> np.ndarray:
    """Act with D^l(R) on a type-l vector"""
    return irrep_matrix(r, l).d @ np.asarray(x, dtype=np.float64)
