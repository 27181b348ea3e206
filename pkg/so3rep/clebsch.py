"""
Clebsch-Gordan tensors and the orthogonal couplings built from them
"""

import numpy as np
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple
from scipy.linalg import null_space
from config.settings import SO3_CONFIG
from so3rep.projectors import decompose, irrep_matrix, multiplicity
from so3rep.rotations import random_rotations
from utils.errors import BasisConventionError, InvalidType
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class CGTensor:
    la: int
    lb: int
    lc: int
    c: np.ndarray
    allowed: bool


def triangle(la: int, lb: int, lc: int) -> bool:
    return abs(la - lb) <= lc <= la + lb


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Make the first entry above sign_tol positive"""
    for value in v:
        if abs(value) > SO3_CONFIG['sign_tol']:
            return v if value > 0 else -v
    return v


@lru_cache(maxsize=None)
def cg(la: int, lb: int, lc: int) -> CGTensor:
    """
    Real-basis Clebsch-Gordan tensor for (la) ⊗ (lb) -> (lc)

    The tensor spans the null space of (D^la ⊗ D^lb ⊗ D^lc - I) stacked over a
    few fixed rotations. It is normalized so that sum C² = 2lc+1, which makes
    the map a ⊗ b -> c an isometry onto (lc).

    Args:
        la, lb, lc: Irrep types

    Returns:
        CGTensor: Read-only tensor of shape [2la+1, 2lb+1, 2lc+1]; zero with
            allowed=False when the triangle inequality fails

    Raises:
        InvalidType: a negative type
        BasisConventionError: the invariant space is not one-dimensional
    """
    for l in (la, lb, lc):
        if l < 0:
            raise InvalidType(f"types must be non-negative, got ({la}, {lb}, {lc})")
    shape = (2 * la + 1, 2 * lb + 1, 2 * lc + 1)

    if not triangle(la, lb, lc):
        c = np.zeros(shape)
        c.setflags(write=False)
        return CGTensor(la, lb, lc, c, False)

    n = shape[0] * shape[1] * shape[2]
    blocks = []
    for r in random_rotations(SO3_CONFIG['cg_probe_rotations'], SO3_CONFIG['cg_seed']):
        da = irrep_matrix(r, la).d
        db = irrep_matrix(r, lb).d
        dc = irrep_matrix(r, lc).d
        blocks.append(np.kron(np.kron(da, db), dc) - np.eye(n))
    kernel = null_space(np.vstack(blocks), rcond=SO3_CONFIG['null_space_rcond'])

    if kernel.shape[1] != 1:
        raise BasisConventionError(
            f"invariant space of ({la},{lb},{lc}) has dimension {kernel.shape[1]}, expected 1"
        )
    v = _fix_sign(kernel[:, 0])
    c = (v * np.sqrt(2 * lc + 1) / np.linalg.norm(v)).reshape(shape)
    c.setflags(write=False)
    logger.debug(f"Built CG({la},{lb},{lc})")
    return CGTensor(la, lb, lc, c, True)


@lru_cache(maxsize=None)
def coupling_Q(l: int) -> np.ndarray:
    """
    Orthogonal matrix of (l) ⊗ (1) -> (l+1) ⊕ (l) ⊕ (l-1)

    Rows are indexed by (a, b) flattened as a*3 + b; columns come in blocks
    of type l+1, l, l-1.
    """
    if l < 1:
        raise InvalidType(f"coupling_Q needs l >= 1, got {l}")
    n = 3 * (2 * l + 1)
    columns = [cg(l, 1, big).c.reshape(n, 2 * big + 1) for big in (l + 1, l, l - 1)]
    q = np.hstack(columns)
    q.setflags(write=False)
    return q


def _couple_block(t: int, rows: np.ndarray) -> List[Tuple[int, np.ndarray]]:
    """Split (t) ⊗ (1) rows into irreducible row blocks"""
    if t == 0:
        return [(1, rows)]
    coupled = coupling_Q(t).T @ rows
    sizes = [2 * (t + 1) + 1, 2 * t + 1, 2 * (t - 1) + 1]
    out = []
    start = 0
    for big, size in zip((t + 1, t, t - 1), sizes):
        out.append((big, coupled[start:start + size]))
        start += size
    return out


@lru_cache(maxsize=None)
def _change_of_basis(l: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
    if l == 0:
        return np.ones((1, 1)), (0,)
    if l == 1:
        return np.eye(3), (1,)

    prev, prev_types = _change_of_basis(l - 1)
    lifted = np.kron(prev, np.eye(3))
    blocks = []
    start = 0
    for t in prev_types:
        size = 3 * (2 * t + 1)
        blocks.extend(_couple_block(t, lifted[start:start + size]))
        start += size

    # stable: within a type, blocks keep their order of appearance
    blocks.sort(key=lambda item: -item[0])
    o = np.vstack([rows for _, rows in blocks])
    types = tuple(t for t, _ in blocks)
    o.setflags(write=False)
    return o, types


def change_of_basis_O(l: int) -> np.ndarray:
    """
    Orthogonal matrix of (1)^{⊗l} -> ⊕_s (s)^{d_{l,s}}

    O_1 = I and O_{l+1} applies Q_{t}ᵀ to every (t) ⊗ (1) block of O_l ⊗ I_3.
    Rows are grouped by type, highest first; columns index the flattened
    Cartesian tensor.

    Raises:
        InvalidType: l outside 0..SO3_CONFIG['basis_max_l']
    """
    if l < 0 or l > SO3_CONFIG['basis_max_l']:
        raise InvalidType(f"change of basis supports 0 <= l <= {SO3_CONFIG['basis_max_l']}, got {l}")
    return _change_of_basis(l)[0]


def basis_blocks(l: int) -> List[Tuple[int, int]]:
    """(type, first row) of each irreducible row block of change_of_basis_O(l)"""
    change_of_basis_O(l)
    out = []
    start = 0
    for t in _change_of_basis(l)[1]:
        out.append((t, start))
        start += 2 * t + 1
    return out


def sum_rank(types: Sequence[int]) -> int:
    """
    Smallest r whose (1)^{⊗r} holds every requested irrep copy

    Raises:
        InvalidType: no r up to SO3_CONFIG['basis_max_l'] works
    """
    types = list(types)
    if not types or min(types) < 0:
        raise InvalidType(f"direct sum needs non-negative types, got {types}")
    needed = {t: types.count(t) for t in set(types)}
    for r in range(max(types), SO3_CONFIG['basis_max_l'] + 1):
        available = dict(decompose(r))
        if all(available.get(t, 0) >= c for t, c in needed.items()):
            return r
    raise InvalidType(f"direct sum {types} does not fit in (1)^{{⊗r}} for r <= {SO3_CONFIG['basis_max_l']}")


@lru_cache(maxsize=None)
def _sum_projector(types: Tuple[int, ...], r: int) -> np.ndarray:
    o = change_of_basis_O(r)
    free = {}
    for t, start in basis_blocks(r):
        free.setdefault(t, []).append(start)
    rows = []
    for t in types:
        if not free.get(t):
            raise InvalidType(f"(1)^{{⊗{r}}} holds only {multiplicity(r, t) if t <= r else 0} copies of ({t})")
        start = free[t].pop(0)
        rows.append(o[start:start + 2 * t + 1])
    p = np.vstack(rows).reshape((sum(2 * t + 1 for t in types),) + (3,) * r)
    p.setflags(write=False)
    return p


def sum_projector(types: Sequence[int], rank: Optional[int] = None) -> np.ndarray:
    """
    Isometry (1)^{⊗r} -> (l1) ⊕ (l2) ⊕ ... for a direct-sum input

    Takes the first unused row block of each requested type from O_r.

    Args:
        types: Irrep types in the order of the direct sum
        rank: Tensor power r (defaults to sum_rank(types))

    Returns:
        np.ndarray: Shape [sum(2l_i+1), 3, ..., 3] with r trailing axes
    """
    types = tuple(int(t) for t in types)
    r = sum_rank(types) if rank is None else int(rank)
    return _sum_projector(types, r)
