"""
Shared fixtures for the test suites
"""

import numpy as np
import pytest
from so3rep.rotations import random_rotations


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def rotations():
    return random_rotations(20, 2024)


def _naive_contract(a, b, pairs):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    free_a = [k for k in range(a.ndim) if k not in [p[0] for p in pairs]]
    free_b = [k for k in range(b.ndim) if k not in [p[1] for p in pairs]]
    out = np.zeros([a.shape[k] for k in free_a] + [b.shape[k] for k in free_b])
    summed = [a.shape[p[0]] for p in pairs]
    for out_idx in np.ndindex(*out.shape) if out.ndim else [()]:
        ia = dict(zip(free_a, out_idx[:len(free_a)]))
        ib = dict(zip(free_b, out_idx[len(free_a):]))
        total = 0.0
        for s in np.ndindex(*summed) if summed else [()]:
            for (pa, pb), v in zip(pairs, s):
                ia[pa] = v
                ib[pb] = v
            total += a[tuple(ia[k] for k in range(a.ndim))] * b[tuple(ib[k] for k in range(b.ndim))]
        out[out_idx] = total
    return out


@pytest.fixture
def naive_contract():
    """All-index nested-loop oracle for tncore.contract"""
    return _naive_contract

