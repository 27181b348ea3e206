"""
Synthetic hyperelastic data
Linear small-strain and Neo-Hookean first Piola-Kirchhoff stress laws
"""

import numpy as np
import pandas as pd
from numba import njit
from pathlib import Path
from typing import Tuple
from config.settings import EXPERIMENT_CONFIG
from utils.errors import NonPhysicalDeformation
from utils.logger import get_logger

logger = get_logger(__name__)

LAWS = ('neo_hookean', 'linear')


@njit(cache=True)
def _det3(f: np.ndarray) -> float:
    return (f[0, 0] * (f[1, 1] * f[2, 2] - f[1, 2] * f[2, 1])
            - f[0, 1] * (f[1, 0] * f[2, 2] - f[1, 2] * f[2, 0])
            + f[0, 2] * (f[1, 0] * f[2, 1] - f[1, 1] * f[2, 0]))


@njit(cache=True)
def _neo_hookean_batch_numba(F: np.ndarray, mu: float, lam: float) -> np.ndarray:
    """
    Numba-optimized Neo-Hookean stress for a batch of deformations

    P = mu (F Fᵀ - I) + lam log(det F) I; callers guarantee det F > 0
    """
    n = F.shape[0]
    out = np.empty((n, 3, 3), dtype=np.float64)
    for s in range(n):
        log_j = np.log(_det3(F[s]))
        for i in range(3):
            for j in range(3):
                acc = 0.0
                for k in range(3):
                    acc += F[s, i, k] * F[s, j, k]
                value = mu * acc
                if i == j:
                    value += lam * log_j - mu
                out[s, i, j] = value
    return out


@njit(cache=True)
def _linear_law_batch_numba(F: np.ndarray, mu: float, lam: float) -> np.ndarray:
    """
    Numba-optimized linear law: P = mu (F + Fᵀ - 2I) + lam (Tr F - 3) I
    """
    n = F.shape[0]
    out = np.empty((n, 3, 3), dtype=np.float64)
    for s in range(n):
        trace = F[s, 0, 0] + F[s, 1, 1] + F[s, 2, 2]
        for i in range(3):
            for j in range(3):
                value = mu * (F[s, i, j] + F[s, j, i])
                if i == j:
                    value += lam * (trace - 3.0) - 2.0 * mu
                out[s, i, j] = value
    return out


def _as_batch(F: np.ndarray) -> Tuple[np.ndarray, bool]:
    F = np.asarray(F, dtype=np.float64)
    single = F.ndim == 2
    return np.ascontiguousarray(F.reshape(-1, 3, 3)), single


def linear_law(F: np.ndarray, mu: float = 1.0, lam: float = 1.0) -> np.ndarray:
    """Small-strain law for one deformation (3x3) or a batch (N, 3, 3)"""
    batch, single = _as_batch(F)
    out = _linear_law_batch_numba(batch, float(mu), float(lam))
    return out[0] if single else out


def neo_hookean(F: np.ndarray, mu: float = 1.0, lam: float = 1.0) -> np.ndarray:
    """
    Neo-Hookean stress for one deformation (3x3) or a batch (N, 3, 3)

    Raises:
        NonPhysicalDeformation: some det F <= 0
    """
    batch, single = _as_batch(F)
    dets = np.linalg.det(batch)
    if np.any(dets <= 0):
        bad = int(np.argmin(dets))
        raise NonPhysicalDeformation(f"det F = {dets[bad]:.6g} at sample {bad}")
    out = _neo_hookean_batch_numba(batch, float(mu), float(lam))
    return out[0] if single else out


def stress(F: np.ndarray, law: str, mu: float, lam: float) -> np.ndarray:
    if law == 'neo_hookean':
        return neo_hookean(F, mu, lam)
    if law == 'linear':
        return linear_law(F, mu, lam)
    raise ValueError(f"unknown constitutive law {law!r}")


def sample_deformation(
    rng: np.random.Generator,
    amplitude: float = EXPERIMENT_CONFIG['amplitude'],
    det_floor: float = EXPERIMENT_CONFIG['det_floor']
) -> np.ndarray:
    """
    F = I + a N with N uniform in [-1, 1], redrawn until det F > det_floor
    """
    if not 0.0 < amplitude < 1.0:
        raise ValueError(f"amplitude must lie in (0, 1), got {amplitude}")
    while True:
        F = np.eye(3) + amplitude * rng.uniform(-1.0, 1.0, size=(3, 3))
        if np.linalg.det(F) > det_floor:
            return F


def sample_dataset(
    rng: np.random.Generator,
    n: int,
    amplitude: float = EXPERIMENT_CONFIG['amplitude'],
    law: str = EXPERIMENT_CONFIG['law'],
    mu: float = EXPERIMENT_CONFIG['mu'],
    lam: float = EXPERIMENT_CONFIG['lam'],
    det_floor: float = EXPERIMENT_CONFIG['det_floor']
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw n deformations and their exact stresses

    Returns:
        Tuple[np.ndarray, np.ndarray]: F and P, each of shape (n, 3, 3)
    """
    F = np.stack([sample_deformation(rng, amplitude, det_floor) for _ in range(n)]) if n else np.zeros((0, 3, 3))
    return F, stress(F, law, mu, lam)


def dataset_frame(F: np.ndarray, P: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        'F': [f.ravel().tolist() for f in F],
        'P': [p.ravel().tolist() for p in P],
    })


def dump_dataset_jsonl(path, F: np.ndarray, P: np.ndarray) -> Path:
    """Write one {"F": 9 reals, "P": 9 reals} object per line"""
    path = Path(path)
    dataset_frame(F, P).to_json(path, orient='records', lines=True, double_precision=15)
    logger.info(f"Wrote {len(F)} samples to {path}")
    return path


def load_dataset_jsonl(path) -> Tuple[np.ndarray, np.ndarray]:
    df = pd.read_json(path, orient='records', lines=True)
    F = np.array(df['F'].tolist(), dtype=np.float64).reshape(-1, 3, 3)
    P = np.array(df['P'].tolist(), dtype=np.float64).reshape(-1, 3, 3)
    return F, P
