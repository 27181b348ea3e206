"""
Invariant generator sets
Enumeration front end, numeric deduplication, evaluation and serialization
"""

import numpy as np
from numba import njit
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Union
from config.env_loader import resolve_workers
from config.settings import ENUMERATION_CONFIG, PARALLEL_CONFIG
from invgen.enumerate import GeneratorNetwork, enumerate_candidates
from invgen.signature import Signature, parse_signature
from so3rep.projectors import projector
from tncore.contraction import contract_network
from tncore.network import TensorNetwork, network_from_dict
from tncore.tensors import as_tensor
from utils.errors import InsufficientProbes, InvalidSignature, NetworkFormatError, ShapeMismatch
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GeneratorSet:
    signature: Signature
    max_degree: int
    generators: tuple = field(default_factory=tuple)
    seed: int = ENUMERATION_CONFIG['probe_seed']
    epsilon_budget: int = 1

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_dict(self) -> dict:
        return {
            'kind': 'generator_set',
            'signature': str(self.signature),
            'max_degree': self.max_degree,
            'seed': self.seed,
            'epsilon_budget': self.epsilon_budget,
            'generators': [
                dict(g.net.to_dict(), degree=list(g.degree), uses_epsilon=g.uses_epsilon)
                for g in self.generators
            ],
        }


def generator_set_from_dict(doc: dict) -> GeneratorSet:
    """
    Rebuild a GeneratorSet from its JSON document

    Raises:
        NetworkFormatError: missing fields or malformed networks
    """
    try:
        sig = parse_signature(doc['signature'])
        gens = tuple(
            GeneratorNetwork(
                network_from_dict(g),
                tuple(int(d) for d in g['degree']),
                bool(g['uses_epsilon']),
            )
            for g in doc['generators']
        )
        return GeneratorSet(
            sig, int(doc['max_degree']), gens,
            int(doc.get('seed', ENUMERATION_CONFIG['probe_seed'])),
            int(doc.get('epsilon_budget', 1)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise NetworkFormatError(f"malformed generator set document: {e}") from e


def evaluate_generator(g: Union[GeneratorNetwork, TensorNetwork], bind: Mapping[int, np.ndarray]) -> float:
    """
    Value of a closed generator network

    Args:
        g: Generator (or bare closed network)
        bind: Slot index to bound tensor

    Returns:
        float: The contracted scalar
    """
    net = g.net if isinstance(g, GeneratorNetwork) else g
    value = contract_network(net, bind)
    if value.ndim != 0:
        raise ShapeMismatch(f"generator has {value.ndim} open legs")
    return float(value)


def probe_bindings(sig: Signature, count: int, seed: int) -> List[Dict[int, np.ndarray]]:
    rng = np.random.default_rng(seed)
    return [sig.random_bindings(rng) for _ in range(count)]


def evaluate_on_probes(nets: Sequence[TensorNetwork], probes: Sequence[Mapping], workers: Optional[int] = None) -> np.ndarray:
    """
    Column j holds network j evaluated on every probe, outputs flattened

    Returns:
        np.ndarray: Shape (len(probes) * output size, len(nets))
    """
    def column(net: TensorNetwork) -> np.ndarray:
        return np.concatenate([contract_network(net, bind).ravel() for bind in probes])

    if len(nets) < PARALLEL_CONFIG['sequential_below']:
        columns = [column(net) for net in nets]
    else:
        with ThreadPoolExecutor(max_workers=resolve_workers(len(nets), workers)) as executor:
            columns = list(executor.map(column, nets))
    if not columns:
        return np.zeros((0, 0))
    return np.stack(columns, axis=1)


def independent_columns(matrix: np.ndarray, tol: float) -> List[int]:
    """
    Indices of a linearly independent subset, earlier columns first

    Modified Gram-Schmidt; a column is kept when its residual norm exceeds
    tol times the largest column norm.
    """
    if matrix.size == 0:
        return []
    scale = float(np.max(np.linalg.norm(matrix, axis=0)))
    if scale == 0.0:
        return []
    basis: List[np.ndarray] = []
    kept = []
    for j in range(matrix.shape[1]):
        v = matrix[:, j].astype(np.float64).copy()
        for q in basis:
            v -= (q @ v) * q
        norm = float(np.linalg.norm(v))
        if norm > tol * scale:
            basis.append(v / norm)
            kept.append(j)
    return kept


def dedup_numeric(
    gens: Union[GeneratorSet, Sequence[GeneratorNetwork]],
    sig: Signature,
    probe_count: Optional[int] = None,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    max_degree: Optional[int] = None
) -> GeneratorSet:
    """
    Keep generators whose probe evaluations are linearly independent

    Args:
        gens: Candidate generators in priority order (first listed wins)
        sig: Signature the probes are drawn for
        probe_count: Number of random bindings K
        tol: Relative residual threshold
        seed: Probe seed

    Returns:
        GeneratorSet: Surviving generators in their original order

    Raises:
        InsufficientProbes: K < 2 * len(gens)
    """
    gens = list(gens)
    probe_count = ENUMERATION_CONFIG['probe_count'] if probe_count is None else probe_count
    tol = ENUMERATION_CONFIG['dedup_tol'] if tol is None else tol
    seed = ENUMERATION_CONFIG['probe_seed'] if seed is None else seed
    if probe_count < 2 * len(gens):
        raise InsufficientProbes(f"{probe_count} probes for {len(gens)} generators (need {2 * len(gens)})")
    if max_degree is None:
        max_degree = max((g.total_degree for g in gens), default=0)

    probes = probe_bindings(sig, probe_count, seed)
    values = evaluate_on_probes([g.net for g in gens], probes)
    kept = [gens[j] for j in independent_columns(values, tol)]
    logger.info(f"Numeric dedup kept {len(kept)} of {len(gens)} generators ({probe_count} probes)")
    return GeneratorSet(sig, max_degree, tuple(kept), seed)


def enumerate_networks(
    sig: Signature,
    max_degree: int,
    epsilon_budget: int = 1,
    probe_count: Optional[int] = None,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None
) -> GeneratorSet:
    """
    Generators of the invariant ring up to a copy budget

    Spherical and direct-sum slots are wrapped by their projector, delta
    contractions are direct edges, and a single Levi-Civita node appears
    exactly when the leg count is odd.

    Args:
        sig: Input signature
        max_degree: Largest total number of input copies (D >= 1)
        epsilon_budget: 0 or 1
        probe_count: Probes for dedup (raised to 2 * candidates if smaller)
        tol: Dedup threshold
        seed: Probe seed
        workers: Thread count override

    Returns:
        GeneratorSet: Connected, canonicalized, linearly independent generators

    Raises:
        EnumerationTooLarge: an enumeration cap was exceeded
    """
    if max_degree < 1:
        raise InvalidSignature(f"max_degree must be at least 1, got {max_degree}")
    if epsilon_budget not in (0, 1):
        raise InvalidSignature(f"epsilon_budget must be 0 or 1, got {epsilon_budget}")

    candidates = enumerate_candidates(sig, max_degree, epsilon_budget, workers=workers)
    probe_count = ENUMERATION_CONFIG['probe_count'] if probe_count is None else probe_count
    probe_count = max(probe_count, 2 * len(candidates))
    result = dedup_numeric(candidates, sig, probe_count, tol, seed, max_degree)
    return GeneratorSet(sig, max_degree, result.generators, result.seed, epsilon_budget)


def wrap_spherical(x: np.ndarray, l: int) -> np.ndarray:
    """
    Lift a type-l vector to an l-axis Cartesian tensor through P_lᵀ

    Raises:
        ShapeMismatch: x does not have shape [2l+1]
    """
    x = as_tensor(x)
    if x.shape != (2 * l + 1,):
        raise ShapeMismatch(f"type-{l} vector must have shape ({2 * l + 1},), got {x.shape}")
    return np.tensordot(x, projector(l).p, axes=([0], [0]))


def span_dimensions(gen_set: GeneratorSet) -> Dict[int, int]:
    """Independent generators per total degree"""
    out = {d: 0 for d in range(1, gen_set.max_degree + 1)}
    for g in gen_set:
        out[g.total_degree] = out.get(g.total_degree, 0) + 1
    return out


def invariant_features(gen_set: GeneratorSet, bind: Mapping[int, np.ndarray]) -> np.ndarray:
    """Vector of generator values, the input of an invariant model q(g_1, ..., g_m)"""
    return np.array([evaluate_generator(g, bind) for g in gen_set], dtype=np.float64)


@njit(cache=True)
def _epsilon_pair_mismatches_numba() -> int:
    """
    Count index tuples where ε_ijk ε_lmn differs from its delta expansion

    Integer arithmetic over all 3^6 tuples.
    """
    mismatches = 0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e1 = (i - j) * (j - k) * (k - i) // 2
                for l in range(3):
                    for m in range(3):
                        for n in range(3):
                            e2 = (l - m) * (m - n) * (n - l) // 2
                            d_il = 1 if i == l else 0
                            d_im = 1 if i == m else 0
                            d_in = 1 if i == n else 0
                            d_jl = 1 if j == l else 0
                            d_jm = 1 if j == m else 0
                            d_jn = 1 if j == n else 0
                            d_kl = 1 if k == l else 0
                            d_km = 1 if k == m else 0
                            d_kn = 1 if k == n else 0
                            rhs = (d_il * (d_jm * d_kn - d_jn * d_km)
                                   - d_im * (d_jl * d_kn - d_jn * d_kl)
                                   + d_in * (d_jl * d_km - d_jm * d_kl))
                            if e1 * e2 != rhs:
                                mismatches += 1
    return mismatches


def epsilon_pair_reduce_check() -> bool:
    """
    ε_ijk ε_lmn equals the 3x3 determinant of deltas at every index tuple

    Two Levi-Civita nodes therefore always reduce to delta edges, so
    enumeration with at most one epsilon loses nothing.
    """
    mismatches = int(_epsilon_pair_mismatches_numba())
    if mismatches:
        logger.error(f"Levi-Civita pair identity fails at {mismatches} index tuples")
    return mismatches == 0


def epsilon_pair_terms(i: int, j: int, k: int, l: int, m: int, n: int) -> tuple:
    """Both sides of the pair identity at one index tuple"""
    eps = lambda a, b, c: (a - b) * (b - c) * (c - a) // 2
    d = lambda a, b: int(a == b)
    rhs = (d(i, l) * (d(j, m) * d(k, n) - d(j, n) * d(k, m))
           - d(i, m) * (d(j, l) * d(k, n) - d(j, n) * d(k, l))
           + d(i, n) * (d(j, l) * d(k, m) - d(j, m) * d(k, l)))
    return eps(i, j, k) * eps(l, m, n), rhs
