"""
Monte-Carlo invariance and equivariance verification
"""

import numpy as np
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union
from config.env_loader import resolve_workers
from config.settings import PARALLEL_CONFIG, VERIFY_CONFIG
from equivar.basis import EquivariantBasis, evaluate_basis_element
from invgen.generators import GeneratorSet, evaluate_generator
from so3rep.rotations import random_rotations
from utils.logger import ProgressLogger, get_logger, CHECK, CROSS

logger = get_logger(__name__)


@dataclass
class VerificationReport:
    """
    Worst relative violation per item over all sampled rotations

    For a generator f the violation of one sample is
    |f(g·x) - f(x)| / (1 + |f(x)|); for a basis element t it is
    ||t(g·x) - g·t(x)|| / (1 + ||t(x)||).
    """
    kind: str
    signature: str
    degree: int
    rotations: int
    seed: int
    tolerance: float
    violations: List[float] = field(default_factory=list)
    out_rep: Optional[str] = None

    @property
    def max_violation(self) -> float:
        return max(self.violations) if self.violations else 0.0

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.violations)

    @property
    def failures(self) -> List[int]:
        return [j for j, v in enumerate(self.violations) if v > self.tolerance]

    def to_dict(self) -> dict:
        doc = {
            'kind': self.kind,
            'signature': self.signature,
            'degree': self.degree,
            'rotations': self.rotations,
            'seed': self.seed,
            'tolerance': self.tolerance,
            'violations': [float(v) for v in self.violations],
            'max_violation': float(self.max_violation),
            'failures': self.failures,
            'pass': self.passed,
        }
        if self.out_rep is not None:
            doc['out_rep'] = self.out_rep
        return doc


def _sweep(
    items: list,
    violation: Callable[[object], float],
    what: str,
    workers: Optional[int]
) -> List[float]:
    progress = ProgressLogger(len(items), f"Verifying {what}", logger)
    out: List[float] = []
    if len(items) < PARALLEL_CONFIG['sequential_below']:
        for item in items:
            out.append(violation(item))
            progress.update()
    else:
        with ThreadPoolExecutor(max_workers=resolve_workers(len(items), workers)) as executor:
            for v in executor.map(violation, items):
                out.append(v)
                progress.update()
    progress.complete()
    return out


def _samples(doc, rotations: int, seed: int):
    """One (rotation, binding) pair per sample, both drawn from the seed"""
    rng = np.random.default_rng(seed)
    rots = random_rotations(rotations, rng)
    binds = [doc.signature.random_bindings(rng) for _ in range(rotations)]
    return list(zip(rots, binds))


def verify_generator_set(
    gen_set: GeneratorSet,
    rotations: int = VERIFY_CONFIG['rotations'],
    tol: float = VERIFY_CONFIG['tolerance'],
    seed: int = VERIFY_CONFIG['seed'],
    workers: Optional[int] = None
) -> VerificationReport:
    """
    Check f(g·x) = f(x) for every generator on random rotations and inputs

    Raises:
        ValueError: rotations < 1
    """
    if rotations < 1:
        raise ValueError(f"need at least one rotation, got {rotations}")
    sig = gen_set.signature
    samples = [(r, b, sig.act(r, b)) for r, b in _samples(gen_set, rotations, seed)]

    def violation(g) -> float:
        worst = 0.0
        for _, bind, rotated in samples:
            f = evaluate_generator(g, bind)
            worst = max(worst, abs(evaluate_generator(g, rotated) - f) / (1.0 + abs(f)))
        return worst

    report = VerificationReport(
        'generator_set', str(sig), gen_set.max_degree, rotations, seed, tol,
        _sweep(list(gen_set.generators), violation, 'generators', workers),
    )
    _log_outcome(report)
    return report


def verify_basis(
    basis: EquivariantBasis,
    rotations: int = VERIFY_CONFIG['rotations'],
    tol: float = VERIFY_CONFIG['tolerance'],
    seed: int = VERIFY_CONFIG['seed'],
    workers: Optional[int] = None
) -> VerificationReport:
    """
    Check t(g·x) = g·t(x) for every basis element

    Raises:
        ValueError: rotations < 1
    """
    if rotations < 1:
        raise ValueError(f"need at least one rotation, got {rotations}")
    sig = basis.signature
    samples = [(r, b, sig.act(r, b)) for r, b in _samples(basis, rotations, seed)]

    def violation(e) -> float:
        worst = 0.0
        for r, bind, rotated in samples:
            t = evaluate_basis_element(e, bind)
            expected = basis.out_rep.act(r, t)
            gap = np.linalg.norm(evaluate_basis_element(e, rotated) - expected)
            worst = max(worst, float(gap / (1.0 + np.linalg.norm(t))))
        return worst

    report = VerificationReport(
        'equivariant_basis', str(sig), basis.max_degree, rotations, seed, tol,
        _sweep(list(basis.elements), violation, 'basis elements', workers),
        out_rep=str(basis.out_rep),
    )
    _log_outcome(report)
    return report


def verify(
    doc: Union[GeneratorSet, EquivariantBasis],
    rotations: int = VERIFY_CONFIG['rotations'],
    tol: float = VERIFY_CONFIG['tolerance'],
    seed: int = VERIFY_CONFIG['seed'],
    workers: Optional[int] = None
) -> VerificationReport:
    if isinstance(doc, EquivariantBasis):
        return verify_basis(doc, rotations, tol, seed, workers)
    return verify_generator_set(doc, rotations, tol, seed, workers)


def _log_outcome(report: VerificationReport) -> None:
    if report.passed:
        logger.info(f"{CHECK} {len(report.violations)} items pass, max violation {report.max_violation:.3e}")
    else:
        logger.warning(
            f"{CROSS} {len(report.failures)} of {len(report.violations)} items exceed "
            f"{report.tolerance:g} (max {report.max_violation:.3e})"
        )
