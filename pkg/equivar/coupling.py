"""
Spherical tensor-product coupling
"""

import numpy as np
from dataclasses import dataclass
from config.settings import TNCORE_CONFIG
from so3rep.clebsch import cg, triangle
from tncore.contraction import contract_network
from tncore.network import Node, TensorNetwork
from tncore.tensors import as_tensor
from utils.errors import InvalidType, ProportionalityFailure, ShapeMismatch
from utils.logger import get_logger
from utils.validators import TensorValidator

logger = get_logger(__name__)

PROPORTIONALITY_TOL = 1e-9


@dataclass(frozen=True)
class CouplingResult:
    value: np.ndarray
    allowed: bool


def tp_couple(a: np.ndarray, la: int, b: np.ndarray, lb: int, lc: int) -> CouplingResult:
    """
    c_t = sum_rs C_rst a_r b_s with the normalized real CG tensor

    Args:
        a: Type-la vector
        b: Type-lb vector
        lc: Output type

    Returns:
        CouplingResult: Zero value with allowed=False when (la, lb, lc) fails
            the triangle inequality

    Raises:
        ShapeMismatch: a or b has the wrong length
    """
    a = as_tensor(a)
    b = as_tensor(b)
    for x, l, what in ((a, la, "a"), (b, lb, "b")):
        ok, message = TensorValidator.validate_shape(x, (2 * l + 1,), what)
        if not ok:
            raise ShapeMismatch(message)
    c = cg(la, lb, lc)
    if not c.allowed:
        return CouplingResult(np.zeros(2 * lc + 1), False)
    return CouplingResult(np.einsum('rst,r,s->t', c.c, a, b), True)


def triangle_network(la: int, lb: int, lc: int) -> TensorNetwork:
    """
    Three projectors joined pairwise by delta edges

    P_la and P_lb share (la+lb-lc)/2 edges, and cyclically for the other
    pairs. When la+lb+lc is odd a Levi-Civita node takes one leg of each
    projector first. Open legs are the three irrep legs in (a, b, c) order.

    Raises:
        InvalidType: the triple admits no such network
    """
    if not triangle(la, lb, lc):
        raise InvalidType(f"({la}, {lb}, {lc}) violates the triangle inequality")
    nodes = [Node.projector(la), Node.projector(lb), Node.projector(lc)]
    edges = []
    free = {0: list(range(1, la + 1)), 1: list(range(1, lb + 1)), 2: list(range(1, lc + 1))}

    odd = (la + lb + lc) % 2 == 1
    if odd:
        if min(la, lb, lc) == 0:
            raise InvalidType(f"odd triple ({la}, {lb}, {lc}) has no epsilon triangle")
        nodes.append(Node.epsilon())
        for leg, p in enumerate((0, 1, 2)):
            edges.append(((p, free[p].pop(0)), (3, leg)))

    ra, rb, rc = (len(free[p]) for p in (0, 1, 2))
    shared = {(0, 1): (ra + rb - rc) // 2, (1, 2): (rb + rc - ra) // 2, (2, 0): (rc + ra - rb) // 2}
    if any(n < 0 for n in shared.values()):
        raise InvalidType(f"({la}, {lb}, {lc}) has no triangle network")
    for (p, q), count in shared.items():
        for _ in range(count):
            edges.append(((p, free[p].pop(0)), (q, free[q].pop(0))))

    return TensorNetwork(tuple(nodes), tuple(edges), ((0, 0), (1, 0), (2, 0)))


def tp_network_equals_cg(la: int, lb: int, lc: int) -> float:
    """
    Proportionality factor between the projector triangle and the CG tensor

    Returns:
        float: κ with C' = κ C

    Raises:
        ProportionalityFailure: κ vanishes or C' - κC is not negligible
    """
    c_prime = contract_network(triangle_network(la, lb, lc), {})
    c = cg(la, lb, lc).c
    norm_prime = float(np.linalg.norm(c_prime))
    kappa = float(np.vdot(c_prime, c) / np.vdot(c, c))
    residual = float(np.linalg.norm(c_prime - kappa * c))

    if norm_prime <= TNCORE_CONFIG['relative_tol'] or abs(kappa) <= TNCORE_CONFIG['relative_tol']:
        raise ProportionalityFailure(f"triangle network for ({la}, {lb}, {lc}) vanishes")
    if residual > PROPORTIONALITY_TOL * norm_prime:
        raise ProportionalityFailure(
            f"triangle network for ({la}, {lb}, {lc}) is not proportional to CG "
            f"(residual {residual:.3e}, norm {norm_prime:.3e})"
        )
    logger.debug(f"Triangle ({la},{lb},{lc}): kappa = {kappa:.12f}")
    return kappa
