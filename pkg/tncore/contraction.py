"""
Tensor-network contraction engine
Pairwise contraction with a greedy smallest-intermediate order
"""

import numpy as np
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
from tncore.network import DELTA, EPSILON, INPUT, PROJECTOR, Node, TensorNetwork
from tncore.tensors import as_tensor, delta, epsilon
from utils.errors import MissingBinding, NetworkFormatError, ShapeMismatch
from utils.logger import get_logger

logger = get_logger(__name__)

Legs = Tuple[int, ...]


def node_tensor(node: Node, bind: Mapping[int, np.ndarray]) -> np.ndarray:
    """
    Dense tensor of a single node

    Args:
        node: Network node
        bind: Slot index to bound tensor

    Raises:
        MissingBinding: an input node's slot has no binding
    """
    if node.kind == INPUT:
        if node.slot not in bind:
            raise MissingBinding(f"no tensor bound to slot {node.slot}")
        return as_tensor(bind[node.slot])
    if node.kind == DELTA:
        return delta()
    if node.kind == EPSILON:
        return epsilon()
    if node.kind == PROJECTOR:
        # so3rep builds on tncore, so the import stays local
        from so3rep.clebsch import sum_projector
        from so3rep.projectors import projector
        if node.types is None:
            return projector(node.l).p
        return sum_projector(node.types, node.l)
    raise NetworkFormatError(f"unknown node kind {node.kind!r}")


def compute_size(legs: Sequence[int], sizes: Mapping[int, int]) -> int:
    """Number of entries of a tensor carrying these leg labels"""
    size = 1
    for ix in legs:
        size *= sizes[ix]
    return size


def compute_contracted(ilegs: Legs, jlegs: Legs) -> Tuple[Legs, List[int], List[int]]:
    """
    Result legs of contracting two terms plus the axes to sum over

    Returns:
        Tuple: (result legs, axes of i, axes of j)
    """
    shared = [ix for ix in ilegs if ix in jlegs]
    axes_i = [ilegs.index(ix) for ix in shared]
    axes_j = [jlegs.index(ix) for ix in shared]
    new_legs = tuple(ix for ix in ilegs if ix not in shared) + \
        tuple(ix for ix in jlegs if ix not in shared)
    return new_legs, axes_i, axes_j


def _trace_repeated(t: np.ndarray, legs: Legs) -> Tuple[np.ndarray, Legs]:
    """Trace out every label that appears twice on one tensor (self-edges)"""
    legs = list(legs)
    while True:
        repeated = next((ix for ix in legs if legs.count(ix) == 2), None)
        if repeated is None:
            return t, tuple(legs)
        i = legs.index(repeated)
        j = legs.index(repeated, i + 1)
        t = np.trace(t, axis1=i, axis2=j)
        legs = [ix for k, ix in enumerate(legs) if k not in (i, j)]


def label_legs(net: TensorNetwork, ranks: Sequence[int]) -> Tuple[List[Legs], Dict[int, int]]:
    """
    Give every edge a non-negative label and open leg k the label -(k+1)

    Args:
        net: Network to label
        ranks: Number of legs of each node

    Returns:
        Tuple: (leg labels per node, open label to output axis)
    """
    labels = [[None] * r for r in ranks]
    for e, (a, b) in enumerate(net.edges):
        for node, leg in (a, b):
            if leg >= ranks[node]:
                raise ShapeMismatch(f"node {node} has no leg {leg} (rank {ranks[node]})")
            labels[node][leg] = e
    output = {}
    for k, (node, leg) in enumerate(net.open):
        if leg >= ranks[node]:
            raise ShapeMismatch(f"node {node} has no leg {leg} (rank {ranks[node]})")
        labels[node][leg] = -(k + 1)
        output[-(k + 1)] = k
    for node, legs in enumerate(labels):
        if any(ix is None for ix in legs):
            raise NetworkFormatError(f"node {node} has a leg that is neither joined nor open")
    return [tuple(legs) for legs in labels], output


def _candidate_pairs(terms: Dict[int, Legs]) -> List[Tuple[int, int]]:
    ids = sorted(terms)
    pairs = []
    for a, i in enumerate(ids):
        for j in ids[a + 1:]:
            if any(ix in terms[j] for ix in terms[i] if ix >= 0):
                pairs.append((i, j))
    return pairs


def plan_contraction(
    terms: Dict[int, Legs],
    sizes: Mapping[int, int],
    order: str = 'greedy',
    rng: Optional[np.random.Generator] = None
) -> List[Tuple[int, int]]:
    """
    Choose the sequence of pairwise merges

    Greedy picks the connected pair whose result is smallest, ties broken by
    the lowest node ids; the merged term keeps id min(i, j). Disconnected
    components are joined by an outer product of the two lowest ids last.

    Args:
        terms: Term id to leg labels (after self-traces)
        sizes: Leg label to extent
        order: 'greedy' or 'random'
        rng: Generator for the random order

    Returns:
        List[Tuple[int, int]]: Pairs (i, j) with i < j in merge order
    """
    if order not in ('greedy', 'random'):
        raise ValueError(f"unknown contraction order {order!r}")
    if order == 'random' and rng is None:
        rng = np.random.default_rng()

    terms = dict(terms)
    path = []
    while len(terms) > 1:
        pairs = _candidate_pairs(terms)
        if not pairs:
            ids = sorted(terms)
            pairs = [(ids[0], ids[1])]
            if order == 'random':
                pick = rng.choice(len(ids), size=2, replace=False)
                pairs = [tuple(sorted(int(ids[p]) for p in pick))]

        if order == 'greedy':
            i, j = min(
                pairs,
                key=lambda p: (compute_size(compute_contracted(terms[p[0]], terms[p[1]])[0], sizes), p)
            )
        else:
            i, j = pairs[int(rng.integers(len(pairs)))]

        new_legs, _, _ = compute_contracted(terms[i], terms[j])
        del terms[j]
        terms[i] = new_legs
        path.append((i, j))
    return path


def _prepare(net: TensorNetwork, bind: Mapping[int, np.ndarray]):
    tensors = [node_tensor(node, bind) for node in net.nodes]
    slot_shapes = {
        node.slot: tensors[i].shape for i, node in enumerate(net.nodes) if node.kind == INPUT
    }
    for i, node in enumerate(net.nodes):
        if node.kind == INPUT and tensors[i].shape != slot_shapes[node.slot]:
            raise ShapeMismatch(f"slot {node.slot} is bound to inconsistent shapes")
    net.validate(slot_shapes)

    labels, output = label_legs(net, [t.ndim for t in tensors])
    sizes = {}
    for t, legs in zip(tensors, labels):
        for ix, extent in zip(legs, t.shape):
            if sizes.setdefault(ix, extent) != extent:
                raise ShapeMismatch(f"leg label {ix} joins extents {sizes[ix]} and {extent}")

    terms = {}
    arrays = {}
    for i, (t, legs) in enumerate(zip(tensors, labels)):
        arrays[i], terms[i] = _trace_repeated(t, legs)
    return arrays, terms, sizes, output


def contraction_path(
    net: TensorNetwork,
    bind: Mapping[int, np.ndarray],
    order: str = 'greedy',
    rng: Optional[np.random.Generator] = None
) -> List[Tuple[int, int]]:
    """Merge sequence contract_network would use for these bindings"""
    _, terms, sizes, _ = _prepare(net, bind)
    return plan_contraction(terms, sizes, order, rng)


def contract_network(
    net: TensorNetwork,
    bind: Mapping[int, np.ndarray],
    order: str = 'greedy',
    rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """
    Contract a tensor network to a single tensor

    Args:
        net: Network to evaluate
        bind: Slot index to bound tensor
        order: 'greedy' (smallest intermediate first) or 'random'
        rng: Generator for the random order

    Returns:
        np.ndarray: Tensor whose axes follow net.open; rank 0 for a closed network

    Raises:
        MissingBinding: an input slot has no binding
        ShapeMismatch: joined legs have different extents
    """
    if len(net.nodes) == 0:
        return np.ones((), dtype=np.float64)

    arrays, terms, sizes, output = _prepare(net, bind)
    path = plan_contraction(terms, sizes, order, rng)

    for i, j in path:
        new_legs, axes_i, axes_j = compute_contracted(terms[i], terms[j])
        arrays[i] = np.tensordot(arrays[i], arrays[j], axes=(axes_i, axes_j))
        terms[i] = new_legs
        del arrays[j], terms[j]

    (root,) = terms
    result, legs = arrays[root], terms[root]
    if legs:
        result = np.transpose(result, [legs.index(-(k + 1)) for k in range(len(output))])
    logger.debug(f"Contracted {len(net.nodes)} nodes in {len(path)} steps ({order})")
    return np.array(result, dtype=np.float64, order='C')
