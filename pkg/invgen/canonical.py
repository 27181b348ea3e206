"""
Canonical keys for tensor networks
Weisfeiler-Lehman colour refinement, then a bounded search over orderings
of equally coloured nodes
"""

import hashlib
import itertools
import math
from typing import Dict, List, Tuple
from config.settings import ENUMERATION_CONFIG
from tncore.network import DELTA, EPSILON, INPUT, PROJECTOR, Node, TensorNetwork
from utils.logger import get_logger

logger = get_logger(__name__)

# legs of one node that may be swapped without changing the value (up to sign);
# direct-sum projector legs are not, since their rows mix symmetry classes
INTERCHANGEABLE = '*'


def node_label(node: Node) -> str:
    """Initial colour; copies of one slot share a colour"""
    if node.kind == INPUT:
        return f"in:{node.slot}"
    if node.kind == PROJECTOR:
        if node.types is None:
            return f"proj:{node.l}"
        return f"proj:{node.l}:" + '+'.join(str(t) for t in node.types)
    return {DELTA: 'delta', EPSILON: 'eps'}[node.kind]


def leg_label(node: Node, leg: int) -> str:
    if node.kind in (DELTA, EPSILON):
        return INTERCHANGEABLE
    if node.kind == PROJECTOR and leg > 0 and node.types is None:
        return INTERCHANGEABLE
    return str(leg)


def _digest(text: str) -> str:
    return hashlib.sha1(text.encode('utf-8')).hexdigest()[:16]


def refine_colours(net: TensorNetwork, rounds: int = None) -> List[str]:
    """
    Iterated neighbourhood colouring

    Each round a node's colour becomes the hash of its colour and the sorted
    multiset of (own leg label, partner leg label, partner colour); open legs
    contribute their position.
    """
    rounds = ENUMERATION_CONFIG['refinement_rounds'] if rounds is None else rounds
    colours = [node_label(n) for n in net.nodes]
    incident: Dict[int, List[Tuple]] = {i: [] for i in range(len(net.nodes))}
    for a, b in net.edges:
        incident[a[0]].append((a[1], b))
        incident[b[0]].append((b[1], a))
    open_marks: Dict[int, List[str]] = {i: [] for i in range(len(net.nodes))}
    for position, (n, leg) in enumerate(net.open):
        open_marks[n].append(f"open{position}@{leg_label(net.nodes[n], leg)}")

    for _ in range(rounds):
        updated = []
        for i, node in enumerate(net.nodes):
            neighbourhood = sorted(
                f"{leg_label(node, leg)}>{leg_label(net.nodes[p[0]], p[1])}:{colours[p[0]]}"
                for leg, p in incident[i]
            )
            updated.append(_digest(colours[i] + '|' + ','.join(neighbourhood + sorted(open_marks[i]))))
        if len(set(updated)) == len(set(colours)):
            colours = updated
            break
        colours = updated
    return colours


def _encode(net: TensorNetwork, order: List[int]) -> Tuple:
    """Network encoded with node i renamed to order.index(i)"""
    rank = {node: k for k, node in enumerate(order)}

    def endpoint(ep):
        return (rank[ep[0]], leg_label(net.nodes[ep[0]], ep[1]))

    labels = tuple(node_label(net.nodes[i]) for i in order)
    edges = tuple(sorted(tuple(sorted((endpoint(a), endpoint(b)))) for a, b in net.edges))
    open_legs = tuple(endpoint(ep) for ep in net.open)
    return labels, edges, open_legs


def canonical_key(net: TensorNetwork) -> bytes:
    """
    Isomorphism-invariant key

    Nodes are ordered by refined colour; ties inside a colour class are broken
    by trying every ordering of the class and keeping the smallest encoding.
    Past ENUMERATION_CONFIG['canonical_max_permutations'] candidates only the
    index order inside each class is used, so rare isomorphic pairs may keep
    distinct keys (numeric dedup still merges them).

    Args:
        net: Network, closed or open

    Returns:
        bytes: Key equal for relabelled copies of the same network
    """
    colours = refine_colours(net)
    classes: Dict[str, List[int]] = {}
    for i, c in enumerate(colours):
        classes.setdefault(c, []).append(i)
    ordered_classes = [classes[c] for c in sorted(classes, key=lambda c: (node_label(net.nodes[classes[c][0]]), c))]

    candidates = math.prod(math.factorial(len(members)) for members in ordered_classes)
    if candidates > ENUMERATION_CONFIG['canonical_max_permutations']:
        logger.debug(f"Canonical search capped: {candidates} orderings")
        best = _encode(net, [i for members in ordered_classes for i in members])
    else:
        best = None
        for choice in itertools.product(*(itertools.permutations(m) for m in ordered_classes)):
            encoded = _encode(net, [i for members in choice for i in members])
            if best is None or encoded < best:
                best = encoded
    return repr(best).encode('utf-8')
