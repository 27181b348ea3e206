"""
Enumeration of connected tensor-network generators
Input copies are wired by delta edges (direct leg pairings), with one
Levi-Civita node exactly when the 3-extent leg count is odd
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
from config.env_loader import resolve_workers
from config.settings import ENUMERATION_CONFIG, PARALLEL_CONFIG
from invgen.canonical import canonical_key
from invgen.signature import Signature
from tncore.network import EPSILON, PROJECTOR, Node, TensorNetwork
from utils.errors import EnumerationTooLarge
from utils.logger import get_logger, ProgressLogger

logger = get_logger(__name__)

Endpoint = Tuple[int, int]


@dataclass(frozen=True)
class GeneratorNetwork:
    net: TensorNetwork
    degree: Tuple[int, ...]
    uses_epsilon: bool

    @property
    def total_degree(self) -> int:
        return sum(self.degree)


def copy_multisets(
    n_slots: int,
    max_degree: int,
    fixed: Optional[Dict[int, int]] = None,
    min_total: int = 1
) -> Iterator[Tuple[int, ...]]:
    """
    Copy-count vectors ordered by free degree, then lexicographically

    Free slots share a budget of max_degree copies; fixed slots always take
    their given count.
    """
    fixed = fixed or {}
    free = [i for i in range(n_slots) if i not in fixed]
    for total in range(0, max_degree + 1):
        batch = []
        for counts in itertools.product(range(total + 1), repeat=len(free)):
            if sum(counts) != total:
                continue
            degree = [0] * n_slots
            for i, c in zip(free, counts):
                degree[i] = c
            for i, c in fixed.items():
                degree[i] = c
            if sum(degree) >= min_total:
                batch.append(tuple(degree))
        yield from sorted(batch, reverse=True)


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def base_nodes(sig: Signature, degree: Sequence[int]) -> Tuple[List[Node], List[Tuple[Endpoint, Endpoint]], List[Endpoint]]:
    """
    Nodes for one copy multiset, projector wiring and the free 3-extent legs

    Returns:
        Tuple: (nodes, projector edges, free legs in node order)
    """
    nodes: List[Node] = []
    edges = []
    free: List[Endpoint] = []
    for slot_index, count in enumerate(degree):
        slot = sig[slot_index]
        for copy in range(count):
            nodes.append(Node.input(slot_index, copy))
            x = len(nodes) - 1
            if not slot.wrapped:
                free.extend((x, leg) for leg in range(slot.value))
                continue
            if slot.types is None:
                nodes.append(Node.projector(slot.value))
            else:
                nodes.append(Node.projector(slot.legs, slot.types))
            p = len(nodes) - 1
            edges.append(((x, 0), (p, 0)))
            free.extend((p, leg) for leg in range(1, slot.legs + 1))
    return nodes, edges, free


def perfect_matchings(legs: List[Endpoint], forbid) -> Iterator[List[Tuple[Endpoint, Endpoint]]]:
    """All pairings of legs, skipping pairs for which forbid(a, b) is true"""
    if not legs:
        yield []
        return
    first, rest = legs[0], legs[1:]
    for k, partner in enumerate(rest):
        if forbid(first, partner):
            continue
        remaining = rest[:k] + rest[k + 1:]
        for tail in perfect_matchings(remaining, forbid):
            yield [(first, partner)] + tail


def _networks_for_multiset(sig: Signature, degree: Tuple[int, ...], epsilon_budget: int) -> List[Tuple[bytes, GeneratorNetwork]]:
    nodes, fixed_edges, free = base_nodes(sig, degree)
    uses_epsilon = len(free) % 2 == 1
    if uses_epsilon:
        if epsilon_budget == 0:
            return []
        nodes.append(Node.epsilon())
        e = len(nodes) - 1
        free.extend((e, leg) for leg in range(3))

    count = double_factorial(len(free) - 1)
    if count > ENUMERATION_CONFIG['max_matchings_per_multiset']:
        raise EnumerationTooLarge(count, ENUMERATION_CONFIG['max_matchings_per_multiset'], 'matchings')

    def forbid(a: Endpoint, b: Endpoint) -> bool:
        # traceless on these legs; direct-sum projectors keep lower-type rows with traces
        if a[0] != b[0]:
            return False
        node = nodes[a[0]]
        return node.kind == EPSILON or (node.kind == PROJECTOR and node.types is None)

    found = {}
    for matching in perfect_matchings(free, forbid):
        net = TensorNetwork(tuple(nodes), tuple(fixed_edges) + tuple(matching), ())
        if not net.is_connected():
            continue
        key = canonical_key(net)
        if key not in found:
            found[key] = GeneratorNetwork(net, degree, uses_epsilon)
    return sorted(found.items())


def enumerate_candidates(
    sig: Signature,
    max_degree: int,
    epsilon_budget: int = 1,
    fixed: Optional[Dict[int, int]] = None,
    min_total: int = 1,
    workers: Optional[int] = None
) -> List[GeneratorNetwork]:
    """
    Connected closed networks up to isomorphism, before numeric dedup

    Args:
        sig: Input signature
        max_degree: Copy budget over the non-fixed slots
        epsilon_budget: 0 forbids the Levi-Civita node (odd multisets are skipped)
        fixed: Slot index to exact copy count
        min_total: Smallest total copy count
        workers: Thread count override

    Returns:
        List[GeneratorNetwork]: Ordered by degree, then multiset, then canonical key

    Raises:
        EnumerationTooLarge: a multiset or the total exceeds ENUMERATION_CONFIG caps
    """
    multisets = list(copy_multisets(len(sig), max_degree, fixed, min_total))
    progress = ProgressLogger(len(multisets), "Multiset enumeration", logger)
    results: Dict[Tuple[int, ...], List] = {}

    if len(multisets) < PARALLEL_CONFIG['sequential_below']:
        for degree in multisets:
            results[degree] = _networks_for_multiset(sig, degree, epsilon_budget)
            progress.update()
    else:
        with ThreadPoolExecutor(max_workers=resolve_workers(len(multisets), workers)) as executor:
            futures = {
                degree: executor.submit(_networks_for_multiset, sig, degree, epsilon_budget)
                for degree in multisets
            }
            for degree in multisets:
                results[degree] = futures[degree].result()
                progress.update()
    progress.complete()

    seen = set()
    out = []
    for degree in multisets:
        for key, gen in results[degree]:
            if key in seen:
                continue
            seen.add(key)
            out.append(gen)
    if len(out) > ENUMERATION_CONFIG['max_networks']:
        raise EnumerationTooLarge(len(out), ENUMERATION_CONFIG['max_networks'], 'networks')

    logger.info(f"Enumerated {len(out)} connected networks over {len(multisets)} copy multisets")
    return out
