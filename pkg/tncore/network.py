"""
Tensor-network graphs
Nodes are typed (input slot copies, delta, epsilon, projectors); legs are
joined by edges or left open in a fixed order
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
from utils.errors import InvalidNode, NetworkFormatError, ShapeMismatch

Endpoint = Tuple[int, int]
Edge = Tuple[Endpoint, Endpoint]

INPUT = 'input'
DELTA = 'delta'
EPSILON = 'epsilon'
PROJECTOR = 'projector'

NODE_KINDS = (INPUT, DELTA, EPSILON, PROJECTOR)


@dataclass(frozen=True)
class Node:
    """
    One tensor of a network

    For projectors, `l` is the number of 3-extent legs. A projector for a single
    irrep has `types=None` and leg 0 of extent 2l+1; a direct-sum projector
    lists its irrep types and leg 0 has extent sum(2t+1).
    """
    kind: str
    slot: Optional[int] = None
    copy: Optional[int] = None
    l: Optional[int] = None
    types: Optional[Tuple[int, ...]] = None

    @staticmethod
    def input(slot: int, copy: int = 0) -> 'Node':
        return Node(INPUT, slot=slot, copy=copy)

    @staticmethod
    def delta() -> 'Node':
        return Node(DELTA)

    @staticmethod
    def epsilon() -> 'Node':
        return Node(EPSILON)

    @staticmethod
    def projector(l: int, types: Optional[Sequence[int]] = None) -> 'Node':
        return Node(PROJECTOR, l=l, types=tuple(types) if types is not None else None)

    @property
    def irrep_dim(self) -> int:
        """Extent of leg 0 of a projector"""
        if self.types is None:
            return 2 * self.l + 1
        return sum(2 * t + 1 for t in self.types)

    def fixed_extents(self) -> Optional[Tuple[int, ...]]:
        """Leg extents known from the kind alone (None for inputs)"""
        if self.kind == DELTA:
            return (3, 3)
        if self.kind == EPSILON:
            return (3, 3, 3)
        if self.kind == PROJECTOR:
            return (self.irrep_dim,) + (3,) * self.l
        return None

    def to_dict(self) -> dict:
        if self.kind == INPUT:
            return {'kind': INPUT, 'slot': self.slot, 'copy': self.copy}
        if self.kind == PROJECTOR:
            out = {'kind': PROJECTOR, 'l': self.l}
            if self.types is not None:
                out['types'] = list(self.types)
            return out
        return {'kind': self.kind}

    def label(self) -> str:
        """Short human-readable label"""
        if self.kind == INPUT:
            return f"x{self.slot}"
        if self.kind == PROJECTOR:
            if self.types is None:
                return f"P{self.l}"
            return "P[" + "+".join(str(t) for t in self.types) + "]"
        return {'delta': 'δ', 'epsilon': 'ε'}[self.kind]


@dataclass(frozen=True)
class TensorNetwork:
    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...] = field(default_factory=tuple)
    open: Tuple[Endpoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'nodes', tuple(self.nodes))
        object.__setattr__(
            self, 'edges',
            tuple(((int(a[0]), int(a[1])), (int(b[0]), int(b[1]))) for a, b in self.edges)
        )
        object.__setattr__(self, 'open', tuple((int(n), int(l)) for n, l in self.open))

    @property
    def is_closed(self) -> bool:
        return len(self.open) == 0

    def _endpoints(self) -> List[Endpoint]:
        out = []
        for a, b in self.edges:
            out.append(a)
            out.append(b)
        out.extend(self.open)
        return out

    def input_nodes(self, slot: Optional[int] = None) -> List[int]:
        return [
            i for i, n in enumerate(self.nodes)
            if n.kind == INPUT and (slot is None or n.slot == slot)
        ]

    def count(self, kind: str) -> int:
        return sum(1 for n in self.nodes if n.kind == kind)

    def validate(self, slot_shapes: Optional[Dict[int, Tuple[int, ...]]] = None) -> None:
        """
        Check that every leg is used exactly once and joined legs agree in extent

        Args:
            slot_shapes: Shape of the tensor bound to each input slot; when
                omitted, input legs are only checked for single use

        Raises:
            NetworkFormatError: a leg is missing, repeated, or a node index is invalid
            ShapeMismatch: an edge joins legs of different extents
        """
        seen = {}
        for ep in self._endpoints():
            node, leg = ep
            if not 0 <= node < len(self.nodes):
                raise NetworkFormatError(f"endpoint {ep} references missing node")
            if ep in seen:
                raise NetworkFormatError(f"leg {ep} is used more than once")
            seen[ep] = True

        for i, node in enumerate(self.nodes):
            extents = self.leg_extents(i, slot_shapes)
            if extents is None:
                continue
            for leg in range(len(extents)):
                if (i, leg) not in seen:
                    raise NetworkFormatError(f"leg ({i}, {leg}) of {node.label()} is dangling")
            extra = [ep for ep in seen if ep[0] == i and ep[1] >= len(extents)]
            if extra:
                raise NetworkFormatError(f"node {i} ({node.label()}) has no leg {extra[0][1]}")

        for a, b in self.edges:
            ea = self._extent(a, slot_shapes)
            eb = self._extent(b, slot_shapes)
            if ea is not None and eb is not None and ea != eb:
                raise ShapeMismatch(f"edge {a}-{b} joins extents {ea} and {eb}")

    def leg_extents(self, node: int, slot_shapes=None) -> Optional[Tuple[int, ...]]:
        n = self.nodes[node]
        fixed = n.fixed_extents()
        if fixed is not None:
            return fixed
        if slot_shapes is not None and n.slot in slot_shapes:
            return tuple(slot_shapes[n.slot])
        return None

    def _extent(self, ep: Endpoint, slot_shapes) -> Optional[int]:
        extents = self.leg_extents(ep[0], slot_shapes)
        if extents is None or ep[1] >= len(extents):
            return None
        return extents[ep[1]]

    def is_connected(self) -> bool:
        """True when the edge graph joins every node into one component"""
        if len(self.nodes) <= 1:
            return True
        parent = list(range(len(self.nodes)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for (na, _), (nb, _) in self.edges:
            ra, rb = find(na), find(nb)
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(len(self.nodes))}) == 1

    def to_dict(self) -> dict:
        return {
            'nodes': [n.to_dict() for n in self.nodes],
            'edges': [[[a[0], a[1]], [b[0], b[1]]] for a, b in self.edges],
            'open': [[n, l] for n, l in self.open],
        }


def node_from_dict(doc: dict) -> Node:
    kind = doc.get('kind')
    if kind not in NODE_KINDS:
        raise NetworkFormatError(f"unknown node kind {kind!r}")
    try:
        if kind == INPUT:
            return Node.input(int(doc['slot']), int(doc.get('copy', 0)))
        if kind == PROJECTOR:
            types = doc.get('types')
            return Node.projector(int(doc['l']), [int(t) for t in types] if types is not None else None)
    except (KeyError, TypeError, ValueError) as e:
        raise NetworkFormatError(f"malformed {kind} node {doc}: {e}") from e
    return Node(kind)


def network_from_dict(doc: dict) -> TensorNetwork:
    """
    Parse the JSON interchange document of a network

    Raises:
        NetworkFormatError: the document does not follow the schema
    """
    if not isinstance(doc, dict) or 'nodes' not in doc:
        raise NetworkFormatError("network document must be an object with 'nodes'")
    try:
        nodes = [node_from_dict(n) for n in doc['nodes']]
        edges = [(tuple(e[0]), tuple(e[1])) for e in doc.get('edges', [])]
        open_legs = [tuple(o) for o in doc.get('open', [])]
        net = TensorNetwork(tuple(nodes), tuple(edges), tuple(open_legs))
    except (TypeError, ValueError, IndexError) as e:
        raise NetworkFormatError(f"malformed network document: {e}") from e
    net.validate()
    return net


def remove_node(net: TensorNetwork, node: int) -> TensorNetwork:
    """
    Remove a node and expose its partners as open legs (the network derivative)

    Partners of the removed node's legs are appended to the open list in the
    removed node's leg order. A self-edge of the removed node, or one of its
    legs that was already open, is replaced by a Delta node so the derivative
    keeps its identity factor.

    Args:
        net: Closed or open network
        node: Index of the node to remove

    Returns:
        TensorNetwork: Network with nodes after `node` shifted down by one

    Raises:
        InvalidNode: node index out of range
    """
    if not 0 <= node < len(net.nodes):
        raise InvalidNode(f"node {node} out of range for a network of {len(net.nodes)} nodes")

    def shift(i: int) -> int:
        return i - 1 if i > node else i

    nodes = [n for i, n in enumerate(net.nodes) if i != node]
    partner = {}
    kept_edges = []
    for a, b in net.edges:
        if a[0] == node and b[0] == node:
            partner[a[1]] = ('self', b[1])
            partner[b[1]] = ('self', a[1])
        elif a[0] == node:
            partner[a[1]] = ('node', (shift(b[0]), b[1]))
        elif b[0] == node:
            partner[b[1]] = ('node', (shift(a[0]), a[1]))
        else:
            kept_edges.append(((shift(a[0]), a[1]), (shift(b[0]), b[1])))

    open_legs = []
    for position, (n, leg) in enumerate(net.open):
        if n == node:
            partner[leg] = ('open', position)
            open_legs.append(None)
        else:
            open_legs.append((shift(n), leg))

    self_delta = {}
    appended = []
    for leg in sorted(partner):
        how, where = partner[leg]
        if how == 'node':
            appended.append(where)
        elif how == 'self':
            pair = (min(leg, where), max(leg, where))
            if pair not in self_delta:
                self_delta[pair] = len(nodes)
                nodes.append(Node.delta())
            appended.append((self_delta[pair], 0 if leg == pair[0] else 1))
        else:
            d = len(nodes)
            nodes.append(Node.delta())
            open_legs[where] = (d, 0)
            appended.append((d, 1))

    return TensorNetwork(tuple(nodes), tuple(kept_edges), tuple(open_legs) + tuple(appended))
