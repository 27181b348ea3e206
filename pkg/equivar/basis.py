"""
Equivariant operation bases
Closed generators containing one output copy, with that copy removed
"""

import numpy as np
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence
from scipy.linalg import svdvals
from config.settings import ENUMERATION_CONFIG
from invgen.enumerate import GeneratorNetwork, enumerate_candidates
from invgen.generators import evaluate_on_probes, independent_columns, probe_bindings
from invgen.signature import Signature, Slot, parse_signature, parse_slot
from tncore.contraction import contract_network
from tncore.network import INPUT, TensorNetwork, network_from_dict, remove_node
from tncore.tensors import as_tensor, full_pairing
from utils.errors import InvalidSignature, NetworkFormatError, ShapeMismatch
from utils.logger import get_logger
from utils.validators import TensorValidator

logger = get_logger(__name__)


@dataclass(frozen=True)
class EquivariantNetwork:
    net: TensorNetwork
    source: GeneratorNetwork
    output_slot: int

    def to_dict(self) -> dict:
        return dict(
            self.net.to_dict(),
            source=self.source.net.to_dict(),
            degree=list(self.source.degree),
            uses_epsilon=self.source.uses_epsilon,
            output_slot=self.output_slot,
        )


@dataclass(frozen=True)
class EquivariantBasis:
    signature: Signature
    out_rep: Slot
    max_degree: int
    elements: tuple = field(default_factory=tuple)
    seed: int = ENUMERATION_CONFIG['probe_seed']

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_dict(self) -> dict:
        return {
            'kind': 'equivariant_basis',
            'signature': str(self.signature),
            'out_rep': str(self.out_rep),
            'max_degree': self.max_degree,
            'seed': self.seed,
            'elements': [e.to_dict() for e in self.elements],
        }


def basis_from_dict(doc: dict) -> EquivariantBasis:
    """
    Rebuild an EquivariantBasis from its JSON document

    Raises:
        NetworkFormatError: missing fields or malformed networks
    """
    try:
        sig = parse_signature(doc['signature'])
        elements = []
        for e in doc['elements']:
            source = GeneratorNetwork(
                network_from_dict(e['source']),
                tuple(int(d) for d in e['degree']),
                bool(e['uses_epsilon']),
            )
            elements.append(EquivariantNetwork(network_from_dict(e), source, int(e['output_slot'])))
        return EquivariantBasis(
            sig, parse_slot(doc['out_rep']), int(doc['max_degree']), tuple(elements),
            int(doc.get('seed', ENUMERATION_CONFIG['probe_seed'])),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise NetworkFormatError(f"malformed equivariant basis document: {e}") from e


def output_node(g: GeneratorNetwork, output_slot: int) -> int:
    nodes = g.net.input_nodes(output_slot)
    if len(nodes) != 1:
        raise InvalidSignature(f"generator holds {len(nodes)} copies of the output slot, expected 1")
    return nodes[0]


def probe_rank(values: np.ndarray, tol: float = 1e-8) -> int:
    """Number of singular values above tol times the largest"""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0
    sigma = svdvals(values)
    if sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > tol * sigma[0]))


def equivariant_basis(
    sig_in: Signature,
    out_rep: Slot,
    max_degree: int,
    epsilon_budget: int = 1,
    probe_count: Optional[int] = None,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None
) -> EquivariantBasis:
    """
    Basis of equivariant maps sig_in -> out_rep

    Enumerates generators of sig_in ⊕ out_rep holding exactly one output
    copy, removes that copy, and keeps elements that are independent as maps
    on random probe inputs.

    Args:
        sig_in: Input signature
        out_rep: Output slot (Cartesian rank or spherical type)
        max_degree: Largest number of input copies
        epsilon_budget: 0 or 1
        probe_count: Probe inputs for map-level dedup
        tol: Dedup threshold relative to the largest column norm
        seed: Probe seed

    Returns:
        EquivariantBasis: Elements whose open legs follow the removed node's legs

    Raises:
        EnumerationTooLarge: propagated from enumeration
    """
    if max_degree < 0:
        raise InvalidSignature(f"max_degree must be non-negative, got {max_degree}")
    probe_count = ENUMERATION_CONFIG['probe_count'] if probe_count is None else probe_count
    tol = ENUMERATION_CONFIG['dedup_tol'] if tol is None else tol
    seed = ENUMERATION_CONFIG['probe_seed'] if seed is None else seed

    extended = sig_in.extended(out_rep)
    o = len(sig_in)
    candidates = enumerate_candidates(
        extended, max_degree, epsilon_budget, fixed={o: 1}, min_total=1, workers=workers
    )
    opened = [
        EquivariantNetwork(remove_node(g.net, output_node(g, o)), g, o)
        for g in candidates
    ]

    probes = probe_bindings(sig_in, probe_count, seed)
    values = evaluate_on_probes([e.net for e in opened], probes, workers)
    kept = tuple(opened[j] for j in independent_columns(values, tol))
    logger.info(f"Equivariant basis {sig_in} -> {out_rep}: {len(kept)} of {len(opened)} elements")
    return EquivariantBasis(sig_in, out_rep, max_degree, kept, seed)


def evaluate_basis_element(e: EquivariantNetwork, bind: Mapping[int, np.ndarray]) -> np.ndarray:
    """Output tensor; axes follow the removed output node's legs"""
    return contract_network(e.net, bind)


def combine(basis_values: Sequence[np.ndarray], coeffs: Sequence[float]) -> np.ndarray:
    """
    Linear combination sum_j coeffs[j] * basis_values[j]

    Raises:
        ShapeMismatch: lengths or shapes differ
    """
    if len(basis_values) != len(coeffs):
        raise ShapeMismatch(f"{len(basis_values)} values for {len(coeffs)} coefficients")
    if not basis_values:
        raise ShapeMismatch("cannot combine an empty basis")
    values = [as_tensor(v) for v in basis_values]
    ok, message = TensorValidator.validate_same_shapes(values)
    if not ok:
        raise ShapeMismatch(message)
    out = np.zeros(values[0].shape)
    for v, c in zip(values, coeffs):
        out += float(c) * v
    return out


def pair_down(value: np.ndarray, y: np.ndarray) -> float:
    """Full contraction <value, y>, the pairing that closes an equivariant map"""
    return full_pairing(value, y)


def describe_element(e: EquivariantNetwork) -> str:
    """Formula sketch: node list, edge list and open legs"""
    names = []
    for node in e.net.nodes:
        if node.kind == INPUT:
            names.append(f"x{node.slot}.{node.copy}")
        else:
            names.append(node.label())

    def leg(ep):
        return f"{names[ep[0]]}[{ep[1]}]"

    nodes = ' '.join(f"{i}:{name}" for i, name in enumerate(names))
    edges = ', '.join(f"{leg(a)}-{leg(b)}" for a, b in e.net.edges) or 'none'
    open_legs = ', '.join(leg(ep) for ep in e.net.open) or 'none'
    return f"nodes {nodes} | edges {edges} | out {open_legs}"

