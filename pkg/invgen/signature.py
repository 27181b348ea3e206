"""
Input signatures
Grammar: comma-separated slots "cart:<rank>", "sph:<l>" or "sum:<l1>+<l2>+..."
"""

import numpy as np
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
from config.settings import ENUMERATION_CONFIG
from so3rep.clebsch import sum_rank
from so3rep.projectors import rotate_spherical
from so3rep.rotations import Rotation, rotate_cartesian
from utils.errors import InvalidSignature, InvalidType, SignatureParseError

CART = 'cart'
SPH = 'sph'
SUM = 'sum'


@dataclass(frozen=True)
class Slot:
    """
    One input of a signature

    A Cartesian slot of rank r binds a tensor of shape (3,)*r. A spherical
    slot of type l binds a vector of length 2l+1, and a direct-sum slot binds
    the concatenation of its components.
    """
    kind: str
    value: int = 0
    types: Optional[Tuple[int, ...]] = None

    @staticmethod
    def cart(rank: int) -> 'Slot':
        return Slot(CART, rank)

    @staticmethod
    def sph(l: int) -> 'Slot':
        return Slot(SPH, l)

    @staticmethod
    def sum(types: Sequence[int]) -> 'Slot':
        return Slot(SUM, 0, tuple(types))

    @property
    def wrapped(self) -> bool:
        """Spherical and direct-sum inputs reach the network through a projector"""
        return self.kind != CART

    @property
    def legs(self) -> int:
        """Number of 3-extent legs one copy contributes"""
        if self.kind == CART:
            return self.value
        if self.kind == SPH:
            return self.value
        return sum_rank(self.types)

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.kind == CART:
            return (3,) * self.value
        if self.kind == SPH:
            return (2 * self.value + 1,)
        return (sum(2 * t + 1 for t in self.types),)

    def act(self, r: Rotation, x: np.ndarray) -> np.ndarray:
        """Rotate a value bound to this slot"""
        if self.kind == CART:
            return rotate_cartesian(r, x)
        if self.kind == SPH:
            return rotate_spherical(r, x, self.value)
        out = []
        start = 0
        for t in self.types:
            out.append(rotate_spherical(r, x[start:start + 2 * t + 1], t))
            start += 2 * t + 1
        return np.concatenate(out)

    def __str__(self) -> str:
        if self.kind == SUM:
            return 'sum:' + '+'.join(str(t) for t in self.types)
        return f"{self.kind}:{self.value}"


@dataclass(frozen=True)
class Signature:
    slots: Tuple[Slot, ...]

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, i: int) -> Slot:
        return self.slots[i]

    def __str__(self) -> str:
        return format_signature(self)

    def extended(self, slot: Slot) -> 'Signature':
        return Signature(self.slots + (slot,))

    def shapes(self) -> dict:
        return {i: s.shape for i, s in enumerate(self.slots)}

    def random_bindings(self, rng: np.random.Generator) -> dict:
        """Entries uniform in [-1, 1] for every slot"""
        return {i: rng.uniform(-1.0, 1.0, size=s.shape) for i, s in enumerate(self.slots)}

    def act(self, r: Rotation, bind: dict) -> dict:
        return {i: self.slots[i].act(r, x) for i, x in bind.items()}


def _parse_int(text: str, where: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise SignatureParseError(f"expected an integer in {where!r}, got {text!r}") from None
    if value < 0:
        raise SignatureParseError(f"negative value in {where!r}")
    return value


def parse_slot(text: str) -> Slot:
    """
    Parse one slot spec

    Raises:
        SignatureParseError: malformed text
        InvalidSignature: rank or type beyond the enumeration caps
    """
    text = text.strip()
    if ':' not in text:
        raise SignatureParseError(f"slot {text!r} is not of the form kind:value")
    kind, value = (part.strip() for part in text.split(':', 1))
    max_rank = ENUMERATION_CONFIG['max_rank']
    max_type = ENUMERATION_CONFIG['max_type']

    if kind == CART:
        rank = _parse_int(value, text)
        if rank > max_rank:
            raise InvalidSignature(f"rank {rank} in {text!r} exceeds {max_rank}")
        return Slot.cart(rank)
    if kind == SPH:
        l = _parse_int(value, text)
        if l > max_type:
            raise InvalidSignature(f"type {l} in {text!r} exceeds {max_type}")
        return Slot.sph(l)
    if kind == SUM:
        if not value:
            raise SignatureParseError(f"empty direct sum in {text!r}")
        types = tuple(_parse_int(part, text) for part in value.split('+'))
        if max(types) > max_type:
            raise InvalidSignature(f"type {max(types)} in {text!r} exceeds {max_type}")
        try:
            sum_rank(types)
        except InvalidType as e:
            raise InvalidSignature(str(e)) from e
        return Slot.sum(types)
    raise SignatureParseError(f"unknown slot kind {kind!r} in {text!r}")


def parse_signature(text: str) -> Signature:
    """
    Parse "cart:1,sph:2,sum:1+3" into a Signature

    Raises:
        SignatureParseError: malformed text or empty signature
        InvalidSignature: caps exceeded
    """
    if text is None or not text.strip():
        raise SignatureParseError("empty signature")
    return Signature(tuple(parse_slot(part) for part in text.split(',')))


def format_signature(sig: Signature) -> str:
    return ','.join(str(s) for s in sig.slots)
