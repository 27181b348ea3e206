"""
Exception hierarchy for so3tengen
"""


class So3TenGenError(Exception):
    """Base class for all errors raised by this package"""


class InvalidPermutation(So3TenGenError):
    pass


class ShapeMismatch(So3TenGenError):
    pass


class DimensionMismatch(ShapeMismatch):
    """Layer dimensions of a perceptron do not chain"""


class MissingBinding(So3TenGenError):
    pass


class InvalidNode(So3TenGenError):
    pass


class NetworkFormatError(So3TenGenError):
    """A serialized network document violates the interchange schema"""


class InvalidType(So3TenGenError):
    """Irrep type outside the admissible range"""


class BasisConventionError(So3TenGenError):
    """A constructed real-basis object kept an imaginary part or the wrong null space"""


class SignatureParseError(So3TenGenError):
    pass


class InvalidSignature(So3TenGenError):
    """Signature parses but exceeds the enumeration caps"""


class EnumerationTooLarge(So3TenGenError):

    def __init__(self, count: int, limit: int, what: str = 'networks'):
        self.count = count
        self.limit = limit
        super().__init__(f"enumeration overflow: {count} {what} exceeds limit {limit}")


class InsufficientProbes(So3TenGenError):
    pass


class ProportionalityFailure(So3TenGenError):
    pass


class NonPhysicalDeformation(So3TenGenError):
    """det(F) <= 0, the logarithm in the Neo-Hookean law is undefined"""


class TrainingDiverged(So3TenGenError):

    def __init__(self, seed: int, train_size: int, step: int):
        self.seed = seed
        self.train_size = train_size
        self.step = step
        super().__init__(
            f"non-finite loss at step {step} (seed={seed}, train_size={train_size})"
        )
