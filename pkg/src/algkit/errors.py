"""Exception hierarchy shared by the whole package."""


class AlgkitError(Exception):
    """Base class for all algkit errors."""


class SyntaxError_(AlgkitError):
    """Element grammar violation. Carries the 0-based position in the text."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbol(AlgkitError):
    pass


class DivisionByZero(AlgkitError):
    pass


class DescriptorMismatch(AlgkitError):
    pass


class NoTowerPath(AlgkitError):
    pass


class CharZero(AlgkitError):
    pass


class NotIrreducible(AlgkitError):
    pass


class NeedCertificate(AlgkitError):
    """Irreducibility cannot be decided by the built-in tests."""


class AmbientMismatch(AlgkitError):
    pass


class DimensionMismatch(AlgkitError):
    pass


class Inconsistent(AlgkitError):
    """Linear system has no solution.  Reported, normally not raised."""


class NotAssociative(AlgkitError):
    def __init__(self, i, j, l):
        super().__init__(f"associativity fails on basis triple ({i}, {j}, {l})")
        self.triple = (i, j, l)


class UnitFails(AlgkitError):
    pass


class WrongCharacteristic(AlgkitError):
    pass


class CertificateRejected(AlgkitError):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class NotIdempotent(AlgkitError):
    pass


class NotOrthogonal(AlgkitError):
    pass


class NotComplete(AlgkitError):
    pass


class NotPrimitive(AlgkitError):
    pass


class UnsupportedShape(AlgkitError):
    """find_splitting_charp cannot handle the certified quotient shape."""


class NotBasic(AlgkitError):
    pass


class ActionAxiomFails(AlgkitError):
    def __init__(self, edge, detail):
        super().__init__(f"bimodule action axiom fails on edge {edge}: {detail}")
        self.edge = edge


class DualityFails(AlgkitError):
    def __init__(self, edge):
        super().__init__(f"Hom-duality fails on edge {edge}")
        self.edge = edge


class CyclicWithoutBound(AlgkitError):
    pass


class ArrowMissing(AlgkitError):
    pass


class NotHomogeneousEndpoints(AlgkitError):
    pass


class NotCanonicalSet(AlgkitError):
    pass


class RelationOutOfBound(AlgkitError):
    pass


class NotSplit(AlgkitError):
    pass


class SectionMissing(AlgkitError):
    pass


class BoundViolation(AlgkitError):
    pass


class EquivarianceFails(AlgkitError):
    pass


class NotIsomorphic(AlgkitError):
    def __init__(self, diagnostic):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class DocumentError(AlgkitError):
    """Malformed or rejected document file."""


class UnknownExample(AlgkitError):
    pass
