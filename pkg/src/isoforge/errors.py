"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class IsoforgeError(Exception):
    exit_code = 1


class InputError(IsoforgeError, ValueError):
    """Malformed or axiom-violating input."""

    exit_code = 2


class PreconditionError(IsoforgeError, ValueError):
    """Well-formed input that fails an operation's precondition."""

    exit_code = 3


class ResourceLimit(IsoforgeError):
    exit_code = 4


class VerificationFailed(IsoforgeError):
    exit_code = 1


class ParseError(InputError):
    pass


class AxiomViolation(InputError):
    def __init__(self, kind, witness, labels=None):
        self.kind = kind
        self.witness = tuple(witness)
        names = tuple(labels[i] for i in self.witness) if labels is not None else self.witness
        self.names = names
        super().__init__(f"{kind} axiom violated at {names}")


class NotAGroup(InputError):
    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        super().__init__(f"not a group: {axiom} fails {detail}".rstrip())


class ScaleTooSmall(PreconditionError):
    pass


class InconsistentOverlap(PreconditionError):
    pass


class EmptyCommon(PreconditionError):
    pass


class NotKatetov(PreconditionError):
    def __init__(self, witness, labels=None):
        self.witness = tuple(witness)
        names = tuple(labels[i] for i in self.witness) if labels is not None else self.witness
        super().__init__(f"not a Katetov map at {names}")


class ZeroDistance(PreconditionError):
    pass


class MarginTooTight(PreconditionError):
    pass


class DegreeMismatch(PreconditionError):
    pass


class NotScaled(PreconditionError):
    pass


class BadArity(PreconditionError):
    pass


class NotSubgroup(PreconditionError):
    pass


class TooSmall(PreconditionError):
    pass


class BadRatio(PreconditionError):
    pass


class NotStrict(PreconditionError):
    def __init__(self, witness, labels=None):
        self.witness = tuple(witness)
        names = tuple(labels[i] for i in self.witness) if labels is not None else self.witness
        super().__init__(f"strict triangle inequality fails at {names}")


class DiameterTooLarge(PreconditionError):
    pass


class NotIsometry(PreconditionError):
    pass


class OrderBound(ResourceLimit):
    pass


class SizeBound(ResourceLimit):
    pass
