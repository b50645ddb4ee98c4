"""Exception hierarchy.

Validation errors (bad input) and computation errors (a mathematical
obstruction or failed internal check) are kept apart so the CLI can map
them to distinct exit codes.
"""


class CrystError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CrystError):
    pass


class ComputationError(CrystError):
    pass


# -- input / structural validation -------------------------------------------

class MalformedConfig(ValidationError):
    pass


class BadTable(ValidationError):
    pass


class NonUnimodularMatrix(ValidationError):
    pass


class CocycleViolation(ValidationError):
    def __init__(self, h1, h2, defect):
        self.pair = (h1, h2)
        self.defect = defect
        super().__init__(
            f"cocycle condition fails for pair ({h1}, {h2}): "
            f"a_h1 + A_h1 a_h2 - a_h1h2 = {[str(c) for c in defect]} is not integral"
        )


class RankMismatch(ValidationError):
    pass


class NotInGroup(ValidationError):
    pass


class UnknownGenerator(ValidationError):
    pass


class BadTransversal(ValidationError):
    pass


class BadSection(ValidationError):
    pass


class MissingSymbol(ValidationError):
    pass


class OffCircleValue(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class NotAGenerator(ValidationError):
    pass


# -- mathematical obstructions and internal failures --------------------------

class InfiniteFixedLocus(ComputationError):
    pass


class NonabelianLittleGroup(ComputationError):
    pass


class InconsistentExtension(ComputationError):
    pass


class UnsupportedExtension(ComputationError):
    pass


class ElementEscapes(ComputationError):
    pass


class NotMonomial(ComputationError):
    pass


class NotDiagonalOnLattice(ComputationError):
    pass


class DoesNotFactor(ComputationError):
    pass


class NonabelianQuotient(ComputationError):
    pass


class NonIntegerMultiplicity(ComputationError):
    pass


class NonCyclicHolonomy(ComputationError):
    pass


class TrivialTransfer(ComputationError):
    pass


class NotTorsionFree(ComputationError):
    pass


class CertificateError(ComputationError):
    pass
