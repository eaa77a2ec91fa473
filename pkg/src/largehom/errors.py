"""Exception hierarchy; every error carries a stable ``name`` for reports."""


class LargehomError(Exception):
    name = "LargehomError"

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        cls.name = cls.__name__


class NotPrime(LargehomError, ValueError):
    pass


class DimensionMismatch(LargehomError, ValueError):
    pass


class QuotientMapError(LargehomError, ValueError):
    """A map does not carry one subspace into the other (caller bug)."""


class ParseError(LargehomError, ValueError):
    pass


class NotArtinian(LargehomError, ValueError):
    pass


class VariableMismatch(LargehomError, ValueError):
    pass


class NotGraded(LargehomError, ValueError):
    pass


class NonHomogeneousIdeal(NotGraded):
    pass


class NCViolation(LargehomError, ValueError):
    """The ideal fails I ∩ m² = mI."""


class DegreeOutOfRange(LargehomError, ValueError):
    pass


class NotPowerOfMaximalIdeal(LargehomError, ValueError):
    pass


class NotCompleteIntersection(LargehomError, ValueError):
    pass


class NonUnitConstantTerm(LargehomError, ArithmeticError):
    pass


class InconsistentSeries(LargehomError, ArithmeticError):
    pass


class InternalInconsistency(LargehomError, AssertionError):
    """Two routes that theory says must agree did not."""


class LiftFailure(LargehomError, ArithmeticError):
    pass


class NotAMorphism(LargehomError, ValueError):
    pass
