"""Exception hierarchy shared by all kkit modules."""


class KkitError(Exception):
    """Base class for every error raised by kkit."""


class SpecParseError(KkitError):
    pass


class UnsupportedType(KkitError):
    pass


class UnsupportedGroup(KkitError):
    pass


class WeylTooLarge(KkitError):
    pass


class StructureConstantError(KkitError):
    pass


class EmptyDegree(KkitError):
    pass


class NonIntegralDividedPower(KkitError):
    pass


class NoIntegralComplement(KkitError):
    pass


class DegenerateForm(KkitError):
    pass


class ConditionViolation(KkitError):
    pass


class BruteForceTooLarge(KkitError):
    pass


class TruncationOverflow(KkitError):
    def __init__(self, degree, cap):
        super().__init__(f"polynomial degree {degree} exceeds module cap {cap}")
        self.degree = degree
        self.cap = cap


class ConfigError(KkitError):
    pass
