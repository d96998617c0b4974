"""Exception types shared across the package."""


class DivisionByZero(ZeroDivisionError):
    pass


class PoleError(ArithmeticError):
    """A rational function was evaluated at a root of its denominator."""


class DomainError(ValueError):
    """An argument (usually d or k) lies outside the range where a formula is valid."""


class IndefiniteSign(ArithmeticError):
    """A rational function changes sign on the interval being analysed."""


class ConfigError(ValueError):
    pass


class VerificationError(AssertionError):
    """Raised when an identity that must hold exactly turns out to be false."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
