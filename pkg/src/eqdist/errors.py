"""Exception types shared across the package."""


class EqdistError(Exception):
    """Base class for all errors raised by eqdist."""


class AllZero(EqdistError, ValueError):
    """Every coefficient lies inside the zero-snap band."""


class Degenerate(EqdistError, ValueError):
    """The game has an all-zero gap vector, so its polynomial vanishes identically."""


class IllConditioned(EqdistError, ArithmeticError):
    """A Sturm-chain remainder has a leading coefficient inside the zero-snap band."""


class EigenFailure(EqdistError, ArithmeticError):
    """The companion-matrix eigenvalue solver did not converge."""


class DomainError(EqdistError, ValueError):
    """An index or parameter lies outside the domain of a formula."""


class TooLarge(EqdistError, ValueError):
    """Requested enumeration exceeds the supported size."""


class NumericOverflow(EqdistError, ArithmeticError):
    """An integrand evaluation left the representable floating-point range."""
