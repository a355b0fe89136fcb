"""Exception types raised across the package."""


class CayleySumError(Exception):
    """Base class for package errors."""


class GroupError(CayleySumError, ValueError):
    """Malformed group, element, or group-level precondition."""


class TorsionError(GroupError):
    """Operation needs gcd(N, 6) = 1 and no override was given."""


class SizeLimitError(CayleySumError, ValueError):
    """Input exceeds a configured size limit for an exhaustive routine."""


class InfeasibleError(CayleySumError):
    """The requested object provably does not exist, or a search budget ran out."""
