"""Exception hierarchy shared by all gapcert modules."""


class GapcertError(Exception):
    """Base class for every error raised by the toolkit."""


class UnknownSymbol(GapcertError, ValueError):
    pass


class NoNormalForm(GapcertError):
    """The descriptor has no decidable normal form (free strategy with relators)."""


class NormalFormUnavailable(GapcertError):
    pass


class InvalidGroup(GapcertError, ValueError):
    pass


class GroupMismatch(GapcertError, ValueError):
    pass


class DimMismatch(GapcertError, ValueError):
    pass


class DegreeOutOfRange(GapcertError, IndexError):
    pass


class PreconditionFailed(GapcertError):
    """Input violates a solver precondition. ``witness`` carries the offending data."""

    def __init__(self, message, witness=None, index=None):
        super().__init__(message)
        self.witness = witness
        self.index = index


class RadiusExhausted(GapcertError):
    """Truncated search found nothing up to ``radius``. Not a proof of non-existence."""

    def __init__(self, message, radius):
        super().__init__(message)
        self.radius = radius


class NotFinite(GapcertError):
    pass


class UnassignedGenerator(GapcertError, KeyError):
    pass


class NotHermitian(GapcertError, ValueError):
    pass


class NotPositive(GapcertError, ValueError):
    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotVanishingOnImage(GapcertError):
    def __init__(self, message, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class NotACocycle(GapcertError):
    pass


class SupportExceeded(GapcertError, KeyError):
    pass


class RadiusTooSmall(GapcertError, ValueError):
    pass


class SolverDiverged(GapcertError):
    pass


class MalformedCertificate(GapcertError, ValueError):
    pass


class MalformedInput(GapcertError, ValueError):
    pass
