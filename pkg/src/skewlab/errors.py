"""Exception types shared across the package."""


class SkewlabError(Exception):
    """Base class for all errors raised by this package."""


class NonMonotonicFrequency(SkewlabError):
    """Frequency axis is not strictly increasing."""


class MalformedRecord(SkewlabError):
    """Touchstone data block has the wrong shape or unparseable values."""


class UnsupportedParameter(SkewlabError):
    """File declares a parameter type or format this package does not handle."""


class PortCountMismatch(SkewlabError):
    """Operation requires a different port count than the network provides."""


class GridMismatch(SkewlabError):
    """Two objects that must share a frequency grid do not."""


class GridOutOfRange(SkewlabError):
    """Requested frequencies fall outside the measured grid."""


class SingularConversion(SkewlabError):
    """Scattering-to-transfer conversion is singular at one or more frequencies."""


class NoCrossing(SkewlabError):
    """A time-domain trace never crosses the requested threshold."""


class InsufficientBandwidth(SkewlabError):
    """Measured bandwidth is too low for the requested excitation."""


class EmptyBand(SkewlabError):
    """Integration band contains no frequency points."""


class EmptyInput(SkewlabError):
    """Operation received an empty collection."""
