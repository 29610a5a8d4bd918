"""Exception hierarchy shared by every module of the package."""


class HitchinError(Exception):
    """Base class for all errors raised by this package."""


class NotLoxodromic(HitchinError):
    pass


class BadDeterminant(HitchinError):
    pass


class UnknownType(HitchinError):
    pass


class NotHyperbolic(HitchinError):
    pass


class SharedEndpoint(HitchinError):
    pass


class ShootingFailed(HitchinError):
    pass


class NotHyperbolicSignature(HitchinError):
    pass


class IndexOutOfRange(HitchinError):
    pass


class HomNotWellDefined(HitchinError):
    pass


class UnsupportedCurve(HitchinError):
    pass


class RelatorBroken(HitchinError):
    pass


class WordNotInSubgroup(HitchinError):
    pass


class SharedAxis(HitchinError):
    pass


class Unstable(HitchinError):
    pass


class NoCrossings(HitchinError):
    pass


class ConfigInvalid(HitchinError):
    """Raised with the full list of diagnostics in ``.diagnostics``."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))
