"""Exception hierarchy for the biphoton package."""


class BiphotonError(Exception):
    """Base class for all errors raised by this package."""


# -- spectral engine ---------------------------------------------------------

class ZeroDensity(BiphotonError):
    """Spectral density integrates to (numerically) zero on the working grid."""


class AsymmetricSpectrum(BiphotonError):
    """Operation requires an even spectral density |psi(-W)|^2 == |psi(W)|^2."""


# -- spatial engine ----------------------------------------------------------

class NotPositive(BiphotonError):
    """Density operator has an eigenvalue below the positivity tolerance."""


# -- closed-form interferometer ----------------------------------------------

class NonParityPump(BiphotonError):
    """Pump is neither purely even nor purely odd; no closed form applies."""


class UnderSampled(BiphotonError):
    """Scan step too coarse to resolve pump-frequency fringes."""


# -- discrete-mode simulator ---------------------------------------------------

class GridAsymmetry(BiphotonError):
    """Grid does not admit the index flip / negation bijections."""


class UnknownElement(BiphotonError):
    """Pipeline element type is not recognised."""


class IncompletePipeline(BiphotonError):
    """Rates requested before the pipeline relabelled its outputs."""


class BudgetExceeded(BiphotonError):
    """Dense tensor expansion would exceed the configured memory budget."""


# -- analysis ------------------------------------------------------------------

class EmptyOrNegative(BiphotonError):
    """Samples are empty, contain negative rates, or have no positive maximum."""


class UnderResolved(BiphotonError):
    """Too few samples per fringe period for a reliable estimate."""


class NoFringe(BiphotonError):
    """No oscillatory component above the detection threshold."""


class NoDip(BiphotonError):
    """Envelope-extracted trace has no dip of significant depth."""


class GridMismatch(BiphotonError):
    """Two scans do not share the same delay grid."""
