"""Exception and warning types shared across the package."""


class FloquetIsingError(Exception):
    """Base class for numerical failures raised by this package."""


class DegenerateModeError(FloquetIsingError):
    """A momentum mode is gapless (or numerically indistinguishable from it)."""


class NormDriftError(FloquetIsingError):
    """Mode normalization drifted beyond tolerance during integration."""


class UnitarityDriftError(FloquetIsingError):
    """The Bogoliubov frame lost unitarity beyond tolerance."""


class SpectralPairingError(FloquetIsingError):
    """Eigenvalues of a Majorana correlation matrix failed to pair as +/-nu."""


class DegenerateSpectrumWarning(UserWarning):
    """The quadratic Hamiltonian has an eigenvalue numerically at zero."""


class QuadratureWarning(UserWarning):
    """Adaptive quadrature exhausted its subdivision budget."""


class RevivalWarning(UserWarning):
    """Requested horizon exceeds the finite-size revival bound."""


class LowFrequencyWarning(UserWarning):
    """Drive frequency is low enough that the k-grid may be under-resolved."""
