"""Exception hierarchy shared by every engine."""


class PDEMError(Exception):
    """Base class for all errors raised by :mod:`pdem`."""


class ProfileError(PDEMError, ValueError):
    """A mass or potential profile violates its invariants."""


class DiscretizationError(PDEMError, ValueError):
    """Invalid slab count, step count or grid."""


class TurningPointError(PDEMError, ArithmeticError):
    """A local wavenumber vanishes where the formulation divides by it."""


class SingularGammaError(TurningPointError):
    """The coupled-amplitude matrix is singular (E equals V at a sample)."""


class DegenerateWavefunctionError(PDEMError, ValueError):
    """The wavefunction vanishes identically and cannot be normalized."""


class BoundaryKindError(PDEMError, ValueError):
    """Operation requires a different boundary condition kind."""


class ConvergenceError(PDEMError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class DomainError(PDEMError, ValueError):
    """The requested interval is not in the region the method supports."""


class TopologyError(DomainError):
    """The forbidden region does not have the supported shape."""


class NoPropagatingChannelError(PDEMError, ValueError):
    """A lead carries no propagating wave at the requested energy."""


class SearchError(PDEMError, RuntimeError):
    """A root could not be bracketed in the requested range."""
