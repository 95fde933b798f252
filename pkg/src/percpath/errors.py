"""Exception hierarchy shared across the package."""


class PercpathError(Exception):
    """Base class for all package-specific errors."""


class NonAdjacent(PercpathError):
    """The two points are not nearest neighbors on the lattice."""


class OutOfBox(PercpathError):
    """A point, edge, or box leaves the simulation domain."""


class InvalidParams(PercpathError):
    """Simulation parameters violate their invariants."""


class EmptySources(PercpathError):
    """A distance computation was started with no source vertices."""


class UnreachableTarget(PercpathError):
    """Path extraction was requested for a vertex with no admissible path."""


class EmptyCluster(PercpathError):
    """No open cluster is available to regularize against."""


class RhoTooLargeForN(PercpathError):
    """The sub-box scale floor(N / (16 rho^2)) is below 1."""


class NoCrossing(PercpathError):
    """The path does not cross the requested annulus."""


class PreconditionViolated(PercpathError):
    """Both path endpoints sit inside the protected box of the edge."""


class StuckIteration(PercpathError):
    """The covering iteration failed to reduce the closed-edge count."""


class RadiusNotFound(PercpathError):
    """No admissible radius certified a bypass for the edge."""

    def __init__(self, n_max, edge=None):
        self.n_max = n_max
        self.edge = edge
        super().__init__(f"no bypass radius found up to N={n_max}")


class TooLargeForExact(PercpathError):
    """The exhaustive path search cutoff was exceeded."""


class InsufficientReps(PercpathError):
    """The experiment needs more replicas than were configured."""


class CalibrationFailed(PercpathError):
    """No grid value satisfied the calibration target."""
