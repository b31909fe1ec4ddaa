"""Domain errors raised across sym-orbits"""
from typing import Any, Dict, Optional


class SymOrbitsError(Exception):
    """Base class for all domain errors"""

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.__class__.__name__)
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """Diagnostic payload for the CLI"""
        return {"error": self.__class__.__name__, "message": str(self), **self.details}


# dynamics / flow

class CollisionProximity(SymOrbitsError):
    """State lies inside the collision radius of a primary"""

    def __init__(self, distance: float, radius: float):
        super().__init__(
            f"state within collision radius: distance {distance:.3e} < {radius:.3e}",
            distance=distance, radius=radius,
        )
        self.distance = distance
        self.radius = radius


class SymmetryNotApplicable(SymOrbitsError):
    """Symmetry is not a symmetry of the model"""


class CollisionDuringFlow(SymOrbitsError):
    """Trajectory entered the collision radius while propagating"""

    def __init__(self, time: float, distance: float):
        super().__init__(
            f"collision during flow at t={time:.6f} (distance {distance:.3e})",
            time=time, distance=distance,
        )
        self.time = time
        self.distance = distance


class StepSizeUnderflow(SymOrbitsError):
    """Integrator could not make progress"""


class EventNotFound(SymOrbitsError):
    """Requested crossing did not occur before t_max"""


# shooting

class NoConvergence(SymOrbitsError):
    """Newton correction did not converge"""

    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})",
            iterations=iterations, residual=residual,
        )
        self.iterations = iterations
        self.residual = residual


class SingularJacobian(SymOrbitsError):
    """Shooting Jacobian is numerically singular"""

    def __init__(self, condition: float):
        super().__init__(f"singular shooting Jacobian (cond {condition:.3e})", condition=condition)
        self.condition = condition


class NotSymmetric(SymOrbitsError):
    """Orbit does not respect the declared involution"""


# spectral

class DegenerateBasis(SymOrbitsError):
    """Flow direction too small to build a reduction basis"""


class BasisConstructionFailed(SymOrbitsError):
    """Adapted symplectic basis could not be built"""


class StructureViolation(SymOrbitsError):
    """Monodromy is not symplectic or its blocks break the Wonenburger relations"""

    def __init__(self, what: str, error: float, tolerance: float, **details):
        super().__init__(
            f"{what} error {error:.2e} above {tolerance:.0e}",
            what=what, error=error, tolerance=tolerance, **details,
        )
        self.error = error


class DegenerateWithinTolerance(SymOrbitsError):
    """Stability index within tolerance of +-1"""


class SignUndefined(SymOrbitsError):
    """B-/C-sign requested for a complex, multiple or trivial eigenvalue"""


# index

class DegenerateCover(SymOrbitsError):
    """k * phi / 2pi is an integer: the cover is degenerate"""


class ParityMismatch(SymOrbitsError):
    """Hyperbolic winding parity contradicts the H+/H- tag"""


class AmbiguousJump(SymOrbitsError):
    """Degeneracy is not a simple eigenvalue-1 crossing"""


# diagram / floer

class TangentialCrossing(SymOrbitsError):
    """Path touches a Gamma-line without changing sides"""

    def __init__(self, parameter: float, slope: float):
        super().__init__(
            f"tangential contact with line of slope {slope:.6f} at parameter {parameter:.10f}",
            parameter=parameter, slope=slope,
        )
        self.parameter = parameter
        self.slope = slope


class MixedDimension(SymOrbitsError):
    """Census mixes planar and spatial entries"""


# continuation

class BranchTerminated(SymOrbitsError):
    """Continuation stopped before reaching its target"""

    def __init__(self, reason: str, parameter: Optional[float] = None):
        super().__init__(f"branch terminated: {reason}", reason=reason, parameter=parameter)
        self.reason = reason
        self.parameter = parameter


class StateJump(SymOrbitsError):
    """Corrected orbit landed too far from its predecessor"""


class ContinuationLostConnection(SymOrbitsError):
    """Mass-parameter deformation lost the family"""

    def __init__(self, last_mu: float, cause: str = ""):
        super().__init__(
            f"deformation lost the family at mu={last_mu:.6e} {cause}".rstrip(),
            last_mu=last_mu,
        )
        self.last_mu = last_mu


class BisectionStalled(SymOrbitsError):
    """Degeneracy bisection could not shrink the bracket"""


class NoKernelDirection(SymOrbitsError):
    """Degenerate orbit has no usable kernel direction"""


class SeedsFailedToConverge(SymOrbitsError):
    """No branch-switching seed converged"""


# catalog

class SchemaVersionMismatch(SymOrbitsError):
    """Record written by an incompatible schema"""


class ParseError(SymOrbitsError):
    """Malformed record in a JSON-lines file"""

    def __init__(self, line: int, field: str, message: str = ""):
        super().__init__(
            f"line {line}: {message or f'missing or invalid field {field!r}'}",
            line=line, field=field,
        )
        self.line = line
        self.field = field


class MissingData(SymOrbitsError):
    """Branch lacks the records needed for an export"""


class DanglingEdge(SymOrbitsError):
    """Branch endpoint matches no vertex"""
