"""Exception types shared across the package."""


class CubicOscError(Exception):
    """Base class for all package errors."""


class DegenerateCurve(CubicOscError):
    """Discriminant 4a^3 + 27b^2 is (numerically) zero."""


class QuadratureFailure(CubicOscError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PoleAtLatticePoint(CubicOscError):
    """Weierstrass function evaluated too close to a lattice point."""


class NoConvergence(CubicOscError):
    """Iterative solve (Newton, bisection) failed to converge."""


class BranchMismatch(CubicOscError):
    """Curve point does not match either branch of the square root."""


class DivisionByZeroFunction(CubicOscError):
    """Division by the identically-zero function."""


class SingularityTooClose(CubicOscError):
    """Another singularity lies inside a residue probe circle."""


class BranchTrackingLoss(CubicOscError):
    """sqrt branch could not be continued along a contour."""


class StepBudgetExceeded(CubicOscError):
    """Trajectory tracing exceeded its step budget."""


class Inconclusive(CubicOscError):
    """Trajectory classification could not be decided."""


class NotSaddleFree(CubicOscError):
    """Operation requires a saddle-free differential."""


class NonGenericPoint(CubicOscError):
    """Central charges are too close to a wall."""


class NearApparentSingularity(CubicOscError):
    """Integration path passes too close to the apparent singularity."""


class StiffnessFailure(CubicOscError):
    """Adaptive ODE step size underflowed."""


class SeedBranchAmbiguous(CubicOscError):
    """Neither WKB branch clearly decays at the seed point."""


class DegenerateQuadrilateral(CubicOscError):
    """Vanishing Wronskian in a cross-ratio denominator."""


class PoleOfFlip(CubicOscError):
    """Coordinate flip evaluated at a pole (1 + X = 0)."""


class ExpressionSwell(CubicOscError):
    """Function-field expression exceeded its degree bound."""


class WKBInvalidRegion(CubicOscError):
    """Point fails the WKB dominance test."""


class ResidueNonzero(CubicOscError):
    """Internal consistency failure: residue expected to vanish is not."""


class SpinLocus(CubicOscError):
    """Holonomy inversion hit a half-lattice (spin) point."""


class HitPZero(CubicOscError):
    """Flow trajectory reached p = 0."""


class ConstraintDrift(CubicOscError):
    """Flow integration drifted off the curve constraint."""


class StencilCrossesSingularity(CubicOscError):
    """Finite-difference stencil touches a singular locus."""


class PoleOfAutomorphism(CubicOscError):
    """Torus automorphism evaluated at 1 - x_gamma = 0."""


class BoundaryRayActive(CubicOscError):
    """Sector boundary ray contains an active central charge."""


class ConfigError(CubicOscError):
    """Invalid or unparseable run configuration."""
