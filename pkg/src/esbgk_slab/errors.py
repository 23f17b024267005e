"""Exception types shared across the package."""

from __future__ import annotations


class SlabModelError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SlabModelError, ValueError):
    """Invalid grid, solver, or run configuration."""


class ShapeError(SlabModelError, ValueError):
    """An array does not match the grid or field it is paired with."""


class SingularWeightError(SlabModelError, ValueError):
    """A 1/|v1| weight was requested without an exclusion band or vanishing band."""


class VacuumError(SlabModelError, ValueError):
    """Moments were requested for a slice with vanishing density."""


class DegenerateTensorError(SlabModelError, ValueError):
    """The temperature tensor is not symmetric positive definite."""


class InadmissibleDataError(SlabModelError, ValueError):
    """Boundary data fails one of the admissibility conditions."""


class TauTooSmallError(SlabModelError, RuntimeError):
    """An iterate left the invariant solution set; the relaxation time is too small."""


class NonConvergenceError(SlabModelError, RuntimeError):
    """The fixed-point iteration hit the iteration cap before meeting tolerance."""
