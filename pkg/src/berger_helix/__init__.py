"""Helix (constant angle) surfaces in the Lorentzian Berger sphere.

The package evaluates the geometry of S^3 with the Lorentzian metric obtained
by rescaling the round metric along the Hopf fibres, builds the surfaces
``F(u, v) = Q(v) beta(u)`` that have constant angle with the Hopf field, and
checks the identities those surfaces satisfy numerically.
"""

from berger_helix.ambient import (
    AmbientPoint,
    BergerParams,
    FrameCoefficients,
    TangentVector,
)
from berger_helix.errors import (
    ConfigurationError,
    DegenerateNormalError,
    DomainError,
    HelixError,
    UsageError,
)
from berger_helix.helix import HelixConstants, HelixSpec, SurfaceJet
from berger_helix.isometry import IsometryFamily

__version__ = "0.1.0"

__all__ = [
    "AmbientPoint",
    "BergerParams",
    "ConfigurationError",
    "DegenerateNormalError",
    "DomainError",
    "FrameCoefficients",
    "HelixConstants",
    "HelixError",
    "HelixSpec",
    "IsometryFamily",
    "SurfaceJet",
    "TangentVector",
    "UsageError",
]
