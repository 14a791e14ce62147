"""Numerical toolkit for unions of two almost orthogonal 2-planes in R^4.

The package is organized by subject:

* ``exterior``  -- 2-vector algebra on R^4 (wedge, inner product, Pluecker test)
* ``grassmann`` -- planes, characteristic angles, projectors, the equality set Xi
* ``bounds``    -- projection-sum bounds and supremum searches
* ``annulus``   -- harmonic-extension Dirichlet energies on planar annuli
* ``surfaces``  -- triangulated surfaces in R^4, areas, shadows, graph bounds
* ``scanner``   -- multiscale flatness scan (dyadic stopping-time process)
* ``plateau``   -- discrete Plateau experiments with projection certificates
* ``cli``       -- command-line front end
"""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError

__all__ = ["ConfigError", "NumericalError", "__version__"]
