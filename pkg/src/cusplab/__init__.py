"""Desk-scale numerical lab for cusp-funnel warped products.

Modules: geometry (warp profiles, curvature), geodesics (classical flow),
specfun (complex-order Bessel), cylinder (exact mode kernels), operators
(complex-scaled model operators and strip sweeps), resonances (Wronskian
shooting, counting, oracles), gluing (three-model parametrix), smoothing
(Schrodinger evolution, local smoothing ratios), cli (orchestration).
"""

__version__ = "0.1.0"

from . import (cli, cylinder, geodesics, geometry, gluing, operators,
               resonances, smoothing, specfun, util)  # noqa: F401
