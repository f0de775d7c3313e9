"""compactlab: a spectral laboratory for a degenerate quasilinear
Schrodinger equation and its energy-minimizing compact breather.

Subpackages by capability:

- :mod:`compactlab.spectral`   grids, transforms, Fourier multipliers
- :mod:`compactlab.lp`         dyadic projections and paraproducts
- :mod:`compactlab.norms`      Sobolev / Zhidkov / analytic-strip norms
- :mod:`compactlab.states`     compacton, breather, admissible perturbations
- :mod:`compactlab.coords`     flattening change of variables and velocities
- :mod:`compactlab.solver_x`   evolution in physical coordinates
- :mod:`compactlab.solver_y`   evolution of the flattened regularized system
- :mod:`compactlab.estimates`  ensemble verification of product estimates
- :mod:`compactlab.stability`  orbital-stability distance functional
- :mod:`compactlab.artifacts`  persisted run layout
- :mod:`compactlab.cli`        command-line entry points
"""

from .spectral import Field, Grid

__all__ = ["Field", "Grid"]
__version__ = "0.1.0"
