"""Numerical toolkit for the quintic BBM equation u_t - u_xxt + (u + u^5)_x = 0.

Subpackages:

* ``dispersion``  -- exact scalar functions of the linear theory
* ``resonance``   -- interaction-phase root classification and manifolds
* ``spectral``    -- periodic grids, transforms, dyadic projections, free flow
* ``solver``      -- dealiased pseudospectral time integration in profile form
* ``diagnostics`` -- decay fits, scattering measurement, integral-equation oracle
* ``verify``      -- the end-to-end verification suite
* ``cli``         -- command-line interface
"""

__version__ = "0.1.0"
