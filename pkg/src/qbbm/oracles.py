"""Brute-force reference computations used to cross-check the fast paths.

These deliberately avoid the FFT machinery: everything is a plain sum over
integer modes, so agreement with the padded-transform implementations is a
genuine two-route check.
"""

from __future__ import annotations

import numpy as np

from .errors import CostGuard
from .spectral import SpectralField

MAX_DIRECT_MODES = 32


def quintic_direct(field: SpectralField) -> SpectralField:
    """Coefficients of u^5 by the direct quintuple convolution, O(n^4).

    out[k] = L^-4 * sum_{k1..k4 in band} c[k1] c[k2] c[k3] c[k4] c[k - sum],
    with out-of-band fifth modes contributing zero.  Intended for small grids
    (n <= 32) as the oracle for the dealiased product.
    """
    n = field.grid.n
    if n > MAX_DIRECT_MODES:
        raise CostGuard(f"direct convolution is O(n^4); n={n} exceeds {MAX_DIRECT_MODES}")
    c = field.coeffs
    modes = (np.fft.fftfreq(n) * n).astype(np.int64)
    k = modes
    sum4 = (
        k[:, None, None, None]
        + k[None, :, None, None]
        + k[None, None, :, None]
        + k[None, None, None, :]
    )
    P = (
        c[:, None, None, None]
        * c[None, :, None, None]
        * c[None, None, :, None]
        * c[None, None, None, :]
    )
    lo, hi = -n // 2, n // 2 - 1

    def conv_at(total: int) -> complex:
        k5 = total - sum4
        valid = (k5 >= lo) & (k5 <= hi)
        return complex(np.sum(P * np.where(valid, c[k5 % n], 0.0)))

    out = np.array([conv_at(int(kk)) for kk in modes])
    # the +n/2 harmonic folds onto the single retained Nyquist bin
    out[n // 2] += conv_at(n // 2)
    return SpectralField(out / field.grid.length**4, field.grid)
