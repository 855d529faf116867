"""Trajectory diagnostics: decay fits, scattering measurement, integral oracle.

The integral-equation oracle re-derives the profile at a check time from the
interaction-picture representation

    c(t, xi) = c(1, xi) - i omega(xi) L^-4 *
               int_1^t sum_{k1..k4} e^{-i tau phi} prod_j c(tau, eta_kj) dtau,

with eta_5 = xi - sum eta_j, the sum running over the retained modes of a
coarse grid and the time integral done by the trapezoid rule over stored
snapshots.  It shares no transform machinery with the solver (plain nested
mode sums), which is what makes the comparison meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import dispersion, spectral
from .errors import CostGuard, DomainError, InsufficientData, InsufficientSpan
from .solver import SolverState, Trajectory
from .spectral import SpectralField, make_grid

# exit-code contract for assertion-mode CLI commands
EXIT_PASS = 0
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

# artifact-defined acceptance bars (the underlying constants are implicit);
# both are overridable parameters of the corresponding checks
SCATTER_CONTRACTION_BAR = 1.5
BOOTSTRAP_GROWTH_BAR = 3.0

MAX_ORACLE_MODES = 32


@dataclass(frozen=True)
class DecayReport:
    times: tuple[float, ...]
    sup_norms: tuple[float, ...]
    fitted_exponent: float
    fit_window: tuple[float, float]
    residual: float  # rms log-log residual


def fit_decay(times, sup_norms, window: tuple[float, float]) -> DecayReport:
    """Least-squares slope of log sup-norm against log t over the window."""
    t = np.asarray(times, dtype=float)
    s = np.asarray(sup_norms, dtype=float)
    lo, hi = float(window[0]), float(window[1])
    mask = (t >= lo) & (t <= hi)
    if np.count_nonzero(mask) < 8:
        raise InsufficientData(f"need >= 8 samples in [{lo}, {hi}]")
    if np.any(s[mask] <= 0):
        raise InsufficientData("sup-norms in the window must be positive")
    lt, ls = np.log(t[mask]), np.log(s[mask])
    slope, intercept = np.polyfit(lt, ls, 1)
    resid = ls - (slope * lt + intercept)
    return DecayReport(
        times=tuple(map(float, t[mask])),
        sup_norms=tuple(map(float, s[mask])),
        fitted_exponent=float(slope),
        fit_window=(lo, hi),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


# ---------------------------------------------------------------------------
# Scattering measurement
# ---------------------------------------------------------------------------


def h1_xi_norm(field: SpectralField) -> float:
    """|| . ||_{H^1_xi} of the coefficient function: L2 plus its xi-derivative."""
    return math.sqrt(spectral.l2_fourier(field) ** 2 + spectral.dxi_l2(field) ** 2)


@dataclass(frozen=True)
class ScatterReport:
    dyadic_times: tuple[float, ...]
    h1_differences: tuple[float, ...]
    hs_differences: tuple[float, ...]
    contraction_ratios: tuple[float, ...]
    strictly_decreasing: bool
    min_ratio: float


def scatter_cauchy(trajectory: Trajectory, base_t: float, levels: int,
                   s: float = spectral.DEFAULT_SOBOLEV_S) -> ScatterReport:
    """Dyadic profile differences ||c(2t) - c(t)|| at t = base_t * 2^i.

    contraction_ratios[i] = differences[i] / differences[i+1]; a convergent
    profile makes these exceed 1 with a geometric margin.
    """
    if levels < 2:
        raise InsufficientSpan("need at least two dyadic levels")
    t0, t1 = trajectory.span()
    if base_t < t0 or base_t * 2**levels > t1 + trajectory.config.dt / 2:
        raise InsufficientSpan(
            f"trajectory [{t0}, {t1}] does not span [{base_t}, {base_t * 2 ** levels}]"
        )
    ts = [base_t * 2**i for i in range(levels + 1)]
    snaps = [trajectory.profile_at(t) for t in ts]
    diffs = []
    hs_diffs = []
    for a, b in zip(snaps[:-1], snaps[1:]):
        d = SpectralField(b.coeffs - a.coeffs, trajectory.grid)
        diffs.append(h1_xi_norm(d))
        hs_diffs.append(spectral.hs_norm(d, s))
    ratios = tuple(
        diffs[i] / diffs[i + 1] if diffs[i + 1] > 0 else math.inf
        for i in range(len(diffs) - 1)
    )
    return ScatterReport(
        dyadic_times=tuple(ts[:-1]),
        h1_differences=tuple(diffs),
        hs_differences=tuple(hs_diffs),
        contraction_ratios=ratios,
        strictly_decreasing=all(a > b for a, b in zip(diffs[:-1], diffs[1:])),
        min_ratio=min(ratios) if ratios else math.inf,
    )


def scatter_report_json(report: ScatterReport, path) -> None:
    payload = {
        "dyadic_times": list(report.dyadic_times),
        "h1_differences": list(report.h1_differences),
        "hs_differences": list(report.hs_differences),
        "contraction_ratios": list(report.contraction_ratios),
        "strictly_decreasing": report.strictly_decreasing,
        "min_ratio": report.min_ratio,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Bootstrap-style norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapNorms:
    t: float
    linf_fourier: float
    weighted_l2: float
    hs: float

    def as_array(self) -> np.ndarray:
        return np.array([self.linf_fourier, self.weighted_l2, self.hs])


def bootstrap_norms(state: SolverState, s: float = spectral.DEFAULT_SOBOLEV_S) -> BootstrapNorms:
    """sup |c|, ||x f||_L2 and ||f||_Hs of the profile field f."""
    return BootstrapNorms(
        t=state.t,
        linf_fourier=spectral.linf_fourier(state.profile),
        weighted_l2=spectral.weighted_l2(state.profile),
        hs=spectral.hs_norm(state.profile, s),
    )


# ---------------------------------------------------------------------------
# Integral-equation oracle
# ---------------------------------------------------------------------------

DEFAULT_ORACLE_BINS = (1, 2, 3, 5, 8)


def _truncate_to(field: SpectralField, coarse: spectral.Grid) -> np.ndarray:
    """Spectral restriction onto the coarse grid's retained modes."""
    n, m = coarse.n, field.grid.n
    if m == n:
        return field.coeffs.copy()
    h = n // 2
    out = np.empty(n, dtype=complex)
    out[:h] = field.coeffs[:h]
    out[h:] = field.coeffs[m - h:]
    return out


@dataclass(frozen=True)
class _OracleTables:
    sum4: np.ndarray  # integer mode sums k1+k2+k3+k4, shape (n,n,n,n)
    modes: np.ndarray  # fft-ordered integer modes
    offset: int
    table_size: int


def _oracle_tables(n: int) -> _OracleTables:
    modes = (np.fft.fftfreq(n) * n).astype(np.int64)
    k = modes
    sum4 = (
        k[:, None, None, None]
        + k[None, :, None, None]
        + k[None, None, :, None]
        + k[None, None, None, :]
    )
    offset = 2 * n + 8
    return _OracleTables(sum4, modes, offset, 4 * n + 17)


def duhamel_series(
    trajectory: Trajectory,
    t_check: float,
    coarse_n: int = 32,
    bins=DEFAULT_ORACLE_BINS,
    stride: int = 1,
):
    """Tendency samples G(tau, xi_i) of the interaction-picture integrand.

    Returns (times, start_coeffs, end_coeffs, G) where G has shape
    (len(times), len(bins)).  Plain mode sums, no FFTs.
    """
    if coarse_n > MAX_ORACLE_MODES:
        raise CostGuard(f"coarse_n={coarse_n} exceeds the O(n^4) budget ({MAX_ORACLE_MODES})")
    if stride < 1:
        raise DomainError("stride must be >= 1")
    t0, t1 = trajectory.span()
    if not (t0 <= t_check <= t1 + trajectory.config.dt / 2):
        raise InsufficientSpan(f"t_check={t_check} outside trajectory span")
    coarse = make_grid(coarse_n, trajectory.config.length)
    i_end = int(np.argmin(np.abs(trajectory.times - t_check)))
    idxs = list(range(0, i_end + 1, stride))
    if idxs[-1] != i_end:
        idxs.append(i_end)
    times = trajectory.times[idxs]
    coeffs = [_truncate_to(trajectory.profiles[i], coarse) for i in idxs]

    tabs = _oracle_tables(coarse_n)
    L = coarse.length
    xi_of = lambda k: 2.0 * math.pi * np.asarray(k, dtype=float) / L
    bins = [int(b) for b in bins]
    gathers = []
    for b in bins:
        k5 = b - tabs.sum4
        valid = (k5 >= -coarse_n // 2) & (k5 <= coarse_n // 2 - 1)
        gathers.append((np.where(valid, k5 + tabs.offset, 0), valid))

    all_k = np.arange(-tabs.offset, tabs.table_size - tabs.offset)
    in_band = (all_k >= -coarse_n // 2) & (all_k <= coarse_n // 2 - 1)
    omega_all = dispersion.omega(xi_of(all_k))
    omega_modes = dispersion.omega(xi_of(tabs.modes))

    G = np.zeros((len(times), len(bins)), dtype=complex)
    for row, (tau, c) in enumerate(zip(times, coeffs)):
        A = np.exp(-1j * tau * omega_modes) * c
        P = (
            A[:, None, None, None]
            * A[None, :, None, None]
            * A[None, None, :, None]
            * A[None, None, None, :]
        )
        table = np.zeros(tabs.table_size, dtype=complex)
        table[in_band] = np.exp(-1j * tau * omega_all[in_band]) * c[all_k[in_band] % coarse_n]
        for col, (b, (gi, valid)) in enumerate(zip(bins, gathers)):
            tot = np.sum(P * np.where(valid, table[gi], 0.0))
            xi_b = xi_of(b)
            G[row, col] = (
                -1j * dispersion.omega(xi_b) * np.exp(1j * tau * dispersion.omega(xi_b))
                * tot / L**4
            )
    start = np.array([coeffs[0][b] for b in bins])
    end = np.array([coeffs[-1][b] for b in bins])
    return np.asarray(times, dtype=float), start, end, G


def duhamel_residual(
    trajectory: Trajectory,
    t_check: float,
    coarse_n: int = 32,
    bins=DEFAULT_ORACLE_BINS,
    stride: int = 1,
) -> float:
    """Max relative deviation between the quadrature oracle and the stored
    profile at t_check, over the sampled output frequencies."""
    times, start, end, G = duhamel_series(trajectory, t_check, coarse_n, bins, stride)
    integral = np.trapezoid(G, times, axis=0)
    predicted = start + integral
    dev = np.abs(predicted - end)
    scale = np.abs(end)
    rel = np.where(scale > 0, dev / np.where(scale > 0, scale, 1.0), dev)
    return float(rel.max())
