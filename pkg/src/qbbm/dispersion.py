"""Scalar functions of the linear theory.

The dispersion relation of the linearized equation u_t - u_xxt + u_x = 0 is

    omega(xi) = xi / (1 + xi^2),

odd and bounded by 1/2.  Its derivative omega' is even and satisfies the
reflection identity omega'(r(xi)) = omega'(xi) with

    r(xi) = sgn(xi) * sqrt((xi^2 + 3) / (xi^2 - 1)),   |xi| > 1,

an involution on |xi| > 1 whose positive fixed point is sqrt(3).  The quintic
interaction phase of a frequency 5-tuple (eta_1..eta_4; xi) is

    phi = -omega(xi) + sum_{j=1..5} omega(eta_j),   eta_5 = xi - sum eta_j.

All functions accept scalars or numpy arrays and are pure; derivatives are
hand-differentiated closed forms, not automatic differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnknownKind

# Rejection band around the r singularity at |xi| = 1; r diverges like
# 2/sqrt(xi - 1) there and loses all precision.
REFLECTION_GUARD = 1e-9

SQRT3 = float(np.sqrt(3.0))


def _match(x, value):
    """Return a float for scalar input, ndarray otherwise."""
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(value)
    return value


def omega(xi):
    """Dispersion relation xi / (1 + xi^2)."""
    x = np.asarray(xi, dtype=float)
    return _match(xi, x / (1.0 + x * x))


def omega_deriv(xi, order: int):
    """Exact derivative of omega of the given order (1, 2 or 3)."""
    x = np.asarray(xi, dtype=float)
    q = 1.0 + x * x
    if order == 1:
        val = (1.0 - x * x) / q**2
    elif order == 2:
        val = 2.0 * x * (x * x - 3.0) / q**3
    elif order == 3:
        val = -6.0 * (x**4 - 6.0 * x * x + 1.0) / q**4
    else:
        raise DomainError(f"derivative order must be 1, 2 or 3, got {order}")
    return _match(xi, val)


def reflect(xi):
    """Group-velocity partner r(xi) = sgn(xi) sqrt((xi^2+3)/(xi^2-1)).

    Defined for |xi| > 1 + REFLECTION_GUARD; an involution with
    omega'(r(xi)) = omega'(xi) and |r(xi)| > 1.
    """
    x = np.asarray(xi, dtype=float)
    if np.any(np.abs(x) <= 1.0 + REFLECTION_GUARD):
        raise DomainError("reflect requires |xi| > 1 + guard band")
    val = np.sign(x) * np.sqrt((x * x + 3.0) / (x * x - 1.0))
    return _match(xi, val)


@dataclass(frozen=True)
class PhasePoint:
    """Interaction point (eta_1..eta_4; xi); eta_5 is always derived."""

    eta: tuple[float, float, float, float]
    xi: float

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(float(e) for e in self.eta))
        object.__setattr__(self, "xi", float(self.xi))
        if len(self.eta) != 4:
            raise DomainError("PhasePoint needs exactly four input frequencies")

    @property
    def eta5(self) -> float:
        return self.xi - sum(self.eta)

    @property
    def slots(self) -> tuple[float, float, float, float, float]:
        """The five interacting frequencies (eta_1..eta_5)."""
        return self.eta + (self.eta5,)


def phase_point(e1, e2, e3, e4, xi) -> PhasePoint:
    return PhasePoint((e1, e2, e3, e4), xi)


def phase(p: PhasePoint) -> float:
    """Interaction phase phi = -omega(xi) + sum_j omega(eta_j)."""
    return float(-omega(p.xi) + sum(omega(e) for e in p.slots))


def phase_gradient(p: PhasePoint) -> np.ndarray:
    """Gradient (d/deta_1..d/deta_4, d/dxi) of the phase.

    d(phi)/d(eta_j) = omega'(eta_j) - omega'(eta_5)
    d(phi)/d(xi)    = -omega'(xi) + omega'(eta_5)
    """
    d5 = omega_deriv(p.eta5, 1)
    g = [omega_deriv(e, 1) - d5 for e in p.eta]
    g.append(-omega_deriv(p.xi, 1) + d5)
    return np.array(g)


# ---------------------------------------------------------------------------
# Local Taylor models of the phase near the resonance sets
# ---------------------------------------------------------------------------

KIND_ANOMALOUS = "anomalous"
KIND_DEGENERATE_ORIGIN = "degenerate_origin"
KIND_NONDEGENERATE_SQRT3 = "nondegenerate_sqrt3"
KIND_RESONANT_LINE = "resonant_line"

# Truncation order of each local model; the remainder is O(dev^(order+1)).
TAYLOR_ORDER = {
    KIND_ANOMALOUS: 2,
    KIND_DEGENERATE_ORIGIN: 3,
    KIND_NONDEGENERATE_SQRT3: 3,
    KIND_RESONANT_LINE: 2,
}


@dataclass(frozen=True)
class TaylorModelKind:
    """A local polynomial model of the phase at a resonance base point.

    signs holds (sigma_1..sigma_4, sigma_xi) for the sign-pattern kinds and
    None otherwise; the implied fifth sign is sigma_xi - sum(sigma_j).
    """

    kind: str
    basepoint: PhasePoint
    signs: tuple[int, int, int, int, int] | None = None

    @property
    def order(self) -> int:
        try:
            return TAYLOR_ORDER[self.kind]
        except KeyError:
            raise UnknownKind(f"unknown Taylor model kind {self.kind!r}") from None


def _check_signs(signs) -> tuple[int, ...]:
    signs = tuple(int(s) for s in signs)
    if len(signs) != 5 or any(s not in (-1, 1) for s in signs):
        raise DomainError("signs must be five values in {+1,-1}")
    if signs[4] - sum(signs[:4]) not in (-1, 1):
        raise DomainError("sign pattern must satisfy sigma_xi - sum(sigma_j) = +-1")
    return signs


def anomalous_model(eta0: float) -> TaylorModelKind:
    """Second-order model at the isolated resonance (eta0,..,eta0; 4 eta0 - r(eta0))."""
    xi0 = 4.0 * eta0 - reflect(eta0)
    bp = PhasePoint((eta0,) * 4, xi0)
    return TaylorModelKind(KIND_ANOMALOUS, bp)


def origin_model() -> TaylorModelKind:
    """Third-order model at the degenerate resonance point at the origin."""
    return TaylorModelKind(KIND_DEGENERATE_ORIGIN, PhasePoint((0.0,) * 4, 0.0))


def sqrt3_model(signs) -> TaylorModelKind:
    """Third-order model at a sign-permutation point with |eta_j| = sqrt(3)."""
    signs = _check_signs(signs)
    bp = PhasePoint(tuple(s * SQRT3 for s in signs[:4]), signs[4] * SQRT3)
    return TaylorModelKind(KIND_NONDEGENERATE_SQRT3, bp, signs)


def line_model(eta: float, signs) -> TaylorModelKind:
    """Second-order model at a point of the resonant line with parameter eta."""
    signs = _check_signs(signs)
    bp = PhasePoint(tuple(s * float(eta) for s in signs[:4]), signs[4] * float(eta))
    return TaylorModelKind(KIND_RESONANT_LINE, bp, signs)


def _slot_bases(model: TaylorModelKind) -> tuple[np.ndarray, float]:
    bp = model.basepoint
    return np.array(bp.slots), bp.xi


def taylor_model(model: TaylorModelKind, p: PhasePoint) -> float:
    """Evaluate the truncated expansion of the phase at p.

    The phase is a sum of one-variable compositions omega(linear in
    (eta_1..eta_4, xi)), so its order-m term splits per slot:

        (1/m!) [ sum_j omega^(m)(b_j) d_j^m + omega^(m)(b_5) d_5^m
                 - omega^(m)(b_xi) d_xi^m ]

    with d_5 = d_xi - sum d_j.  Contract: |phase(p) - taylor_model(model, p)|
    = O(dev^(order+1)) for p within the caller's chosen radius.
    """
    order = model.order  # raises UnknownKind for bad kinds
    bases, bxi = _slot_bases(model)
    devs = np.array(p.slots) - bases
    dxi = p.xi - bxi
    total = 0.0
    fact = 1.0
    for m in range(order + 1):
        if m == 0:
            slot_val = omega(bases)
            xi_val = omega(bxi)
        else:
            fact *= m
            slot_val = omega_deriv(bases, m)
            xi_val = omega_deriv(bxi, m)
        total += (np.sum(slot_val * devs**m) - xi_val * dxi**m) / fact
    return float(total)


@dataclass(frozen=True)
class TaylorCoefficients:
    """Expansion coefficients in the independent variables (eta_1..eta_4, xi).

    cubic_slots are the per-slot third-order weights omega'''(b)/6 in the
    order (eta_1..eta_4, eta_5, xi); the xi entry already carries its minus
    sign.  Only filled for order-3 kinds.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    cubic_slots: np.ndarray | None


def taylor_coefficients(model: TaylorModelKind) -> TaylorCoefficients:
    """Expose the model's coefficient arrays for inspection."""
    order = model.order
    bases, bxi = _slot_bases(model)
    b5 = bases[4]
    value = float(np.sum(omega(bases)) - omega(bxi))
    d1 = omega_deriv(bases, 1)
    grad = np.empty(5)
    grad[:4] = d1[:4] - d1[4]
    grad[4] = d1[4] - omega_deriv(bxi, 1)
    d2 = omega_deriv(bases, 2)
    hess = np.full((5, 5), d2[4])
    hess[:4, :4] += np.diag(d2[:4])
    hess[:4, 4] = -d2[4]
    hess[4, :4] = -d2[4]
    hess[4, 4] = d2[4] - omega_deriv(bxi, 2)
    cubic = None
    if order >= 3:
        cubic = np.empty(6)
        cubic[:5] = omega_deriv(bases, 3) / 6.0
        cubic[5] = -omega_deriv(bxi, 3) / 6.0
    return TaylorCoefficients(value, grad, hess, cubic)
