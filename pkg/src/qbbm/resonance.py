"""Critical-point families of the quintic interaction and their time resonances.

Every space-resonant configuration puts the five interacting frequencies in
{+-eta, +-r(eta)} for a single base frequency eta, so the time-resonance
condition collapses to the one-variable generalized phase

    Phi_{A,B}(eta) = A omega(eta) + B omega(r(eta)) - omega(A eta + B r(eta)),

where A and B are the net multiplicities of eta and r(eta) among the five
slots.  Since the five slot signs sum to an odd integer, A + B is always odd;
pairs with A + B even index no quintic interaction and are rejected.

Root structure on eta > 0, cross-checked here by dense scans:

  * (+-1, 0), (0, +-1)          Phi vanishes identically (line L / curve Gamma)
  * (+-3, 0), (+-5, 0)          only the origin
  * A + B = +-1, |A|+|B| >= 3   root at sqrt(3), the fixed point of r
  * (+-4, -+1)                  a single root eta_0 ~ 7.3415 (isolated point)
  * (+-1, -+4)                  the same isolated point in the reflected
                                chart: Phi_{1,-4}(eta) = Phi_{-4,1}(r(eta)),
                                root r(eta_0) ~ 1.0371
  * everything else             no roots on |eta| > 1

Oddness Phi_{A,B}(-eta) = -Phi_{A,B}(eta) justifies classifying on eta > 0.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import dispersion
from .dispersion import REFLECTION_GUARD, PhasePoint, SQRT3
from .errors import BracketFailure, DomainError, InconsistentClassification

MAX_WEIGHT = 5  # quintic: five interacting slots

# Dense-scan defaults.  Phi tends monotonically to its limit beyond ~10^3
# (omega -> 0, omega(r) -> 1/2), and all roots lie in [sqrt(3), 8].
DEFAULT_ETA_MAX = 1e3
SCAN_POINTS = 100_000
NEAR_ONE_POINTS = 4_000
IDENT_ZERO_SAMPLES = 64
IDENT_ZERO_TOL = 1e-12


class _IdenticallyZeroType:
    """Sentinel returned by find_roots when Phi vanishes identically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "IDENTICALLY_ZERO"


IDENTICALLY_ZERO = _IdenticallyZeroType()


class ResonanceClass(Enum):
    IDENTICALLY_ZERO = "IdenticallyZero"
    ONLY_ORIGIN = "OnlyOrigin"
    SQRT3_ROOTS = "Sqrt3Roots"
    ANOMALOUS_ROOT = "AnomalousRoot"
    NO_ROOTS = "NoRoots"


@dataclass(frozen=True)
class CoeffPair:
    """Net multiplicities (A, B) of eta and r(eta) in a reduced resonance equation."""

    a: int
    b: int

    def __post_init__(self):
        if not (0 < abs(self.a) + abs(self.b) <= MAX_WEIGHT):
            raise DomainError(f"need 0 < |A|+|B| <= {MAX_WEIGHT}, got ({self.a},{self.b})")
        if (self.a + self.b) % 2 == 0:
            raise DomainError(
                f"A+B must be odd (five signed slots), got ({self.a},{self.b})"
            )

    def swapped(self) -> "CoeffPair":
        return CoeffPair(self.b, self.a)

    def __str__(self):
        return f"({self.a},{self.b})"


def all_pairs() -> tuple[CoeffPair, ...]:
    """All valid coefficient pairs, 36 in total."""
    out = []
    for a in range(-MAX_WEIGHT, MAX_WEIGHT + 1):
        for b in range(-MAX_WEIGHT, MAX_WEIGHT + 1):
            if 0 < abs(a) + abs(b) <= MAX_WEIGHT and (a + b) % 2 != 0:
                out.append(CoeffPair(a, b))
    return tuple(out)


@dataclass(frozen=True)
class Classification:
    klass: ResonanceClass
    roots: tuple[float, ...]


@dataclass(frozen=True)
class AnomalousSolution:
    eta0: float
    xi0: float
    residual_phase: float
    residual_constraint: float


def generalized_phase(pair: CoeffPair, eta):
    """Phi_{A,B}(eta); needs |eta| > 1 + guard when B != 0."""
    x = np.asarray(eta, dtype=float)
    if pair.b != 0:
        if np.any(np.abs(x) <= 1.0 + REFLECTION_GUARD):
            raise DomainError(f"Phi_{pair} requires |eta| > 1 + guard")
        r = dispersion.reflect(x)
    else:
        r = np.zeros_like(x)
    val = (
        pair.a * dispersion.omega(x)
        + pair.b * dispersion.omega(r)
        - dispersion.omega(pair.a * x + pair.b * r)
    )
    if np.isscalar(eta) or np.ndim(eta) == 0:
        return float(val)
    return val


def _scan_grid(pair: CoeffPair, eta_max: float) -> np.ndarray:
    lo = 1.0 + 2.0 * REFLECTION_GUARD  # strictly inside the reflect domain
    grid = np.geomspace(lo, eta_max, SCAN_POINTS)
    # linear refinement where r varies fastest
    near_one = np.linspace(lo, min(1.1, eta_max), NEAR_ONE_POINTS)
    parts = [grid, near_one]
    if pair.b == 0:
        # Phi_{A,0} lives on all of R; cover (0, 1] as well.  Below ~1e-8 the
        # subtraction cancels to an exact 0.0 in doubles, so stop at 1e-6
        # (any nonzero root behaves like A(A^2-1) eta^3 near the origin).
        parts.append(np.linspace(1e-6, 1.0, NEAR_ONE_POINTS))
    return np.unique(np.concatenate(parts))


def _bisect(f, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketFailure(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if (hi - lo) <= tol and abs(fmid) <= tol:
            return mid
        if mid == lo or mid == hi:  # interval at floating-point resolution
            return mid
        if flo * fmid <= 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


_IDENT_ZERO_PAIRS = frozenset({(1, 0), (-1, 0), (0, 1), (0, -1)})


def find_roots(pair: CoeffPair, eta_max: float = DEFAULT_ETA_MAX, tol: float = 1e-12):
    """Sign-change roots of Phi_{A,B} on (1+guard, eta_max] (all of R+ for B = 0).

    Each root is refined by bisection to |Phi| <= tol and bracket width <= tol.
    Returns the IDENTICALLY_ZERO sentinel when the 64-point probe finds Phi
    uniformly below 1e-12 *and* the pair is in the analytic identically-zero
    set; a uniformly small Phi for any other pair raises
    InconsistentClassification rather than minting a resonant manifold out of
    floating-point noise.
    """
    if eta_max <= 1.0 + REFLECTION_GUARD:
        raise DomainError("eta_max must exceed 1 + guard")
    if tol <= 0:
        raise DomainError("tol must be positive")
    probe = np.geomspace(1.01, DEFAULT_ETA_MAX, IDENT_ZERO_SAMPLES)
    if np.all(np.abs(generalized_phase(pair, probe)) < IDENT_ZERO_TOL):
        if (pair.a, pair.b) in _IDENT_ZERO_PAIRS:
            return IDENTICALLY_ZERO
        raise InconsistentClassification(
            f"Phi_{pair} is numerically zero at all probe points but the pair "
            "is not in the analytic identically-zero set"
        )
    grid = _scan_grid(pair, eta_max)
    vals = generalized_phase(pair, grid)
    f = lambda e: generalized_phase(pair, e)
    roots: list[float] = []
    exact = np.where(vals == 0.0)[0]
    roots.extend(grid[exact])
    sign = np.sign(vals)
    crossings = np.where(sign[:-1] * sign[1:] < 0)[0]
    for i in crossings:
        roots.append(_bisect(f, grid[i], grid[i + 1], tol))
    roots.sort()
    dedup: list[float] = []
    for r in roots:
        if not dedup or abs(r - dedup[-1]) > max(tol * 10, 1e-11):
            dedup.append(float(r))
    return dedup


_SQRT3_VALUE = 1.7320508075688772

# The sqrt(3) root is a triple zero: r'(sqrt3) = -1 makes Phi'(sqrt3) vanish
# for every A+B = +-1 pair, and the even-order term dies with omega''(sqrt3).
# A sign-change search therefore locates it only to ~(eps/|c3|)^(1/3) ~ 2e-6,
# which bounds how tightly the scan can be asked to agree.
SQRT3_SCAN_TOL = 1e-5


def _predicted(pair: CoeffPair) -> Classification:
    a, b = pair.a, pair.b
    if (a, b) in _IDENT_ZERO_PAIRS:
        return Classification(ResonanceClass.IDENTICALLY_ZERO, ())
    if b == 0 and abs(a) >= 3:
        return Classification(ResonanceClass.ONLY_ORIGIN, (0.0,))
    if abs(a + b) == 1 and abs(a) + abs(b) >= 3:
        return Classification(ResonanceClass.SQRT3_ROOTS, (_SQRT3_VALUE,))
    if (a, b) in ((4, -1), (-4, 1)):
        return Classification(ResonanceClass.ANOMALOUS_ROOT, ())
    if (a, b) in ((1, -4), (-1, 4)):
        # reflected chart of the isolated resonance: root at r(eta_0)
        return Classification(ResonanceClass.ANOMALOUS_ROOT, ())
    return Classification(ResonanceClass.NO_ROOTS, ())


def classify_pair(
    pair: CoeffPair, eta_max: float = DEFAULT_ETA_MAX, tol: float = 1e-12
) -> Classification:
    """Lemma-predicted class of Phi_{A,B}, cross-checked by the dense scan.

    Raises InconsistentClassification on any disagreement between the
    analytic prediction and the scan.
    """
    predicted = _predicted(pair)
    scanned = find_roots(pair, eta_max, tol)
    klass = predicted.klass
    if klass is ResonanceClass.IDENTICALLY_ZERO:
        if scanned is not IDENTICALLY_ZERO:
            raise InconsistentClassification(f"{pair}: expected identically zero")
        return predicted
    if scanned is IDENTICALLY_ZERO:
        raise InconsistentClassification(f"{pair}: unexpectedly identically zero")
    if klass in (ResonanceClass.ONLY_ORIGIN, ResonanceClass.NO_ROOTS):
        if scanned:
            raise InconsistentClassification(
                f"{pair}: predicted {klass.value} but scan found roots {scanned}"
            )
        return predicted
    if klass is ResonanceClass.SQRT3_ROOTS:
        if len(scanned) != 1 or abs(scanned[0] - _SQRT3_VALUE) > SQRT3_SCAN_TOL:
            raise InconsistentClassification(
                f"{pair}: predicted a single root at sqrt(3), scan found {scanned}"
            )
        # stamp the fixed point of r itself; the scan is conditioning-limited
        return Classification(klass, (_SQRT3_VALUE,))
    # anomalous
    if len(scanned) != 1:
        raise InconsistentClassification(
            f"{pair}: predicted one isolated root, scan found {scanned}"
        )
    root = scanned[0]
    primary_chart = abs(pair.a) == 4
    if primary_chart and not root > 2.0:
        raise InconsistentClassification(f"{pair}: isolated root {root} not in (2, inf)")
    if not primary_chart and not 1.0 < root < 2.0:
        raise InconsistentClassification(
            f"{pair}: reflected-chart root {root} not in (1, 2)"
        )
    return Classification(klass, (root,))


# ---------------------------------------------------------------------------
# The isolated resonance point
# ---------------------------------------------------------------------------


def anomalous_equation(eta):
    """H(eta) = 4 omega(eta) - omega(r(eta)) - omega(4 eta - r(eta))."""
    return generalized_phase(CoeffPair(4, -1), eta)


def solve_anomalous(tol: float = 1e-12) -> AnomalousSolution:
    """Positive solution (eta_0, xi_0) of the isolated-resonance system.

    Bisects H on [2, M], growing M until H(M) < 0; H(2) > 0 and H is
    strictly decreasing there, so the bracket is guaranteed.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    lo, hi = 2.0, 16.0
    if not anomalous_equation(lo) > 0:
        raise BracketFailure("H(2) <= 0; dispersion functions are broken")
    while anomalous_equation(hi) >= 0:
        hi *= 2.0
        if hi > 1e12:
            raise BracketFailure("H never becomes negative")
    eta0 = _bisect(anomalous_equation, lo, hi, tol)
    xi0 = 4.0 * eta0 - dispersion.reflect(eta0)
    return AnomalousSolution(
        eta0=eta0,
        xi0=xi0,
        residual_phase=abs(anomalous_equation(eta0)),
        residual_constraint=abs(xi0 - (4.0 * eta0 - dispersion.reflect(eta0))),
    )


@dataclass(frozen=True)
class HShapeReport:
    positive_on_left: bool  # H > 0 on sampled (1, 2]
    strictly_decreasing: bool  # finite differences < 0 on sampled [2, 10^3]
    sign_changes: int  # sign changes counted on [2, 100]
    passed: bool


def verify_H_shape(grid_n: int = 10_000) -> HShapeReport:
    """Dense-scan check of the shape of H used by solve_anomalous."""
    if grid_n < 100:
        raise DomainError("grid_n must be at least 100")
    left = np.linspace(1.0 + 1e-6, 2.0, grid_n)
    positive = bool(np.all(anomalous_equation(left) > 0))
    mid = np.geomspace(2.0, 1e3, grid_n)
    hv = anomalous_equation(mid)
    decreasing = bool(np.all(np.diff(hv) < 0))
    win = np.linspace(2.0, 100.0, grid_n)
    wv = anomalous_equation(win)
    changes = int(np.sum(np.sign(wv[:-1]) * np.sign(wv[1:]) < 0))
    return HShapeReport(positive, decreasing, changes, positive and decreasing and changes == 1)


# ---------------------------------------------------------------------------
# Family enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyConfig:
    """Assignment of the five slots to +-eta / +-r(eta).

    slot_reflected[j] says slot j carries r(eta); slot_signs[j] its sign.
    multiplicity counts the raw (sign, reflection) assignments collapsing to
    this representative under input-slot permutation and the global sign flip.
    """

    slot_signs: tuple[int, int, int, int, int]
    slot_reflected: tuple[bool, bool, bool, bool, bool]
    multiplicity: int = 1

    def pair(self) -> CoeffPair:
        a = sum(s for s, r in zip(self.slot_signs, self.slot_reflected) if not r)
        b = sum(s for s, r in zip(self.slot_signs, self.slot_reflected) if r)
        return CoeffPair(a, b)

    def slot_values(self, eta: float) -> tuple[float, ...]:
        r = dispersion.reflect(eta) if any(self.slot_reflected) else None
        return tuple(
            s * (r if refl else eta)
            for s, refl in zip(self.slot_signs, self.slot_reflected)
        )

    def witness(self, eta: float) -> PhasePoint:
        """Phase point with these slots at base frequency eta (xi = sum of slots)."""
        vals = self.slot_values(eta)
        return PhasePoint(vals[:4], sum(vals))

    def label(self) -> str:
        return " ".join(
            ("+" if s > 0 else "-") + ("r" if refl else "e")
            for s, refl in zip(self.slot_signs, self.slot_reflected)
        )


def _canonical_key(signs, refl):
    head = tuple(sorted(zip(refl[:4], signs[:4])))
    key = (head, (refl[4], signs[4]))
    flipped = (
        tuple(sorted((r, -s) for r, s in head)),
        (refl[4], -signs[4]),
    )
    return min(key, flipped)


def enumerate_families() -> list[tuple[FamilyConfig, CoeffPair]]:
    """All slot assignments, deduplicated by input-slot permutation and the
    global sign flip eta <-> -eta; multiplicity keeps the raw count."""
    groups: dict[tuple, list[tuple]] = {}
    for signs in itertools.product((1, -1), repeat=5):
        for refl in itertools.product((False, True), repeat=5):
            groups.setdefault(_canonical_key(signs, refl), []).append((signs, refl))
    out = []
    for members in groups.values():
        signs, refl = min(members)
        cfg = FamilyConfig(tuple(signs), tuple(refl), multiplicity=len(members))
        out.append((cfg, cfg.pair()))
    out.sort(key=lambda item: (item[1].a, item[1].b, item[0].slot_reflected, item[0].slot_signs))
    return out


def witness_configs() -> dict[CoeffPair, FamilyConfig]:
    """One representative configuration per reachable pair, both orientations.

    enumerate_families quotients by the global sign flip, so each deduplicated
    config witnesses both (A,B) and (-A,-B); the flipped twin is materialized
    here.
    """
    table: dict[CoeffPair, FamilyConfig] = {}
    for cfg, pair in enumerate_families():
        flipped = FamilyConfig(
            tuple(-s for s in cfg.slot_signs), cfg.slot_reflected, cfg.multiplicity
        )
        for candidate, key in ((cfg, pair), (flipped, flipped.pair())):
            best = table.get(key)
            # prefer the least-reflected representative for readability
            if best is None or sum(candidate.slot_reflected) < sum(best.slot_reflected):
                table[key] = candidate
    return table


def pair_multiplicities() -> dict[CoeffPair, int]:
    """Raw assignment counts per pair over all 4^5 slot assignments."""
    counts: dict[CoeffPair, int] = {}
    for signs in itertools.product((1, -1), repeat=5):
        for refl in itertools.product((False, True), repeat=5):
            pair = FamilyConfig(signs, refl).pair()
            counts[pair] = counts.get(pair, 0) + 1
    return counts


def witness_eta(classification: Classification) -> float | None:
    """A base frequency at which the classified resonance can be exhibited."""
    k = classification.klass
    if k is ResonanceClass.IDENTICALLY_ZERO:
        return 2.0
    if k in (ResonanceClass.SQRT3_ROOTS, ResonanceClass.ANOMALOUS_ROOT):
        return classification.roots[0]
    return None


# ---------------------------------------------------------------------------
# Resonant manifolds
# ---------------------------------------------------------------------------

LINE_SIGNS = (-1, 1, 1, 1, 1)  # (sigma_1..sigma_4, sigma_xi)

_MANIFOLD_CHECK_TOL = 1e-10


def line_point(eta: float) -> PhasePoint:
    """(-eta, eta, eta, eta; eta), the canonical point of the resonant line."""
    s = LINE_SIGNS
    return PhasePoint(tuple(si * eta for si in s[:4]), s[4] * eta)


def curve_point(eta: float) -> PhasePoint:
    """(eta, eta, -eta, -r(eta); -r(eta)), the canonical point of the resonant curve."""
    r = dispersion.reflect(eta)
    return PhasePoint((eta, eta, -eta, -r), -r)


def sample_manifold(kind: str, eta_range: tuple[float, float], n: int) -> list[PhasePoint]:
    """n points on the resonant line or curve, each checked to be a full
    space-time resonance (|phase| and all four eta-gradients <= 1e-10)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    lo, hi = float(eta_range[0]), float(eta_range[1])
    if not lo < hi:
        raise DomainError("eta_range must be a nonempty interval")
    kind_l = kind.lower()
    if kind_l == "curve" and lo <= 1.0 + REFLECTION_GUARD:
        raise DomainError("curve parameters must satisfy eta > 1 + guard")
    if kind_l not in ("line", "curve"):
        raise DomainError(f"unknown manifold kind {kind!r}")
    make = line_point if kind_l == "line" else curve_point
    etas = np.linspace(lo, hi, n)
    points = []
    for e in etas:
        p = make(float(e))
        if abs(dispersion.phase(p)) > _MANIFOLD_CHECK_TOL or np.any(
            np.abs(dispersion.phase_gradient(p)[:4]) > _MANIFOLD_CHECK_TOL
        ):
            raise InconsistentClassification(f"manifold point at eta={e} fails checks")
        points.append(p)
    return points


# ---------------------------------------------------------------------------
# Classification table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    pair: CoeffPair
    classification: Classification
    witness: FamilyConfig
    multiplicity: int


def classification_table(
    eta_max: float = DEFAULT_ETA_MAX, tol: float = 1e-12
) -> list[TableRow]:
    """Classify every valid pair, with a witness configuration for each."""
    witnesses = witness_configs()
    counts = pair_multiplicities()
    rows = []
    for pair in sorted(all_pairs(), key=lambda p: (p.a, p.b)):
        rows.append(
            TableRow(
                pair=pair,
                classification=classify_pair(pair, eta_max, tol),
                witness=witnesses[pair],
                multiplicity=counts[pair],
            )
        )
    return rows


def write_classification_csv(rows: list[TableRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["A", "B", "class", "roots", "witness_config", "multiplicity"])
        for row in rows:
            w.writerow(
                [
                    row.pair.a,
                    row.pair.b,
                    row.classification.klass.value,
                    ";".join(repr(r) for r in row.classification.roots),
                    row.witness.label(),
                    row.multiplicity,
                ]
            )
