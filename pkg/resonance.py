import logging
import math
from enum import Enum
from typing import Callable, List, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize

import config as settings
from junction import (
    BoundaryTag,
    InvalidParameter,
    JunctionParams,
    ZERO_LENGTH,
    classify_junction,
)
from scattering_double import DoubleConfig, transmission_deficit
from scattering_single import (
    difference_factor,
    even_factor,
    perfect_transmission_wavenumber,
    t1,
)

logger = logging.getLogger(__name__)

ROOT_TOLERANCE = 1e-8
LATTICE_TOLERANCE = 1e-10
BISECTION_XTOL = 1e-12
TANGENCY_THRESHOLD = 1e-10
MERGE_DISTANCE = 1e-9
MIN_GRID_POINTS = 2048


class ResonanceError(Exception):
    """Custom exception for resonance analysis errors"""
    pass


class NotApplicable(ResonanceError):
    """The configuration is outside the regime the requested solver handles"""
    pass


class NoCandidate(ResonanceError):
    """The incidental-resonance formula has a vanishing denominator"""
    pass


class SingularPeak(ResonanceError):
    """The peak-width formula is singular (1 + k²L⁺L⁻ = 0 at a lattice wavenumber)"""
    pass


class RelationTag(str, Enum):
    SYMMETRIC_SAME = "SymmetricSame"
    SYMMETRIC_SWAPPED = "SymmetricSwapped"
    ANTI_SAME = "AntiSame"
    ANTI_SWAPPED = "AntiSwapped"
    NONE = "None"


SYMMETRIC_TAGS = frozenset({RelationTag.SYMMETRIC_SAME, RelationTag.SYMMETRIC_SWAPPED})
ANTI_TAGS = frozenset({RelationTag.ANTI_SAME, RelationTag.ANTI_SWAPPED})


class RootKind(str, Enum):
    TAN_CONDITION = "TanCondition"
    SIN_CONDITION = "SinCondition"
    INVERSE_SQRT = "InverseSqrt"
    INCIDENTAL = "Incidental"


class RelationClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: RelationTag

    @property
    def is_symmetric(self) -> bool:
        return self.tag in SYMMETRIC_TAGS

    @property
    def is_anti(self) -> bool:
        return self.tag in ANTI_TAGS


class ResonanceMatrix(BaseModel):
    """
    Real coefficients of the two perfect-transmission conditions

        r1 = M₁₁ sin ka + M₁₂ cos ka = 0
        r2 = M₂₁ sin ka + M₂₂ cos ka = 0
    """
    model_config = ConfigDict(frozen=True)

    k: float
    m11: float
    m12: float
    m21: float
    m22: float

    @property
    def scale(self) -> float:
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))

    @property
    def determinant(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def residuals(self, a: float) -> Tuple[float, float]:
        s, c = math.sin(self.k * a), math.cos(self.k * a)
        return self.m11 * s + self.m12 * c, self.m21 * s + self.m22 * c

    def normalized_residuals(self, a: float) -> Tuple[float, float]:
        r1, r2 = self.residuals(a)
        scale = self.scale or 1.0
        return r1 / scale, r2 / scale


class QuarticCoefficients(BaseModel):
    """α, β, γ of the solvability condition αk⁴ + 2βk² + γ = 0"""
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    gamma: float

    @property
    def scale(self) -> float:
        return max(abs(self.alpha), abs(self.beta), abs(self.gamma))

    def evaluate(self, k: float) -> float:
        x = k * k
        return self.alpha * x * x + 2.0 * self.beta * x + self.gamma

    def vanishes(self, tolerance: float) -> bool:
        return self.scale <= tolerance

    def positive_roots(self) -> List[float]:
        """Positive k solving the quartic, ascending; empty when it vanishes identically."""
        if self.scale == 0.0:
            return []
        # quadratic in x = k²; β² − αγ ≥ 0 always, so imaginary parts are roundoff
        candidates = np.roots([self.alpha, 2.0 * self.beta, self.gamma])
        roots = set()
        for x in candidates:
            if abs(x.imag) > 1e-9 * (1.0 + abs(x.real)):
                continue
            if x.real > 0.0:
                roots.add(math.sqrt(x.real))
        return sorted(roots)


class ResonanceRoot(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: float
    kind: RootKind
    residual: float
    tangent: bool = False


class IncidentalCandidate(BaseModel):
    """A quartic root outside the relation classes, checked against T2 at the given a"""
    model_config = ConfigDict(frozen=True)

    k: float
    verified: bool
    residual: float
    separations: List[float] = []


class PeakWidth(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    k_n: float
    w: float


class ResonanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    relation: RelationClass
    quartic: Optional[QuarticCoefficients] = None
    roots: List[ResonanceRoot] = []
    incidental: List[IncidentalCandidate] = []


def _finite_lengths(config: DoubleConfig) -> Tuple[float, float, float, float]:
    if not config.is_finite:
        raise InvalidParameter("Resonance coefficients require finite lengths")
    return config.lengths()


def _require_positive(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameter(f"{name} must be positive and finite, got {value}")
    return value


def _matrix_entries(lengths, k):
    l1p, l1m, l2p, l2m = lengths
    p1, p2 = l1p * l1m, l2p * l2m
    s1, s2 = l1p + l1m, l2p + l2m

    m11 = 2.0 * (1.0 - k ** 4 * p1 * p2)
    m12 = -k * (s1 + s2) - k ** 3 * (p1 * s2 + p2 * s1)
    m21 = k * (s1 - s2) - k ** 3 * (p1 * s2 - p2 * s1)
    m22 = -2.0 * k ** 2 * (p1 - p2)
    return m11, m12, m21, m22


def resonance_matrix(config: DoubleConfig, k: float) -> ResonanceMatrix:
    """
    M-matrix of the perfect-transmission conditions at wavenumber k.

    T2(k) = 1 exactly when both residuals r1 and r2 vanish. Expanded in the
    four lengths:

        M₁₁ = 2(1 − k⁴L₁⁺L₁⁻L₂⁺L₂⁻)
        M₁₂ = −k(L₁⁺ + L₁⁻ + L₂⁺ + L₂⁻) − k³(L₁⁺L₁⁻(L₂⁺ + L₂⁻) + L₂⁺L₂⁻(L₁⁺ + L₁⁻))
        M₂₁ = k(L₁⁺ + L₁⁻ − L₂⁺ − L₂⁻) − k³(L₁⁺L₁⁻(L₂⁺ + L₂⁻) − L₂⁺L₂⁻(L₁⁺ + L₁⁻))
        M₂₂ = −2k²(L₁⁺L₁⁻ − L₂⁺L₂⁻)

    Raises:
        InvalidParameter: Infinite lengths or a bad wavenumber.
    """
    k = _require_positive("k", k)
    m11, m12, m21, m22 = _matrix_entries(_finite_lengths(config), k)
    return ResonanceMatrix(k=k, m11=m11, m12=m12, m21=m21, m22=m22)


def resonance_residual_grid(config: DoubleConfig, ks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised (r1, r2), each normalised by max|M| at its own k."""
    ks = np.asarray(ks, dtype=float)
    m11, m12, m21, m22 = _matrix_entries(_finite_lengths(config), ks)
    s, c = np.sin(ks * config.a), np.cos(ks * config.a)

    scale = np.maximum.reduce([np.abs(m11), np.abs(m12), np.abs(m21), np.abs(m22)])
    scale = np.where(scale > 0.0, scale, 1.0)
    return (m11 * s + m12 * c) / scale, (m21 * s + m22 * c) / scale


def quartic_coefficients(config: DoubleConfig) -> QuarticCoefficients:
    """
    Coefficients of αk⁴ + 2βk² + γ = 0, the condition det M = 0.

    With dⱼ = Lⱼ⁺ − Lⱼ⁻ and Pⱼ = Lⱼ⁺Lⱼ⁻:

        α = d₁²P₂² − d₂²P₁²,  β = d₁²P₂ − d₂²P₁,  γ = d₁² − d₂²

    and det M = k²(αk⁴ + 2βk² + γ) exactly.

    Raises:
        InvalidParameter: Infinite lengths.
    """
    l1p, l1m, l2p, l2m = _finite_lengths(config)
    d1, d2 = l1p - l1m, l2p - l2m
    p1, p2 = l1p * l1m, l2p * l2m

    return QuarticCoefficients(
        alpha=d1 ** 2 * p2 ** 2 - d2 ** 2 * p1 ** 2,
        beta=d1 ** 2 * p2 - d2 ** 2 * p1,
        gamma=d1 ** 2 - d2 ** 2,
    )


def relation_memberships(config: DoubleConfig) -> Set[RelationTag]:
    """Every relation the pair satisfies; a pair with L₁⁺ + L₁⁻ = 0 can satisfy several."""
    l1p, l1m = config.j1.l_plus, config.j1.l_minus
    l2p, l2m = config.j2.l_plus, config.j2.l_minus

    memberships = set()
    if l2p.matches(l1p) and l2m.matches(l1m):
        memberships.add(RelationTag.SYMMETRIC_SAME)
    if l2p.matches(l1m) and l2m.matches(l1p):
        memberships.add(RelationTag.SYMMETRIC_SWAPPED)
    if l2p.matches(l1p.negated()) and l2m.matches(l1m.negated()):
        memberships.add(RelationTag.ANTI_SAME)
    if l2p.matches(l1m.negated()) and l2m.matches(l1p.negated()):
        memberships.add(RelationTag.ANTI_SWAPPED)
    return memberships


def classify_relation(config: DoubleConfig) -> RelationClass:
    """
    Name the universal-resonance relation between the two junctions.

    The four relations (L₂⁺, L₂⁻) = ±(L₁⁺, L₁⁻) or ±(L₁⁻, L₁⁺) are exactly the
    parameter sets where α = β = γ = 0 and perfect transmission happens at
    infinitely many k. Ties are broken in the order SymmetricSame,
    SymmetricSwapped, AntiSame, AntiSwapped.
    """
    memberships = relation_memberships(config)
    for tag in (RelationTag.SYMMETRIC_SAME, RelationTag.SYMMETRIC_SWAPPED,
                RelationTag.ANTI_SAME, RelationTag.ANTI_SWAPPED):
        if tag in memberships:
            return RelationClass(tag=tag)
    return RelationClass(tag=RelationTag.NONE)


def tan_condition_residual(j1: JunctionParams, a: float) -> Callable:
    """
    Pole-free form of tan ka = f(k), normalised to [−1, 1].

    g(k) = (1 − k²L⁺L⁻) sin ka − k(L⁺ + L⁻) cos ka, evaluated homogeneously
    and divided by |(1 + ikL⁺)(1 + ikL⁻)|. Accepts scalars or arrays.
    """
    p_plus, q_plus = j1.l_plus.p, j1.l_plus.q
    p_minus, q_minus = j1.l_minus.p, j1.l_minus.q

    def residual(k):
        numerator = ((q_plus * q_minus - k * k * p_plus * p_minus) * np.sin(k * a)
                     - k * (p_plus * q_minus + p_minus * q_plus) * np.cos(k * a))
        norm = np.sqrt((q_plus ** 2 + (k * p_plus) ** 2) * (q_minus ** 2 + (k * p_minus) ** 2))
        return numerator / norm

    return residual


def tan_condition_curves(j1: JunctionParams, a: float, ks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Both sides of tan ka = f(k) on a grid, for plotting; poles come out as ±inf or large values."""
    ks = np.asarray(ks, dtype=float)
    l_plus, l_minus = j1.l_plus.value, j1.l_minus.value
    with np.errstate(divide="ignore", invalid="ignore"):
        f = ks * (l_plus + l_minus) / (1.0 - ks ** 2 * l_plus * l_minus)
    return np.tan(ks * a), f


def _bracketing_grid(j1: JunctionParams, a: float, k_max: float) -> np.ndarray:
    length_scale = max(
        (abs(length.value) for length in (j1.l_plus, j1.l_minus) if length.is_finite and length.p != 0.0),
        default=0.0,
    )
    # min(π/(8a), π/(8·max|L|·k_max)), never coarser than π/(8·max|L|) when k_max < 1
    step = math.pi / (8.0 * a)
    if length_scale > 0.0:
        step = min(step, math.pi / (8.0 * length_scale * max(1.0, k_max)))
    step *= 0.5

    points = int(math.ceil(k_max / step))
    if points > settings.MAX_GRID_POINTS:
        logger.warning(f"Bracketing grid capped at {settings.MAX_GRID_POINTS} points (step {step:.3e} requested)")
    points = min(max(points, MIN_GRID_POINTS), settings.MAX_GRID_POINTS)

    uniform = np.linspace(0.0, k_max, points + 1)[1:]
    # geometric refinement near k = 0, where atan(kL) turns over for large |L|
    near_zero = np.geomspace(k_max * 1e-9, uniform[0], 64)
    return np.unique(np.concatenate([near_zero, uniform]))


def _grid_roots(func: Callable, ks: np.ndarray) -> List[Tuple[float, bool]]:
    """Sign-change brackets refined by bisection, plus tangential zeros; (k, tangent) pairs."""
    values = func(ks)
    found: List[Tuple[float, bool]] = []

    for i in np.nonzero(values == 0.0)[0]:
        found.append((float(ks[i]), False))

    for i in np.nonzero(values[:-1] * values[1:] < 0.0)[0]:
        root = optimize.bisect(func, ks[i], ks[i + 1], xtol=BISECTION_XTOL, maxiter=200)
        found.append((float(root), False))

    # touching zeros: a local minimum of |g| with no sign change on either side
    magnitude = np.abs(values)
    for i in range(1, len(ks) - 1):
        if magnitude[i] == 0.0 or magnitude[i] > 1e-3:
            continue
        if magnitude[i] > magnitude[i - 1] or magnitude[i] > magnitude[i + 1]:
            continue
        if values[i - 1] * values[i] < 0.0 or values[i] * values[i + 1] < 0.0:
            continue
        result = optimize.minimize_scalar(
            lambda k: abs(func(k)),
            bounds=(ks[i - 1], ks[i + 1]),
            method="bounded",
            options={"xatol": BISECTION_XTOL},
        )
        if result.fun < TANGENCY_THRESHOLD:
            logger.debug(f"Tangential zero near k={result.x}")
            found.append((float(result.x), True))

    return found


def _merge_roots(candidates: List[ResonanceRoot]) -> List[ResonanceRoot]:
    merged: List[ResonanceRoot] = []
    for root in sorted(candidates, key=lambda r: r.k):
        if merged and root.k - merged[-1].k <= MERGE_DISTANCE:
            previous = merged[-1]
            # two solution families meeting at one k form a double root
            kind = previous.kind if previous.kind != RootKind.INVERSE_SQRT else root.kind
            merged[-1] = ResonanceRoot(
                k=previous.k,
                kind=kind,
                residual=min(previous.residual, root.residual),
                tangent=True,
            )
            continue
        merged.append(root)
    return merged


def _verified(config: DoubleConfig, roots: List[ResonanceRoot], tolerance: float) -> List[ResonanceRoot]:
    kept = []
    for root in roots:
        residual = transmission_deficit(config, root.k)
        if residual <= tolerance:
            kept.append(root.model_copy(update={"residual": residual}))
        else:
            logger.warning(f"Dropping k={root.k} ({root.kind.value}): 1 - T2 = {residual:.3e}")
    return kept


def _check_regime(j1: JunctionParams, j2: Optional[JunctionParams], a: float,
                  allowed: frozenset, label: str) -> DoubleConfig:
    config = DoubleConfig(j1=j1, j2=j2, a=a)
    if not (relation_memberships(config) & allowed):
        relation = classify_relation(config).tag.value
        raise NotApplicable(f"{label} solver does not apply to relation {relation}")
    return config


def resonance_roots_case_i(j1: JunctionParams, a: float, k_max: float,
                           j2: Optional[JunctionParams] = None) -> List[ResonanceRoot]:
    """
    Perfect-transmission wavenumbers for the symmetric relations.

    When (L₂⁺, L₂⁻) = (L₁⁺, L₁⁻) or (L₁⁻, L₁⁺), T2 = 1 exactly where

        (1 + k²L⁺L⁻)·[(1 − k²L⁺L⁻) sin ka − k(L⁺ + L⁻) cos ka] = 0

    The bracket factor is the pole-free form of tan ka = f(k). Its zeros are
    bracketed on a grid of half the step min(π/(8a), π/(8·max|L|·k_max)), refined
    by bisection to 1e-12, and tangential zeros are picked up from local minima
    of |g|. The first factor adds k = √(−1/(L⁺L⁻)) when L⁺L⁻ < 0. Every root is
    re-checked and dropped if 1 − T2 > 1e-8, with the deficit taken as
    the reflection probability |A|².

    Use Cases:
        - Intersection lists for the tan ka = f(k) figures
        - The root family of symmetric double barriers
        - Completeness checks against brute-force T2 scans

    Args:
        j1 (JunctionParams): Junction at x = −a/2.
        a (float): Positive separation.
        k_max (float): Upper end of the search interval (0, k_max].
        j2 (JunctionParams, optional): Junction at x = +a/2. When omitted the
                                       SymmetricSame partner j2 = j1 is used.

    Returns:
        List[ResonanceRoot]: Strictly increasing roots with their residuals.

    Raises:
        InvalidParameter: Non-positive a or k_max.
        NotApplicable: j2 given and the pair is not symmetric.
    """

    # Validate input parameters
    a = _require_positive("a", a)
    k_max = _require_positive("k_max", k_max)
    config = _check_regime(j1, j2 if j2 is not None else j1, a, SYMMETRIC_TAGS, "Case (i)")

    grid = _bracketing_grid(j1, a, k_max)
    logger.debug(f"Case (i) grid: {grid.size} points on (0, {k_max}]")

    candidates = [
        ResonanceRoot(k=k, kind=RootKind.TAN_CONDITION, residual=math.inf, tangent=tangent)
        for k, tangent in _grid_roots(tan_condition_residual(j1, a), grid)
        if 0.0 < k <= k_max
    ]

    inverse_sqrt = perfect_transmission_wavenumber(j1)
    if inverse_sqrt is not None and inverse_sqrt <= k_max:
        candidates.append(ResonanceRoot(k=inverse_sqrt, kind=RootKind.INVERSE_SQRT, residual=math.inf))

    roots = _verified(config, _merge_roots(candidates), ROOT_TOLERANCE)
    logger.info(f"Case (i): {len(roots)} perfect-transmission roots in (0, {k_max}] for {j1}, a={a}")
    return roots


def resonance_roots_case_ii(j1: JunctionParams, a: float, k_max: float,
                            j2: Optional[JunctionParams] = None) -> List[ResonanceRoot]:
    """
    Perfect-transmission wavenumbers for the anti-symmetric relations.

    When (L₂⁺, L₂⁻) = −(L₁⁺, L₁⁻) or −(L₁⁻, L₁⁺) the conditions reduce to
    (1 + k²L⁺L⁻) sin ka = 0, giving the lattice k = nπ/a for n = 1, 2, ...
    and, when L⁺L⁻ < 0, the single-barrier root √(−1/(L⁺L⁻)).

    Args:
        j1 (JunctionParams): Junction at x = −a/2.
        a (float): Positive separation.
        k_max (float): Upper end of the search interval (0, k_max].
        j2 (JunctionParams, optional): Junction at x = +a/2; defaults to the
                                       AntiSame partner −j1.

    Returns:
        List[ResonanceRoot]: Strictly increasing roots, each verified to 1e-10.

    Raises:
        InvalidParameter: Non-positive a or k_max.
        NotApplicable: j2 given and the pair is not anti-symmetric.
    """

    a = _require_positive("a", a)
    k_max = _require_positive("k_max", k_max)
    config = _check_regime(j1, j2 if j2 is not None else j1.negated(), a, ANTI_TAGS, "Case (ii)")

    count = int(math.floor(k_max * a / math.pi + 1e-9))
    candidates = [
        ResonanceRoot(k=n * math.pi / a, kind=RootKind.SIN_CONDITION, residual=math.inf)
        for n in range(1, count + 1)
        if n * math.pi / a <= k_max * (1.0 + 1e-12)
    ]

    inverse_sqrt = perfect_transmission_wavenumber(j1)
    if inverse_sqrt is not None and inverse_sqrt <= k_max:
        candidates.append(ResonanceRoot(k=inverse_sqrt, kind=RootKind.INVERSE_SQRT, residual=math.inf))

    roots = _verified(config, _merge_roots(candidates), LATTICE_TOLERANCE)
    logger.info(f"Case (ii): {len(roots)} perfect-transmission roots in (0, {k_max}] for {j1}, a={a}")
    return roots


def incidental_separations(config: DoubleConfig, k: float, count: int = 3) -> List[float]:
    """
    Separations a at which an incidental candidate k becomes a true resonance.

    At a root of the quartic the two rows of the M-matrix are proportional,
    so one row fixes ka modulo π: ka = φ + nπ. The first `count` positive
    separations whose T2 passes the 1e-8 check are returned.
    """
    matrix = resonance_matrix(config, k)
    first = math.hypot(matrix.m11, matrix.m12)
    second = math.hypot(matrix.m21, matrix.m22)
    if max(first, second) == 0.0:
        return []
    x, y = (matrix.m11, matrix.m12) if first >= second else (matrix.m21, matrix.m22)

    # x sin ka + y cos ka = 0
    base = math.fmod(math.atan2(-y, x), math.pi)
    if base <= 0.0:
        base += math.pi

    separations = []
    for n in range(count):
        a = (base + n * math.pi) / k
        candidate = config.model_copy(update={"a": a})
        if transmission_deficit(candidate, k) <= ROOT_TOLERANCE:
            separations.append(a)
        else:
            logger.debug(f"Separation a={a} does not realise the resonance at k={k}")
    return separations


def incidental_resonance(config: DoubleConfig) -> List[IncidentalCandidate]:
    """
    Isolated perfect-transmission candidates outside the relation classes.

    The quartic factors as (d₁(1 + k²P₂))² − (d₂(1 + k²P₁))² with
    dⱼ = Lⱼ⁺ − Lⱼ⁻ and Pⱼ = Lⱼ⁺Lⱼ⁻, so

        k² = (±d₂ − d₁) / (d₁P₂ ∓ d₂P₁)

    Positive k² values are candidates. Each is verified against T2 at the
    configured separation (usually false: the resonance needs a specific a),
    and carries the separations at which it would be realised.

    Raises:
        NotApplicable: The pair satisfies one of the relations.
        NoCandidate: Both branch denominators vanish.
        InvalidParameter: Infinite lengths.
    """

    if relation_memberships(config):
        raise NotApplicable(f"Incidental resonance needs relation None, got {classify_relation(config).tag.value}")

    l1p, l1m, l2p, l2m = _finite_lengths(config)
    d1, d2 = l1p - l1m, l2p - l2m
    p1, p2 = l1p * l1m, l2p * l2m
    tolerance = 1e-12 * max(1.0, abs(d1 * p2), abs(d2 * p1))

    branches = 0
    wavenumbers = set()
    for sign in (1.0, -1.0):
        denominator = d1 * p2 - sign * d2 * p1
        if abs(denominator) <= tolerance:
            continue
        branches += 1
        x = (sign * d2 - d1) / denominator
        if x > 0.0:
            wavenumbers.add(math.sqrt(x))

    if branches == 0:
        raise NoCandidate("Both incidental-resonance denominators vanish")

    opaque = d1 == 0.0 or d2 == 0.0
    candidates = []
    for k in sorted(wavenumbers):
        residual = transmission_deficit(config, k)
        candidates.append(IncidentalCandidate(
            k=k,
            verified=residual <= ROOT_TOLERANCE,
            residual=residual,
            separations=[] if opaque else incidental_separations(config, k),
        ))

    logger.info(f"Incidental resonance: {len(candidates)} candidate(s) for a={config.a}")
    return candidates


def peak_width(j1: JunctionParams, a: float, n: int) -> PeakWidth:
    """
    Width of the n-th lattice resonance for the anti-symmetric pair (j1, −j1).

    Near k_n = nπ/a, T2(k) ≈ 1 − ((k − k_n)/w)² with

        w = k_n(L⁺ − L⁻)·√T1(k_n) / (2a(1 + k_n²L⁺L⁻))

    reported as a positive width.

    Raises:
        InvalidParameter: Non-positive a or n.
        NotApplicable: j1 is opaque (L⁺ = L⁻), so there is no peak.
        SingularPeak: 1 + k_n²L⁺L⁻ = 0, i.e. the √(−1/(L⁺L⁻)) root sits on the lattice.
    """

    a = _require_positive("a", a)
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise InvalidParameter(f"Peak index must be a positive integer, got {n!r}")

    k_n = n * math.pi / a
    difference = difference_factor(j1)
    if difference == 0.0:
        raise NotApplicable("An opaque junction has no transmission peaks")

    even = even_factor(j1, k_n)
    scale = max(abs(j1.l_plus.q * j1.l_minus.q), k_n ** 2 * abs(j1.l_plus.p * j1.l_minus.p))
    if abs(even) <= 1e-12 * scale:
        raise SingularPeak(f"1 + k²L⁺L⁻ vanishes at k_{n} = {k_n}")

    w = abs(k_n * difference * math.sqrt(t1(j1, k_n)) / (2.0 * a * even))
    return PeakWidth(n=n, k_n=k_n, w=w)


def delta_potential_case(config: DoubleConfig) -> Optional[str]:
    """
    Which of the four delta-potential resonance cases a pair falls in.

    With j1 a Dirac delta (L₁⁻ = 0, L₁⁺ finite and nonzero), infinitely many
    resonant peaks appear for (L₂⁺, L₂⁻) = (L₁⁺, 0) "I", (−L₁⁺, 0) "II",
    (0, L₁⁺) "III" or (0, −L₁⁺) "IV".
    """
    if classify_junction(config.j1).tag != BoundaryTag.DIRAC_DELTA:
        return None

    strength = config.j1.l_plus
    plus, minus = config.j2.l_plus, config.j2.l_minus
    cases = (
        ("I", strength, ZERO_LENGTH),
        ("II", strength.negated(), ZERO_LENGTH),
        ("III", ZERO_LENGTH, strength),
        ("IV", ZERO_LENGTH, strength.negated()),
    )
    for label, expected_plus, expected_minus in cases:
        if plus.matches(expected_plus) and minus.matches(expected_minus):
            return label
    return None


def analyze_resonances(config: DoubleConfig, k_max: float) -> ResonanceReport:
    """
    Full perfect-transmission analysis of a double junction on (0, k_max].

    Classifies the relation first and dispatches to the case (i) solver, the
    case (ii) solver, or the incidental-candidate search. Verified incidental
    candidates inside (0, k_max] are also listed as roots.
    """

    k_max = _require_positive("k_max", k_max)
    relation = classify_relation(config)
    memberships = relation_memberships(config)
    quartic = quartic_coefficients(config) if config.is_finite else None

    if memberships & SYMMETRIC_TAGS:
        roots = resonance_roots_case_i(config.j1, config.a, k_max, j2=config.j2)
        return ResonanceReport(relation=relation, quartic=quartic, roots=roots)

    if memberships & ANTI_TAGS:
        roots = resonance_roots_case_ii(config.j1, config.a, k_max, j2=config.j2)
        return ResonanceReport(relation=relation, quartic=quartic, roots=roots)

    try:
        candidates = incidental_resonance(config)
    except NoCandidate as e:
        logger.info(f"No incidental candidates: {e}")
        candidates = []
    except InvalidParameter as e:
        logger.warning(f"Incidental search skipped: {e}")
        candidates = []

    roots = [
        ResonanceRoot(k=c.k, kind=RootKind.INCIDENTAL, residual=c.residual)
        for c in candidates
        if c.verified and c.k <= k_max
    ]
    return ResonanceReport(relation=relation, quartic=quartic, roots=roots, incidental=candidates)
