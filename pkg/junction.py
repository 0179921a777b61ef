import logging
import math
from enum import Enum
from typing import Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, model_validator

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
CLASSIFY_TOLERANCE = 1e-12


class InvalidParameter(ValueError):
    """Raised when a length, angle, wavenumber or separation is out of range"""
    pass


def _require_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise InvalidParameter(f"{name} must be finite, got {value}")
    return value


def _reduce_angle(theta: float) -> float:
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= TWO_PI:
        theta = 0.0
    return theta


class ExtendedLength(BaseModel):
    """
    A real length that may be infinite, kept as a homogeneous pair (p, q) with L = p/q.

    The pair is normalized on construction: p² + q² = 1, q ≥ 0, and the single
    point at infinity is stored as (1, 0). Amplitude formulas evaluate each
    (1 + ikL) factor as (q + ikp), so infinite lengths need no special casing.
    """
    model_config = ConfigDict(frozen=True)

    p: float
    q: float
    # the finite value as entered, so hand-typed lengths compare exactly
    exact: Optional[float] = None

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data):
        if not isinstance(data, dict):
            return data
        p = float(data.get("p", 0.0))
        q = float(data.get("q", 0.0))
        if not (math.isfinite(p) and math.isfinite(q)):
            raise ValueError("homogeneous coordinates must be finite")
        norm = math.hypot(p, q)
        if norm == 0.0:
            raise ValueError("(p, q) = (0, 0) does not represent a length")
        p, q = p / norm, q / norm
        if q < 0.0:
            p, q = -p, -q
        if q == 0.0:
            # +inf and -inf are the same projective point
            p, q = 1.0, 0.0
        exact = data.get("exact")
        if q == 0.0 or exact is None or not math.isfinite(exact):
            exact = None
        else:
            exact = float(exact) + 0.0
        return {"p": p + 0.0, "q": q + 0.0, "exact": exact}

    @classmethod
    def from_homogeneous(cls, p: float, q: float) -> "ExtendedLength":
        p = _require_finite("p", p)
        q = _require_finite("q", q)
        if p == 0.0 and q == 0.0:
            raise InvalidParameter("(p, q) = (0, 0) does not represent a length")
        return cls(p=p, q=q)

    @classmethod
    def from_value(cls, value: Union[float, str, "ExtendedLength"]) -> "ExtendedLength":
        """Build from a float, ±inf, the token "inf", or pass an ExtendedLength through."""
        if isinstance(value, ExtendedLength):
            return value
        if isinstance(value, str):
            token = value.strip().lower()
            if token in ("inf", "+inf", "-inf", "infinity", "+infinity", "-infinity"):
                return cls.infinite()
            try:
                value = float(token)
            except ValueError:
                raise InvalidParameter(f"Cannot interpret {value!r} as a length")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidParameter(f"Cannot interpret {value!r} as a length")
        if math.isnan(value):
            raise InvalidParameter("Length must not be NaN")
        if math.isinf(value):
            return cls.infinite()
        return cls(p=value, q=1.0, exact=value)

    @classmethod
    def infinite(cls) -> "ExtendedLength":
        return cls(p=1.0, q=0.0)

    @property
    def is_finite(self) -> bool:
        return self.q != 0.0

    @property
    def value(self) -> float:
        if self.q == 0.0:
            return math.inf
        if self.exact is not None:
            return self.exact
        return self.p / self.q

    def negated(self) -> "ExtendedLength":
        exact = -self.exact if self.exact is not None else None
        return ExtendedLength(p=-self.p, q=self.q, exact=exact)

    def matches(self, other: "ExtendedLength", tolerance: float = CLASSIFY_TOLERANCE) -> bool:
        """Projective comparison of canonical coordinates."""
        direct = max(abs(self.p - other.p), abs(self.q - other.q))
        # (p, q) and (-p, -q) meet at the point at infinity
        antipodal = max(abs(self.p + other.p), abs(self.q + other.q))
        return min(direct, antipodal) <= tolerance

    def is_zero(self, tolerance: float = CLASSIFY_TOLERANCE) -> bool:
        return self.matches(ZERO_LENGTH, tolerance)

    def is_infinite(self, tolerance: float = CLASSIFY_TOLERANCE) -> bool:
        return self.matches(INFINITE_LENGTH, tolerance)

    def __str__(self) -> str:
        return "inf" if self.q == 0.0 else repr(self.value)


ZERO_LENGTH = ExtendedLength(p=0.0, q=1.0, exact=0.0)
INFINITE_LENGTH = ExtendedLength(p=1.0, q=0.0)

LengthLike = Union[float, str, ExtendedLength]


class JunctionParams(BaseModel):
    """One parity-invariant point interaction: torus angles (θ₊, θ₋), scale L₀ and lengths L⁽±⁾."""
    model_config = ConfigDict(frozen=True)

    theta_plus: float
    theta_minus: float
    l0: float = 1.0
    l_plus: ExtendedLength
    l_minus: ExtendedLength

    @model_validator(mode="after")
    def _check_ranges(self):
        if not self.l0 > 0.0 or not math.isfinite(self.l0):
            raise ValueError("L0 must be a positive finite length")
        for name in ("theta_plus", "theta_minus"):
            theta = getattr(self, name)
            if not (0.0 <= theta < TWO_PI):
                raise ValueError(f"{name} must lie in [0, 2π), got {theta}")
        return self

    @property
    def xi(self) -> float:
        return 0.5 * (self.theta_plus + self.theta_minus)

    @property
    def zeta(self) -> float:
        return 0.5 * (self.theta_plus - self.theta_minus)

    @property
    def is_finite(self) -> bool:
        return self.l_plus.is_finite and self.l_minus.is_finite

    def mirrored(self) -> "JunctionParams":
        # parity-invariant junctions are their own mirror images
        return self

    def negated(self) -> "JunctionParams":
        return junction_from_lengths(self.l_plus.negated(), self.l_minus.negated(), self.l0)

    def swapped(self) -> "JunctionParams":
        return junction_from_lengths(self.l_minus, self.l_plus, self.l0)

    def __str__(self) -> str:
        return f"(L+={self.l_plus}, L-={self.l_minus})"


class BoundaryTag(str, Enum):
    DECOUPLING = "Decoupling"
    NEUMANN = "Neumann"
    DIRICHLET = "Dirichlet"
    FREE = "Free"
    PHASE_INVERSION = "PhaseInversion"
    DIRAC_DELTA = "DiracDelta"
    GENERIC = "Generic"


class BoundaryClass(BaseModel):
    """Named boundary-condition family of a junction, with its defining lengths"""
    model_config = ConfigDict(frozen=True)

    tag: BoundaryTag
    lengths: Dict[str, float] = {}


def _length_angle(length: ExtendedLength, l0: float) -> float:
    # (p, q) ∝ (L0 cos(θ/2), sin(θ/2)) with q ≥ 0, so θ/2 ∈ [0, π]
    return _reduce_angle(2.0 * math.atan2(length.q * l0, length.p))


def junction_from_angles(theta_plus: float, theta_minus: float, l0: float = 1.0) -> JunctionParams:
    """
    Build a parity-invariant junction from its torus angles.

    The lengths follow L⁽±⁾ = L₀ cot(θ±/2), stored homogeneously as
    (L₀ cos(θ±/2), sin(θ±/2)). θ = 0 gives the point at infinity and θ = π
    gives L = 0.

    Args:
        theta_plus (float): Even-channel angle, any finite value; reduced mod 2π.
        theta_minus (float): Odd-channel angle, any finite value; reduced mod 2π.
        l0 (float): Positive reference length. Lengths and separations are
                    multiples of it; the default natural unit is 1.

    Returns:
        JunctionParams: Angles in [0, 2π) plus the derived extended lengths.

    Raises:
        InvalidParameter: Non-finite angles or a non-positive scale.
    """

    # Validate input parameters
    theta_plus = _require_finite("theta_plus", theta_plus)
    theta_minus = _require_finite("theta_minus", theta_minus)
    l0 = _require_finite("L0", l0)
    if l0 <= 0.0:
        raise InvalidParameter(f"L0 must be positive, got {l0}")

    theta_plus = _reduce_angle(theta_plus)
    theta_minus = _reduce_angle(theta_minus)

    l_plus = ExtendedLength.from_homogeneous(l0 * math.cos(0.5 * theta_plus), math.sin(0.5 * theta_plus))
    l_minus = ExtendedLength.from_homogeneous(l0 * math.cos(0.5 * theta_minus), math.sin(0.5 * theta_minus))

    return JunctionParams(
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        l0=l0,
        l_plus=l_plus,
        l_minus=l_minus,
    )


def junction_from_lengths(l_plus: LengthLike, l_minus: LengthLike, l0: float = 1.0) -> JunctionParams:
    """
    Build a parity-invariant junction from its two extended lengths.

    This is the inverse of the cot map: θ = 2·arccot(L/L₀), with the point at
    infinity mapped to θ = 0. The lengths are stored exactly as given, so
    classification of hand-entered values such as L⁺ = L⁻ = 0.7 is exact.

    Use Cases:
        - Scenario documents that specify L1_plus/L1_minus directly
        - Building the partner junction of a relation class (swapped or negated)
        - Reproducing figure parameter sets

    Args:
        l_plus (float | str | ExtendedLength): L⁽⁺⁾; ±inf or "inf" selects the point at infinity.
        l_minus (float | str | ExtendedLength): L⁽⁻⁾, same conventions.
        l0 (float): Positive reference length.

    Returns:
        JunctionParams: Junction with angles recovered from the lengths.

    Raises:
        InvalidParameter: NaN lengths or a non-positive scale.
    """

    l0 = _require_finite("L0", l0)
    if l0 <= 0.0:
        raise InvalidParameter(f"L0 must be positive, got {l0}")

    plus = ExtendedLength.from_value(l_plus)
    minus = ExtendedLength.from_value(l_minus)

    return JunctionParams(
        theta_plus=_length_angle(plus, l0),
        theta_minus=_length_angle(minus, l0),
        l0=l0,
        l_plus=plus,
        l_minus=minus,
    )


def junction_from_homogeneous(p_plus: float, q_plus: float, p_minus: float, q_minus: float,
                              l0: float = 1.0) -> JunctionParams:
    return junction_from_lengths(
        ExtendedLength.from_homogeneous(p_plus, q_plus),
        ExtendedLength.from_homogeneous(p_minus, q_minus),
        l0,
    )


def classify_junction(params: JunctionParams) -> BoundaryClass:
    """
    Classify a junction into its named boundary-condition family.

    The scale-invariant corners (Neumann, Dirichlet, Free, PhaseInversion) are
    checked first, then the decoupling line L⁺ = L⁻, then the Dirac delta line
    L⁻ = 0. Matching is exact within 1e-12 on canonical coordinates, so
    near-misses classify as Generic.

    Args:
        params (JunctionParams): The junction to classify.

    Returns:
        BoundaryClass: Tag plus the defining lengths where the family has any.
    """

    plus, minus = params.l_plus, params.l_minus

    plus_inf, minus_inf = plus.is_infinite(), minus.is_infinite()
    plus_zero, minus_zero = plus.is_zero(), minus.is_zero()

    if plus_inf and minus_inf:
        return BoundaryClass(tag=BoundaryTag.NEUMANN)
    if plus_zero and minus_zero:
        return BoundaryClass(tag=BoundaryTag.DIRICHLET)
    if plus_inf and minus_zero:
        return BoundaryClass(tag=BoundaryTag.FREE)
    if plus_zero and minus_inf:
        return BoundaryClass(tag=BoundaryTag.PHASE_INVERSION)
    if plus.matches(minus) and plus.is_finite and not plus_inf:
        return BoundaryClass(tag=BoundaryTag.DECOUPLING, lengths={"L": plus.value})
    if minus_zero and not plus_inf and not plus_zero:
        return BoundaryClass(tag=BoundaryTag.DIRAC_DELTA, lengths={"L_plus": plus.value})

    return BoundaryClass(
        tag=BoundaryTag.GENERIC,
        lengths={"L_plus": plus.value, "L_minus": minus.value},
    )
