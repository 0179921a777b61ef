import cmath
import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from junction import InvalidParameter, JunctionParams, TWO_PI
from scattering_single import (
    difference_factor,
    even_factor,
    homogeneous_factor,
    junction_equations,
    require_wavenumber,
    single_amplitudes,
    solve_junction_system,
)

logger = logging.getLogger(__name__)

TRANSFER_TOLERANCE = 1e-9
OPAQUE_TRANSMISSION = 1e-14


class DoubleConfig(BaseModel):
    """Two junctions, j1 at x = −a/2 and j2 at x = +a/2"""
    model_config = ConfigDict(frozen=True)

    j1: JunctionParams
    j2: JunctionParams
    a: float

    @model_validator(mode="after")
    def _check_separation(self):
        if not math.isfinite(self.a) or self.a <= 0.0:
            raise ValueError(f"Separation a must be positive and finite, got {self.a}")
        return self

    @property
    def is_finite(self) -> bool:
        return self.j1.is_finite and self.j2.is_finite

    def swapped(self) -> "DoubleConfig":
        """Exchange the junctions, each replaced by its mirror image."""
        return DoubleConfig(j1=self.j2.mirrored(), j2=self.j1.mirrored(), a=self.a)

    def lengths(self):
        """(L₁⁺, L₁⁻, L₂⁺, L₂⁻) as floats; infinite entries are math.inf."""
        return (self.j1.l_plus.value, self.j1.l_minus.value,
                self.j2.l_plus.value, self.j2.l_minus.value)


class DoubleSolution(BaseModel):
    """Amplitudes for e^{ikx} + Ae^{-ikx} | Be^{ikx} + Ce^{-ikx} | De^{ikx}"""
    model_config = ConfigDict(frozen=True)

    k: float
    A: complex
    B: complex
    C: complex
    D: complex
    Delta: Optional[complex] = None
    T2: float
    R2: float
    singular: bool = False


def phase(angle: float) -> complex:
    """e^{i·angle} with the angle reduced to [−π, π] first."""
    return cmath.exp(1j * math.remainder(angle, TWO_PI))


def double_amplitudes(config: DoubleConfig, k: float) -> DoubleSolution:
    """
    Closed-form amplitudes for two successive junctions.

    With Pⱼ = (q⁺ + ikp⁺)(q⁻ + ikp⁻), Sⱼ = q⁺q⁻ + k²p⁺p⁻ and
    dⱼ = p⁺q⁻ − p⁻q⁺ for junction j (each the homogeneous form of the
    corresponding factor in L), the amplitudes are

        Δ = P₁P₂ − S₁S₂e^{2ika}
        A = e^{−ika}(−S₁P₂ + P̄₁S₂e^{2ika}) / Δ
        B = ik d₁P₂ / Δ
        C = −ik d₁S₂e^{ika} / Δ
        D = −k²d₁d₂ / Δ

    Δ can only vanish when both junctions are decoupling (opaque), at the
    bound states of the enclosed well; when j1 is opaque the solution is
    taken as the bare reflection from j1 with B = C = D = 0.

    Args:
        config (DoubleConfig): The two junctions and their separation.
        k (float): Positive wavenumber.

    Returns:
        DoubleSolution: Amplitudes, Δ, T2 = |D|² and R2 = |A|².

    Raises:
        InvalidParameter: k ≤ 0 or non-finite.
    """

    k = require_wavenumber(k)
    j1, j2, a = config.j1, config.j2, config.a

    p1 = homogeneous_factor(j1.l_plus, k) * homogeneous_factor(j1.l_minus, k)
    p2 = homogeneous_factor(j2.l_plus, k) * homogeneous_factor(j2.l_minus, k)
    s1, s2 = even_factor(j1, k), even_factor(j2, k)
    d1, d2 = difference_factor(j1), difference_factor(j2)

    forward = phase(k * a)
    backward = phase(-k * a)
    round_trip = phase(2.0 * k * a)

    delta = p1 * p2 - s1 * s2 * round_trip

    if d1 == 0.0:
        # j1 is opaque: nothing enters the well
        A = -s1 / p1 * backward
        return DoubleSolution(k=k, A=A, B=0j, C=0j, D=0j, Delta=delta, T2=0.0, R2=abs(A) ** 2)

    A = backward * (-s1 * p2 + p1.conjugate() * s2 * round_trip) / delta
    B = 1j * k * d1 * p2 / delta
    C = -1j * k * d1 * s2 * forward / delta
    D = -(k ** 2) * d1 * d2 / delta

    T2 = (k ** 2 * d1 * d2) ** 2 / abs(delta) ** 2

    return DoubleSolution(k=k, A=A, B=B, C=C, D=D, Delta=delta, T2=T2, R2=abs(A) ** 2)


def t2(config: DoubleConfig, k: float) -> float:
    """Double-junction transmission probability T2 = |D|²."""
    return double_amplitudes(config, k).T2


def transmission_deficit(config: DoubleConfig, k: float) -> float:
    """
    1 − T2 computed as the reflection probability |A|².

    Near perfect transmission Δ is a small difference of large terms and
    k⁴d₁²d₂²/|Δ|² inherits its relative error directly. The rounding error
    in the numerator of A enters |A|² squared, so the deficit stays accurate
    right at a resonance.
    """
    return double_amplitudes(config, k).R2


def double_transmission_grid(config: DoubleConfig, ks: np.ndarray) -> np.ndarray:
    """Vectorised T2 over an array of positive wavenumbers."""
    ks = np.asarray(ks, dtype=float)
    if ks.size and (not np.all(np.isfinite(ks)) or np.any(ks <= 0.0)):
        raise InvalidParameter("Wavenumber grid must be positive and finite")

    j1, j2, a = config.j1, config.j2, config.a
    d1, d2 = difference_factor(j1), difference_factor(j2)
    if d1 == 0.0 or d2 == 0.0:
        return np.zeros_like(ks)

    p1 = homogeneous_factor(j1.l_plus, ks) * homogeneous_factor(j1.l_minus, ks)
    p2 = homogeneous_factor(j2.l_plus, ks) * homogeneous_factor(j2.l_minus, ks)
    s1, s2 = even_factor(j1, ks), even_factor(j2, ks)
    round_trip = np.exp(1j * np.remainder(2.0 * ks * a, TWO_PI))

    delta = p1 * p2 - s1 * s2 * round_trip
    return (ks ** 2 * d1 * d2) ** 2 / np.abs(delta) ** 2


def double_oracle(config: DoubleConfig, k: float) -> DoubleSolution:
    """
    Amplitudes from a dense 4×4 solve of the junction equations at x = ∓a/2.

    The unknowns are (A, B, C, D) of the three-region plane-wave ansatz; the
    incident wave e^{ikx} supplies the inhomogeneous column. Finite lengths
    only. A near-singular system (which only happens at decoupling
    parameters) is solved in the least-squares sense and flagged.

    Raises:
        InvalidParameter: Infinite lengths or a bad wavenumber.
    """

    k = require_wavenumber(k)
    if not config.is_finite:
        raise InvalidParameter("The dense oracle only accepts finite lengths")

    ik = 1j * k
    half = 0.5 * config.a
    # e^{±ikx} at x1 = −a/2 and x2 = +a/2
    fwd1, bwd1 = phase(-k * half), phase(k * half)
    fwd2, bwd2 = phase(k * half), phase(-k * half)

    # Coefficient vectors over [A, B, C, D, incident]
    first = junction_equations(
        config.j1.l_plus.value, config.j1.l_minus.value,
        psi_left=[bwd1, 0, 0, 0, fwd1],
        dpsi_left=[-ik * bwd1, 0, 0, 0, ik * fwd1],
        psi_right=[0, fwd1, bwd1, 0, 0],
        dpsi_right=[0, ik * fwd1, -ik * bwd1, 0, 0],
    )
    second = junction_equations(
        config.j2.l_plus.value, config.j2.l_minus.value,
        psi_left=[0, fwd2, bwd2, 0, 0],
        dpsi_left=[0, ik * fwd2, -ik * bwd2, 0, 0],
        psi_right=[0, 0, 0, fwd2, 0],
        dpsi_right=[0, 0, 0, ik * fwd2, 0],
    )

    (A, B, C, D), singular = solve_junction_system(np.vstack([first, second]))

    return DoubleSolution(
        k=k,
        A=complex(A),
        B=complex(B),
        C=complex(C),
        D=complex(D),
        T2=abs(D) ** 2,
        R2=abs(A) ** 2,
        singular=singular,
    )


class TransferCheckResponse:
    """Response object for the transfer-matrix consistency check"""
    def __init__(self, applicable: bool, t2_closed: Optional[float] = None,
                 t2_transfer: Optional[float] = None, deviation: Optional[float] = None,
                 error_message: Optional[str] = None):
        self.applicable = applicable
        self.t2_closed = t2_closed
        self.t2_transfer = t2_transfer
        self.deviation = deviation
        self.error_message = error_message

    @property
    def consistent(self) -> bool:
        return self.applicable and self.deviation is not None and self.deviation < TRANSFER_TOLERANCE


def junction_transfer_matrix(params: JunctionParams, k: float) -> np.ndarray:
    """
    Transfer matrix of one junction at the origin, mapping (right-going,
    left-going) amplitudes on the left to those on the right.

    Built from the single-junction amplitudes; parity makes the reflection
    and transmission the same from both sides.
    """
    solution = single_amplitudes(params, k)
    r, t = solution.A, solution.B
    return np.array([[t - r * r / t, r / t],
                     [-r / t, 1.0 / t]], dtype=complex)


def propagation_matrix(k: float, distance: float) -> np.ndarray:
    """Free propagation of plane-wave amplitudes over a distance."""
    return np.array([[phase(k * distance), 0.0],
                     [0.0, phase(-k * distance)]], dtype=complex)


def transfer_compose_check(config: DoubleConfig, k: float) -> TransferCheckResponse:
    """
    Cross-check T2 by composing per-junction transfer matrices.

    Each junction contributes its own 2×2 transfer matrix from the single
    amplitudes, the well contributes free propagation over a, and the outer
    phases place the pair at x = ∓a/2. The composed matrix has unit
    determinant, so T2 = 1/|M₂₂|². This is structurally different from both
    the closed form and the global 4×4 solve.

    Args:
        config (DoubleConfig): The two junctions and their separation.
        k (float): Positive wavenumber.

    Returns:
        TransferCheckResponse: Deviation from the closed form, or
        applicable=False when either junction is opaque (B = 0).
    """

    k = require_wavenumber(k)
    t2_closed = t2(config, k)

    for label, junction in (("j1", config.j1), ("j2", config.j2)):
        if abs(single_amplitudes(junction, k).B) <= OPAQUE_TRANSMISSION:
            message = f"NotApplicable: {label} is opaque at k={k}"
            logger.info(message)
            return TransferCheckResponse(applicable=False, t2_closed=t2_closed, error_message=message)

    half = 0.5 * config.a
    # Place j1 at −a/2, propagate across the well, then undo the shift at +a/2
    composed = (
        propagation_matrix(k, -half)
        @ junction_transfer_matrix(config.j2, k)
        @ propagation_matrix(k, config.a)
        @ junction_transfer_matrix(config.j1, k)
        @ propagation_matrix(k, -half)
    )

    t2_transfer = 1.0 / abs(composed[1, 1]) ** 2
    deviation = abs(t2_transfer - t2_closed)
    logger.debug(f"Transfer check at k={k}: closed={t2_closed}, transfer={t2_transfer}")

    return TransferCheckResponse(
        applicable=True,
        t2_closed=t2_closed,
        t2_transfer=t2_transfer,
        deviation=deviation,
    )
