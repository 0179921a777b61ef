import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from junction import ExtendedLength, InvalidParameter, JunctionParams

logger = logging.getLogger(__name__)

# Condition number above which a junction system is reported as singular
SINGULAR_CONDITION = 1e12


class SingleSolution(BaseModel):
    """Reflection/transmission amplitudes for a unit plane wave hitting one junction"""
    model_config = ConfigDict(frozen=True)

    k: float
    A: complex
    B: complex
    T1: float
    R1: float
    incident_side: str = "left"
    singular: bool = False


def require_wavenumber(k: float) -> float:
    try:
        k = float(k)
    except (TypeError, ValueError):
        raise InvalidParameter(f"Wavenumber must be a real number, got {k!r}")
    if not math.isfinite(k) or k <= 0.0:
        raise InvalidParameter(f"Wavenumber must be positive and finite, got {k}")
    return k


def homogeneous_factor(length: ExtendedLength, k):
    """(1 + ikL) scaled by q, i.e. q + ikp."""
    return length.q + 1j * k * length.p


def even_factor(params: JunctionParams, k):
    """(1 + k²L⁺L⁻) scaled by q₊q₋."""
    plus, minus = params.l_plus, params.l_minus
    return plus.q * minus.q + k * k * plus.p * minus.p


def difference_factor(params: JunctionParams) -> float:
    """(L⁺ − L⁻) scaled by q₊q₋; zero exactly on the decoupling line."""
    plus, minus = params.l_plus, params.l_minus
    return plus.p * minus.q - minus.p * plus.q


def single_amplitudes(params: JunctionParams, k: float) -> SingleSolution:
    """
    Closed-form reflection and transmission amplitudes for a single junction.

    Every (1 + ikL) factor is evaluated as (q + ikp) on the canonical
    homogeneous pair, so infinite lengths (Free, Neumann, PhaseInversion
    junctions) go through the same expressions as finite ones:

        A = −(q₊q₋ + k²p₊p₋) / ((q₊ + ikp₊)(q₋ + ikp₋))
        B = ik(p₊q₋ − p₋q₊) / ((q₊ + ikp₊)(q₋ + ikp₋))

    The probabilities are formed from the squared numerators over their sum,
    which equals |(q₊ + ikp₊)(q₋ + ikp₋)|² identically; this keeps T1 exactly 0
    on the decoupling line and exactly 1 where k²L⁺L⁻ = −1.

    Args:
        params (JunctionParams): The point interaction.
        k (float): Positive wavenumber in units of 1/L₀.

    Returns:
        SingleSolution: Amplitudes A, B and probabilities R1 = |A|², T1 = |B|².

    Raises:
        InvalidParameter: k ≤ 0 or non-finite.
    """

    k = require_wavenumber(k)

    denominator = homogeneous_factor(params.l_plus, k) * homogeneous_factor(params.l_minus, k)
    even = even_factor(params, k)
    difference = difference_factor(params)

    A = -even / denominator
    B = 1j * k * difference / denominator

    transmitted = (k * difference) ** 2
    reflected = even ** 2
    total = transmitted + reflected

    return SingleSolution(
        k=k,
        A=A,
        B=B,
        T1=transmitted / total,
        R1=reflected / total,
    )


def t1(params: JunctionParams, k: float) -> float:
    """Single-junction transmission probability T1 = |B|²."""
    return single_amplitudes(params, k).T1


def single_transmission_grid(params: JunctionParams, ks: np.ndarray) -> np.ndarray:
    """Vectorised T1 over an array of positive wavenumbers."""
    ks = np.asarray(ks, dtype=float)
    if ks.size and (not np.all(np.isfinite(ks)) or np.any(ks <= 0.0)):
        raise InvalidParameter("Wavenumber grid must be positive and finite")

    plus, minus = params.l_plus, params.l_minus
    transmitted = (ks * difference_factor(params)) ** 2
    reflected = (plus.q * minus.q + ks ** 2 * plus.p * minus.p) ** 2
    return transmitted / (transmitted + reflected)


def perfect_transmission_wavenumber(params: JunctionParams) -> Optional[float]:
    """k = √(−1/(L⁺L⁻)) when L⁺L⁻ < 0, else None."""
    plus, minus = params.l_plus, params.l_minus
    if not params.is_finite:
        return None
    product = plus.p * minus.p * plus.q * minus.q
    if product >= 0.0:
        return None
    return math.sqrt(-(plus.q * minus.q) / (plus.p * minus.p))


def junction_equations(l_plus: float, l_minus: float, psi_left, dpsi_left, psi_right, dpsi_right) -> np.ndarray:
    """
    Rows of the parity-invariant junction conditions at one point.

    Each boundary value is a coefficient vector over the unknown amplitudes
    with the inhomogeneous (incident-wave) part in the last slot. Returns the
    two rows
        (ψ(+0) + ψ(−0)) + L⁺(ψ'(+0) − ψ'(−0)) = 0
        (ψ(+0) − ψ(−0)) + L⁻(ψ'(+0) + ψ'(−0)) = 0
    """
    psi_left, dpsi_left = np.asarray(psi_left, dtype=complex), np.asarray(dpsi_left, dtype=complex)
    psi_right, dpsi_right = np.asarray(psi_right, dtype=complex), np.asarray(dpsi_right, dtype=complex)

    even_row = (psi_right + psi_left) + l_plus * (dpsi_right - dpsi_left)
    odd_row = (psi_right - psi_left) + l_minus * (dpsi_right + dpsi_left)
    return np.vstack([even_row, odd_row])


def solve_junction_system(rows: np.ndarray):
    """
    Solve stacked junction rows for the unknown amplitudes.

    Returns (solution, singular). A system whose condition number exceeds
    SINGULAR_CONDITION is solved in the least-squares sense and flagged.
    """
    matrix = rows[:, :-1]
    rhs = -rows[:, -1]

    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or condition > SINGULAR_CONDITION:
        logger.warning(f"Junction system is singular (condition number {condition:.3e})")
        solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
        return solution, True

    return np.linalg.solve(matrix, rhs), False


def single_oracle(params: JunctionParams, k: float, incident_side: str = "left") -> SingleSolution:
    """
    Amplitudes from a direct dense solve of the two junction equations.

    This path never touches the closed form: it writes the plane-wave ansatz
    into the raw boundary conditions and hands the 2×2 system to numpy. It is
    restricted to finite lengths so that it stays an independent check.

    Args:
        params (JunctionParams): The point interaction; both lengths finite.
        k (float): Positive wavenumber.
        incident_side (str): "left" for a wave e^{ikx} arriving from x < 0,
                             "right" for e^{-ikx} arriving from x > 0.

    Returns:
        SingleSolution: Amplitudes with the `singular` flag set if the system
        could not be solved directly; a singular system reports zero transmission.

    Raises:
        InvalidParameter: Infinite lengths, bad k, or an unknown incident side.
    """

    k = require_wavenumber(k)
    if not params.is_finite:
        raise InvalidParameter("The dense oracle only accepts finite lengths")
    if incident_side not in ("left", "right"):
        raise InvalidParameter(f"incident_side must be 'left' or 'right', got {incident_side!r}")

    ik = 1j * k
    # Unknowns are [A, B, 1]: A reflected, B transmitted, last slot incident wave
    if incident_side == "left":
        psi_left, dpsi_left = [1, 0, 1], [-ik, 0, ik]
        psi_right, dpsi_right = [0, 1, 0], [0, ik, 0]
    else:
        psi_left, dpsi_left = [0, 1, 0], [0, -ik, 0]
        psi_right, dpsi_right = [1, 0, 1], [ik, 0, -ik]

    rows = junction_equations(params.l_plus.value, params.l_minus.value,
                              psi_left, dpsi_left, psi_right, dpsi_right)
    (A, B), singular = solve_junction_system(rows)

    if singular:
        B = 0j

    return SingleSolution(
        k=k,
        A=complex(A),
        B=complex(B),
        T1=abs(B) ** 2,
        R1=abs(A) ** 2,
        incident_side=incident_side,
        singular=singular,
    )
