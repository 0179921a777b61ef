from pydantic import BaseModel
from typing import Dict, List, Optional, Tuple, Union

from junction import BoundaryClass, JunctionParams, junction_from_angles, junction_from_lengths


class JunctionIn(BaseModel):
    """Either both lengths or both angles; lengths accept "inf"."""
    l_plus: Optional[Union[float, str]] = None
    l_minus: Optional[Union[float, str]] = None
    theta_plus: Optional[float] = None
    theta_minus: Optional[float] = None
    l0: float = 1.0

    def to_params(self) -> JunctionParams:
        has_lengths = self.l_plus is not None or self.l_minus is not None
        has_angles = self.theta_plus is not None or self.theta_minus is not None
        if has_lengths and has_angles:
            raise ValueError("give either lengths or angles, not both")
        if has_angles:
            if self.theta_plus is None or self.theta_minus is None:
                raise ValueError("both theta_plus and theta_minus are required")
            return junction_from_angles(self.theta_plus, self.theta_minus, self.l0)
        if self.l_plus is None or self.l_minus is None:
            raise ValueError("both l_plus and l_minus are required")
        return junction_from_lengths(self.l_plus, self.l_minus, self.l0)


class ClassifyRequest(BaseModel):
    j1: JunctionIn
    j2: Optional[JunctionIn] = None
    a: float = 1.0


class ClassifyOut(BaseModel):
    j1: BoundaryClass
    j2: Optional[BoundaryClass] = None
    relation: Optional[str] = None
    delta_case: Optional[str] = None


class ScenarioRequest(BaseModel):
    document: str
    k_max: Optional[float] = None
    samples: Optional[int] = None


class TransmissionRequest(ScenarioRequest):
    k: float


class TransmissionOut(BaseModel):
    mode: str
    k: float
    T: float
    R: float
    # amplitude name -> (real, imag)
    amplitudes: Dict[str, Tuple[float, float]]


class ScanOut(BaseModel):
    metadata: List[Tuple[str, str]]
    columns: List[str]
    rows: List[List[float]]


class ReportOut(BaseModel):
    text: str


class PresetOut(BaseModel):
    name: str
    kind: str
    description: str
    a: float
    j1: Tuple[float, float]
    j2: Optional[Tuple[float, float]] = None
    k_max: float
