import logging
from typing import List

from fastapi import APIRouter, HTTPException

from junction import InvalidParameter, classify_junction
from resonance import (
    NotApplicable,
    ResonanceError,
    ResonanceReport,
    analyze_resonances,
    classify_relation,
    delta_potential_case,
)
from scattering_double import DoubleConfig, double_amplitudes
from scattering_single import single_amplitudes
from scenarios import PRESETS, NumericFailure, ParseError, ScanMode, emit_report, parse_scenario, run_scan
from . import schemas

logger = logging.getLogger(__name__)

router = APIRouter()


def _scenario(request: schemas.ScenarioRequest):
    try:
        return parse_scenario(request.document, overrides={"k_max": request.k_max, "samples": request.samples})
    except ParseError as e:
        raise HTTPException(status_code=400, detail=str(e))


def _pair(value: complex):
    return (value.real, value.imag)


@router.post("/classify", response_model=schemas.ClassifyOut)
def classify(request: schemas.ClassifyRequest):
    try:
        j1 = request.j1.to_params()
        j2 = request.j2.to_params() if request.j2 is not None else None
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))

    if j2 is None:
        return {"j1": classify_junction(j1)}

    try:
        config = DoubleConfig(j1=j1, j2=j2, a=request.a)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {
        "j1": classify_junction(j1),
        "j2": classify_junction(j2),
        "relation": classify_relation(config).tag.value,
        "delta_case": delta_potential_case(config),
    }


@router.post("/transmission", response_model=schemas.TransmissionOut)
def transmission(request: schemas.TransmissionRequest):
    scenario = _scenario(request)
    try:
        if scenario.mode == ScanMode.SINGLE:
            single = single_amplitudes(scenario.junctions[0], request.k)
            amplitudes = {"A": _pair(single.A), "B": _pair(single.B)}
            return {"mode": "single", "k": single.k, "T": single.T1, "R": single.R1, "amplitudes": amplitudes}

        double = double_amplitudes(scenario.double_config, request.k)
    except InvalidParameter as e:
        raise HTTPException(status_code=400, detail=str(e))

    amplitudes = {name: _pair(getattr(double, name)) for name in ("A", "B", "C", "D")}
    return {"mode": "double", "k": double.k, "T": double.T2, "R": double.R2, "amplitudes": amplitudes}


@router.post("/scan", response_model=schemas.ScanOut)
def scan(request: schemas.ScenarioRequest):
    scenario = _scenario(request)
    try:
        table = run_scan(scenario)
    except NumericFailure as e:
        raise HTTPException(status_code=422, detail=str(e))
    return {"metadata": table.metadata, "columns": table.columns, "rows": table.rows}


@router.post("/resonances", response_model=ResonanceReport)
def resonances(request: schemas.ScenarioRequest):
    scenario = _scenario(request)
    if scenario.mode != ScanMode.DOUBLE:
        raise HTTPException(status_code=400, detail="Resonance analysis needs a double scenario")
    try:
        return analyze_resonances(scenario.double_config, scenario.k_max)
    except InvalidParameter as e:
        raise HTTPException(status_code=400, detail=str(e))
    except NotApplicable as e:
        raise HTTPException(status_code=422, detail=str(e))
    except ResonanceError as e:
        logger.warning(f"Resonance analysis failed: {e}")
        raise HTTPException(status_code=422, detail=str(e))


@router.post("/report", response_model=schemas.ReportOut)
def report(request: schemas.ScenarioRequest):
    scenario = _scenario(request)
    return {"text": emit_report(scenario)}


@router.get("/presets", response_model=List[schemas.PresetOut])
def get_presets():
    return [preset.model_dump() for preset in PRESETS.values()]
