import math
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from fastapi.testclient import TestClient
from main import app


client = TestClient(app)

FIG8 = "L1_plus = 2\nL1_minus = -1\nL2_plus = -2\nL2_minus = 1\na = 1\n"


def test_classify_single():
    response = client.post("/classify", json={"j1": {"l_plus": "inf", "l_minus": 0}})
    assert response.status_code == 200
    data = response.json()
    assert data["j1"]["tag"] == "Free"
    assert data["relation"] is None


def test_classify_pair():
    response = client.post(
        "/classify",
        json={"j1": {"l_plus": 1.0, "l_minus": 0.0}, "j2": {"l_plus": 0.0, "l_minus": 1.0}, "a": 1.0},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["j1"]["tag"] == "DiracDelta"
    assert data["relation"] == "SymmetricSwapped"
    assert data["delta_case"] == "III"


def test_classify_from_angles():
    response = client.post("/classify", json={"j1": {"theta_plus": math.pi, "theta_minus": math.pi}})
    assert response.status_code == 200
    assert response.json()["j1"]["tag"] == "Dirichlet"


def test_classify_rejects_mixed_keys():
    response = client.post("/classify", json={"j1": {"l_plus": 1.0, "l_minus": 0.5, "theta_plus": 1.0}})
    assert response.status_code == 400


def test_transmission_single():
    response = client.post(
        "/transmission",
        json={"document": "L1_plus = 2\nL1_minus = -1\n", "k": 1 / math.sqrt(2)},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["mode"] == "single"
    assert abs(data["T"] - 1.0) < 1e-12
    assert set(data["amplitudes"]) == {"A", "B"}


def test_transmission_double():
    response = client.post("/transmission", json={"document": FIG8, "k": math.pi})
    assert response.status_code == 200
    data = response.json()
    assert data["mode"] == "double"
    assert abs(data["T"] - 1.0) < 1e-10
    assert set(data["amplitudes"]) == {"A", "B", "C", "D"}


def test_transmission_bad_k():
    response = client.post("/transmission", json={"document": FIG8, "k": -1.0})
    assert response.status_code == 400


def test_scan():
    response = client.post("/scan", json={"document": FIG8, "samples": 50})
    assert response.status_code == 200
    data = response.json()
    assert data["columns"] == ["k", "T"]
    assert len(data["rows"]) == 50


def test_scan_parse_error():
    response = client.post("/scan", json={"document": "L1_plus = 1\nfoo = 2\n"})
    assert response.status_code == 400
    assert "line 2" in response.json()["detail"]


def test_resonances():
    response = client.post("/resonances", json={"document": FIG8, "k_max": 10.0})
    assert response.status_code == 200
    data = response.json()
    assert data["relation"]["tag"] == "AntiSame"
    assert [root["kind"] for root in data["roots"]] == ["InverseSqrt", "SinCondition", "SinCondition", "SinCondition"]


def test_resonances_needs_double():
    response = client.post("/resonances", json={"document": "L1_plus = 2\nL1_minus = -1\n"})
    assert response.status_code == 400


def test_report():
    response = client.post("/report", json={"document": FIG8})
    assert response.status_code == 200
    assert "Relation: AntiSame" in response.json()["text"]


def test_presets():
    response = client.get("/presets")
    assert response.status_code == 200
    data = response.json()
    assert [preset["name"] for preset in data] == ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]
    assert data[5]["j2"] == [-2.0, 1.0]
