"""Tests for the HTTP API."""
import pytest
from fastapi.testclient import TestClient

import config
from server import app

FIG2 = (config.CORPUS_DIR / "fig2.lpn").read_text()
FIG7 = (config.CORPUS_DIR / "fig7.lpn").read_text()


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestCorpusEndpoints:
    def test_root(self, client):
        assert "/api/analyze" in client.get("/").json()["endpoints"]

    def test_list(self, client):
        nets = client.get("/api/corpus").json()["nets"]
        assert [n["name"] for n in nets] == [f"fig{i}" for i in range(1, 9)] + ["fig4_wf"]
        assert nets[2]["reachable_markings"] == 9
        assert nets[1]["published"]["Lucent"] is False
        assert nets[-1]["published"] is None

    def test_report(self, client):
        response = client.get("/api/corpus/fig5")
        assert response.status_code == 200
        data = response.json()
        assert data["locally_safe"] is False and data["lucent"] is True

    def test_unknown_net(self, client):
        assert client.get("/api/corpus/fig99").status_code == 404

    def test_check(self, client):
        data = client.get("/api/corpus/fig2/check/lucency").json()
        assert data == {
            "property": "lucent",
            "holds": False,
            "witness": ["[p2,p5] and [p2,p6] both enable {t3}"],
        }

    def test_unknown_property(self, client):
        assert client.get("/api/corpus/fig1/check/shiny").status_code == 400

    def test_sound_needs_a_workflow_net(self, client):
        response = client.get("/api/corpus/fig1/check/sound")
        assert response.status_code == 400
        assert "NotAWorkflowNet" in response.json()["detail"]


class TestAnalyzeEndpoint:
    def test_analyze(self, client):
        response = client.post("/api/analyze", json={"lpn": FIG2})
        assert response.status_code == 200
        assert response.json()["reachable_marking_count"] == 6

    def test_parse_error(self, client):
        response = client.post("/api/analyze", json={"lpn": "place p\narc p p p\n"})
        assert response.status_code == 400
        assert "LpnSyntaxError" in response.json()["detail"]

    def test_invalid_net(self, client):
        response = client.post("/api/analyze", json={"lpn": "place p\n"})
        assert response.status_code == 400

    def test_bad_limit(self, client):
        assert client.post("/api/analyze", json={"lpn": FIG2, "max_states": 0}).status_code == 400

    def test_inconclusive(self, client):
        response = client.post("/api/analyze", json={"lpn": FIG7, "max_states": 3})
        assert response.status_code == 422

    def test_missing_body(self, client):
        assert client.post("/api/analyze", json={}).status_code == 422
