"""HTTP reward service endpoints and cache behavior."""

import pytest
from fastapi.testclient import TestClient

from ludilite import RewardConfig, __version__, score_candidates
from ludilite.service import create_app


@pytest.fixture(scope="module")
def cfg():
    return RewardConfig().with_overrides({"playouts_gt": 12, "playouts_pred": 6})


@pytest.fixture(scope="module")
def client(grammar, cfg):
    return TestClient(create_app(grammar, cfg))


def test_health(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "version": __version__}


def test_config_reports_effective_defaults(client, cfg):
    response = client.get("/v1/config")
    assert response.status_code == 200
    assert response.json() == cfg.to_dict()


def test_reward_matches_library_bit_for_bit(client, grammar, cfg, ttt_text):
    body = {"reference": ttt_text, "candidates": [ttt_text, "xyz"]}
    response = client.post("/v1/reward", json=body)
    assert response.status_code == 200
    payload = response.json()
    expected = score_candidates(ttt_text, [ttt_text, "xyz"], grammar, cfg)
    assert payload["breakdowns"] == [b.to_dict() for b in expected.breakdowns]
    assert payload["advantages"] == list(expected.advantages)
    assert payload["reference_concepts"] == expected.reference_concepts.to_dict()


def test_repeat_request_hits_cache_and_is_idempotent(client, ttt_text):
    body = {"reference": ttt_text, "candidates": [ttt_text], "request_id": "r1"}
    first = client.post("/v1/reward", json=body).json()
    second = client.post("/v1/reward", json=body).json()
    assert second["cache_hit"] is True
    for key in ("breakdowns", "advantages", "reference_concepts", "request_id"):
        assert first[key] == second[key]


def test_empty_candidates_rejected(client, ttt_text):
    response = client.post("/v1/reward", json={"reference": ttt_text, "candidates": []})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "validation-error"


def test_bad_config_override_rejected(client, ttt_text):
    body = {"reference": ttt_text, "candidates": ["x"], "config": {"sigma": 0}}
    response = client.post("/v1/reward", json=body)
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "validation-error"


def test_non_functional_reference_rejected(client, ttt_text):
    broken = ttt_text.replace("(is Line 3)", "(is Line 5)").replace(
        "(if (is Full) (result All Draw))", ""
    )
    response = client.post("/v1/reward", json={"reference": broken, "candidates": ["x"]})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "reference-not-functional"


def test_explicit_seed_changes_playouts_not_contract(client, ttt_text):
    base = client.post(
        "/v1/reward", json={"reference": ttt_text, "candidates": [ttt_text]}
    ).json()
    salted = client.post(
        "/v1/reward", json={"reference": ttt_text, "candidates": [ttt_text], "seed": 99}
    ).json()
    assert salted["breakdowns"][0]["r_g"] == base["breakdowns"][0]["r_g"] == 1.0
    assert salted["breakdowns"][0]["functional"]


def test_request_id_echoed(client, ttt_text):
    body = {"reference": ttt_text, "candidates": [ttt_text], "request_id": "trainer-7"}
    assert client.post("/v1/reward", json=body).json()["request_id"] == "trainer-7"
