import math
import os
import pathlib

import numpy as np
import pytest

import pbt_kin

SCENARIOS = pathlib.Path(os.environ.get("PBT_SCENARIO_DIR", "scenarios"))


@pytest.fixture(scope="module")
def chain():
    return pbt_kin.Chain.default()


def test_catalog():
    rows = {r["size"]: r for r in pbt_kin.catalog()}
    assert rows["large"]["link1_length"] == 0.16
    assert rows["small"]["revolute_reduction"] == 1


def test_extension_length():
    assert pbt_kin.extension_length(0.16, 0.0) == pytest.approx(0.32)
    with pytest.raises(ValueError):
        pbt_kin.extension_length(0.16, math.pi)


def test_fk_matches_closed_form(chain):
    rng = np.random.default_rng(0)
    for _ in range(50):
        state = [rng.uniform(-math.pi, math.pi), rng.uniform(-1.5, 1.5),
                 rng.uniform(-math.pi, math.pi), rng.uniform(0, 3)]
        pos, rot = pbt_kin.fk(chain, "BP", state)
        assert np.allclose(pos, pbt_kin.fk_closed_form(chain, "BP", state), atol=1e-12)
        assert np.allclose(rot @ rot.T, np.eye(3), atol=1e-12)


def test_fk_rejects_invalid_state(chain):
    with pytest.raises(ValueError):
        pbt_kin.fk(chain, "PB", [0, -0.1, 0, 0])


def test_ik_round_trip(chain):
    fam = pbt_kin.ik(chain, "PB", [0.05, 0.0, 0.45])
    assert fam is not None and fam["conv"] == "exclude"
    for branch in fam["branches"]:
        p = pbt_kin.fk_closed_form(chain, "PB", branch["state"])
        assert np.linalg.norm(p - [0.05, 0.0, 0.45]) < 1e-9
    assert pbt_kin.ik(chain, "PB", [0.2, 0.0, 0.3]) is None


def test_solve_behind_slab(chain):
    slab = pbt_kin.Box([0.04, -0.7, 0.30], [0.7, 0.7, 0.34])
    rep = pbt_kin.solve(chain, [0.12, 0.0, 0.52], [slab])
    assert rep["ok"] and rep["mode"] == "BB"
    assert rep["clearance"] >= 0
    assert pbt_kin.clearance(chain, "BB", rep["state"], [slab]) == rep["clearance"]


def test_manipulability(chain):
    assert pbt_kin.manipulability(chain, "PP", [0.3, 1.0, -0.2, 0.5]) < 1e-12
    assert pbt_kin.manipulability(chain, "BB", [0.3, 1.0, -0.2, 0.5]) > 0
    assert pbt_kin.jacobian(chain, "BB", [0.3, 1.0, -0.2, 0.5]).shape == (3, 4)


def test_sampling_is_deterministic(chain):
    a = pbt_kin.sample_workspace(chain, "BB", 2000, seed=3, threads=1)
    b = pbt_kin.sample_workspace(chain, "BB", 2000, seed=3, threads=4)
    assert a["positions"].shape == (2000, 3)
    assert np.array_equal(a["positions"], b["positions"])
    assert np.array_equal(a["states"], b["states"])


def test_tunnel_scenario():
    s = pbt_kin.load_scenario(SCENARIOS / "tunnel.json")
    assert len(s.obstacles) == 3
    bp = pbt_kin.sample_workspace(s.chain, "BP", 30000, obstacles=s.obstacles)
    bb = pbt_kin.sample_workspace(s.chain, "BB", 30000, obstacles=s.obstacles)
    assert pbt_kin.connectivity(bp["positions"], 0.02)["components"] == 1
    assert pbt_kin.connectivity(bb["positions"], 0.02)["components"] >= 2


def test_compare_with_roi():
    s = pbt_kin.load_scenario(SCENARIOS / "cluttered.json")
    roi = s.region_of_interest
    rows = {r["mode"]: r for r in pbt_kin.compare_modes(
        s.chain, s.obstacles, 10000, roi=(roi.min, roi.max))}
    assert rows["BB"]["roi_count"] >= 1
    assert rows["BP"]["roi_count"] == 0
