from __future__ import annotations

import io
import json
import math

import pytest

from bvrgame import scenario_io as sio
from bvrgame.errors import ParseError, ValidationError
from bvrgame.sim import EventKind, SimConfig, TrajectoryLog, run_attack_stage


@pytest.fixture
def doc(scenarios_dir):
    return json.loads((scenarios_dir / "attack_v.json").read_text())


def _parse(d):
    return sio.parse_scenario(json.dumps(d))


@pytest.mark.parametrize(
    "name", ["attack_v", "attack_v_lagged", "chained_v", "chained_v_lagged", "retreat_v", "symmetric"]
)
def test_shipped_scenarios_round_trip(scenarios_dir, name):
    sf = sio.load_scenario(scenarios_dir / f"{name}.json")
    text = sio.serialize_scenario(sf)
    again = sio.parse_scenario(text)
    assert again == sf
    assert sio.serialize_scenario(again) == text


def test_section_v_file_contents(scenarios_dir):
    sf = sio.load_scenario(scenarios_dir / "attack_v.json")
    sc = sio.attack_scenario(sf)
    assert (sc.B, sc.R1, sc.R2, sc.Rs) == ((-6, 8), (15, 14), (16, 6.5), (15.5, 10))
    assert (sc.beta, sc.rho, sc.rho_s) == (1.25, 5.0, 7.0)


def test_beta_below_one_names_field(doc):
    doc["parameters"]["beta"] = 0.9
    with pytest.raises(ValidationError) as e:
        _parse(doc)
    assert e.value.path == "parameters.beta"
    assert "beta > 1" in str(e.value)


def test_unknown_top_level_key(doc):
    doc["colour"] = "red"
    with pytest.raises(ParseError, match="colour"):
        _parse(doc)


def test_unknown_nested_key_has_path(doc):
    doc["agents"][1]["sped"] = 1.0
    with pytest.raises(ParseError, match=r"agents\[1\]"):
        _parse(doc)


def test_malformed_json():
    with pytest.raises(ParseError):
        sio.parse_scenario("{not json")


def test_wrong_schema_version(doc):
    doc["schema_version"] = 2
    with pytest.raises(ParseError, match="schema_version"):
        _parse(doc)


def test_interceptor_inside_range_rejected(doc):
    next(a for a in doc["agents"] if a["role"] == "R1")["position"] = [-4.0, 8.0]
    with pytest.raises(ValidationError, match="engagement range"):
        _parse(doc)


def test_attacker_inside_asset_range_rejected(doc):
    for a in doc["agents"]:
        if a["role"] == "Rs":
            a["position"] = [-5.0, 8.0]
    with pytest.raises(ValidationError, match="asset"):
        _parse(doc)


def test_missing_role(doc):
    doc["agents"] = [a for a in doc["agents"] if a["role"] != "R2"]
    with pytest.raises(ValidationError, match="R2"):
        _parse(doc)


def test_alpha_at_least_one_rejected(scenarios_dir):
    d = json.loads((scenarios_dir / "retreat_v.json").read_text())
    d["parameters"]["v_B_retreat"] = 3.0
    with pytest.raises(ValidationError) as e:
        _parse(d)
    assert e.value.path == "parameters.alpha"


def test_missing_file_is_validation_error(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        sio.load_scenario(tmp_path / "nope.json")


def test_empty_log_writes_headers():
    t, e = io.StringIO(), io.StringIO()
    sio.write_trajectory(TrajectoryLog(), t, e)
    assert t.getvalue() == "t,agent,x,y,heading,speed\n"
    assert e.getvalue() == "t,event,subjects\n"


@pytest.fixture(scope="module")
def coarse_run(request):
    sf = sio.load_scenario(request.config.rootpath / "scenarios" / "attack_v.json")
    setup = sio.attack_setup(sf)
    log, term = run_attack_stage(setup, SimConfig(dt=1e-2))
    t, e = io.StringIO(), io.StringIO()
    sio.write_trajectory(log, t, e)
    return setup, log, term, t.getvalue(), e.getvalue()


def test_trajectory_rows_and_terminal_cost(coarse_run):
    setup, log, term, text, _ = coarse_run
    lines = text.splitlines()
    steps = len(log.samples["B"])
    assert len(lines) - 1 == steps * len(log.agents)
    rows = sio.read_trajectory(io.StringIO(text))
    t, x, y, _, _ = rows["B"][-1]
    assert math.hypot(x - setup.scenario.Rs.x, y - setup.scenario.Rs.y) == pytest.approx(term.J, rel=1e-8)


def test_trajectory_reread_matches_printed_precision(coarse_run):
    _, log, _, text, _ = coarse_run
    rows = sio.read_trajectory(io.StringIO(text))
    for name, series in log.samples.items():
        for got, want in zip(rows[name], series):
            assert got == tuple(sio.round_sig(v) for v in want)


def test_event_csv(coarse_run):
    _, log, _, _, events = coarse_run
    lines = events.splitlines()
    assert lines[0] == "t,event,subjects"
    assert lines[-1].split(",")[1] == EventKind.RANGE_RHO_REACHED.value
    assert lines[-1].split(",")[2] == "B;R1;R2"


def test_output_is_deterministic(coarse_run):
    setup, _, _, text, events = coarse_run
    log, _ = run_attack_stage(setup, SimConfig(dt=1e-2))
    t, e = io.StringIO(), io.StringIO()
    sio.write_trajectory(log, t, e)
    assert t.getvalue() == text and e.getvalue() == events


def test_summary_fields_and_precision():
    doc = json.loads(sio.summary_json("attack", "Cooperative", 13.986992569151683, 13.98, "Red", 0.0522002265255))
    assert set(doc) == {"stage", "mode", "value", "terminal_cost", "winner", "theta_star", "events"}
    assert doc["value"] == 13.9869926
    assert sio.fmt(13.986992569151683) == "13.9869926"
