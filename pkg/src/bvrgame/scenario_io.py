"""Scenario files, trajectory/event CSVs and result summaries.

Scenario document (JSON, ``schema_version`` 1)::

    {
      "schema_version": 1,
      "stage": "attack" | "retreat" | "chained",
      "agents": [
        {"id": "B_L", "role": "B", "position": [x, y], "speed": 1.0, "heading": 0.0,
         "dynamics": {"kind": "HeadingLag", "tau_theta": 0.14},
         "retreat_dynamics": {"kind": "HeadingSpeedLag", "tau_theta": 0.14, "tau_v": 0.2}},
        ...
      ],
      "parameters": {"beta": 1.25, "rho": 5, "rho_s": 7, "alpha": 0.5, "w": 0.5,
                     "heading_constraint": "default" | null | {"lo": a, "width": b},
                     "v_B_retreat": 1.5, "v_missile": 3.0, "pairing": "index"},
      "sim": {"dt": 0.001, "capture_eps": 0.01, "replan_every": 1, "max_time": 200, "replan": false}
    }

Roles: B, BW, R1, R2, Rs (attack and chained); B, A1, D1, A2, D2 (retreat).
Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .attack import AttackScenario
from .errors import ParseError, ValidationError
from .geometry import Point2
from .retreat import Arc, MissilePair, RetreatScenario
from .sim import (
    AgentDynamics,
    AttackSetup,
    DynamicsSpec,
    DynKind,
    RetreatSetup,
    SimConfig,
    TrajectoryLog,
    default_constraint,
)

SCHEMA_VERSION = 1
STAGES = ("attack", "retreat", "chained")
ROLES = ("B", "BW", "R1", "R2", "Rs", "A1", "D1", "A2", "D2")
REQUIRED_ROLES = {
    "attack": ("B", "R1", "R2", "Rs"),
    "chained": ("B", "BW", "R1", "R2", "Rs"),
    "retreat": ("B", "A1", "D1"),
}
SIG = 9


def fmt(x: float) -> str:
    return f"{x:.{SIG}g}"


def round_sig(x: float) -> float:
    return float(fmt(x))


@dataclass(frozen=True)
class AgentRecord:
    id: str
    role: str
    position: Point2
    speed: float | None = None
    heading: float | None = None
    dynamics: DynamicsSpec | None = None
    retreat_dynamics: DynamicsSpec | None = None


@dataclass(frozen=True)
class Parameters:
    beta: float | None = None
    rho: float | None = None
    rho_s: float | None = None
    alpha: float | None = None
    w: float | None = None
    heading_constraint: Any = "default"
    v_B_retreat: float | None = None
    v_missile: float | None = None
    pairing: str | None = None


@dataclass(frozen=True)
class SimOverrides:
    dt: float | None = None
    capture_eps: float | None = None
    replan_every: int | None = None
    max_time: float | None = None
    replan: bool | None = None


@dataclass(frozen=True)
class ScenarioFile:
    stage: str
    agents: tuple[AgentRecord, ...]
    parameters: Parameters = field(default_factory=Parameters)
    sim: SimOverrides = field(default_factory=SimOverrides)
    schema_version: int = SCHEMA_VERSION

    def agent(self, role: str) -> AgentRecord | None:
        for a in self.agents:
            if a.role == role:
                return a
        return None

    def position(self, role: str) -> Point2:
        return self.agent(role).position


# ----------------------------------------------------------------- parsing


def _keys(obj: Any, allowed, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"{path or '<root>'}: expected an object")
    for k in obj:
        if k not in allowed:
            raise ParseError(f"{path + '.' if path else ''}{k}: unknown key")
    return obj


def _num(v: Any, path: str, integer: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{path}: expected a number")
    if integer and not float(v).is_integer():
        raise ParseError(f"{path}: expected an integer")
    if not math.isfinite(v):
        raise ParseError(f"{path}: must be finite")
    return int(v) if integer else float(v)


def _opt(d: dict, key: str, path: str, integer: bool = False):
    return None if d.get(key) is None else _num(d[key], f"{path}.{key}", integer)


def _dynamics(obj: Any, path: str) -> DynamicsSpec | None:
    if obj is None:
        return None
    d = _keys(obj, ("kind", "tau_theta", "tau_v"), path)
    kinds = [k.value for k in DynKind]
    if d.get("kind") not in kinds:
        raise ValidationError(f"{path}.kind", f"must be one of {kinds}")
    try:
        return DynamicsSpec(DynKind(d["kind"]), _opt(d, "tau_theta", path), _opt(d, "tau_v", path))
    except ValueError as exc:
        raise ValidationError(path, str(exc)) from exc


def _agent(obj: Any, path: str) -> AgentRecord:
    d = _keys(obj, ("id", "role", "position", "speed", "heading", "dynamics", "retreat_dynamics"), path)
    for k in ("id", "role", "position"):
        if k not in d:
            raise ParseError(f"{path}.{k}: missing")
    if not isinstance(d["id"], str):
        raise ParseError(f"{path}.id: expected a string")
    if d["role"] not in ROLES:
        raise ValidationError(f"{path}.role", f"must be one of {list(ROLES)}")
    pos = d["position"]
    if not isinstance(pos, list) or len(pos) != 2:
        raise ParseError(f"{path}.position: expected [x, y]")
    speed = _opt(d, "speed", path)
    if speed is not None and speed < 0:
        raise ValidationError(f"{path}.speed", "must be non-negative")
    return AgentRecord(
        id=d["id"],
        role=d["role"],
        position=Point2(_num(pos[0], f"{path}.position[0]"), _num(pos[1], f"{path}.position[1]")),
        speed=speed,
        heading=_opt(d, "heading", path),
        dynamics=_dynamics(d.get("dynamics"), f"{path}.dynamics"),
        retreat_dynamics=_dynamics(d.get("retreat_dynamics"), f"{path}.retreat_dynamics"),
    )


def _constraint(v: Any, path: str):
    if v is None or v == "default":
        return v
    if isinstance(v, dict):
        d = _keys(v, ("lo", "width"), path)
        if "lo" not in d or "width" not in d:
            raise ParseError(f"{path}: needs lo and width")
        width = _num(d["width"], f"{path}.width")
        if not 0.0 < width <= 2 * math.pi:
            raise ValidationError(f"{path}.width", "must lie in (0, 2 pi]")
        return {"lo": _num(d["lo"], f"{path}.lo"), "width": width}
    raise ParseError(f"{path}: expected \"default\", null or {{lo, width}}")


def parse_scenario(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"<root>: malformed JSON ({exc})") from exc
    doc = _keys(doc, ("schema_version", "stage", "agents", "parameters", "sim"), "")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"schema_version: expected {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    stage = doc.get("stage")
    if stage not in STAGES:
        raise ValidationError("stage", f"must be one of {list(STAGES)}")
    if not isinstance(doc.get("agents"), list):
        raise ParseError("agents: expected a list")
    agents = tuple(_agent(a, f"agents[{i}]") for i, a in enumerate(doc["agents"]))
    p = _keys(doc.get("parameters", {}), [f.name for f in fields(Parameters)], "parameters")
    pairing = p.get("pairing")
    if pairing is not None and pairing not in ("index", "best"):
        raise ValidationError("parameters.pairing", "must be 'index' or 'best'")
    params = Parameters(
        beta=_opt(p, "beta", "parameters"),
        rho=_opt(p, "rho", "parameters"),
        rho_s=_opt(p, "rho_s", "parameters"),
        alpha=_opt(p, "alpha", "parameters"),
        w=_opt(p, "w", "parameters"),
        heading_constraint=_constraint(p.get("heading_constraint", "default"), "parameters.heading_constraint"),
        v_B_retreat=_opt(p, "v_B_retreat", "parameters"),
        v_missile=_opt(p, "v_missile", "parameters"),
        pairing=pairing,
    )
    s = _keys(doc.get("sim", {}), [f.name for f in fields(SimOverrides)], "sim")
    replan = s.get("replan")
    if replan is not None and not isinstance(replan, bool):
        raise ParseError("sim.replan: expected a boolean")
    sim = SimOverrides(
        dt=_opt(s, "dt", "sim"),
        capture_eps=_opt(s, "capture_eps", "sim"),
        replan_every=_opt(s, "replan_every", "sim", integer=True),
        max_time=_opt(s, "max_time", "sim"),
        replan=replan,
    )
    sf = ScenarioFile(stage=stage, agents=agents, parameters=params, sim=sim)
    validate(sf)
    return sf


def validate(sf: ScenarioFile) -> None:
    """Game-level checks; each failure names the offending field."""
    seen: dict[str, int] = {}
    for i, a in enumerate(sf.agents):
        if a.role in seen:
            raise ValidationError(f"agents[{i}].role", f"duplicate role {a.role!r}")
        seen[a.role] = i
    for role in REQUIRED_ROLES[sf.stage]:
        if role not in seen:
            raise ValidationError("agents", f"stage {sf.stage!r} needs an agent with role {role!r}")
    p = sf.parameters
    if sf.stage in ("attack", "chained"):
        for name in ("beta", "rho", "rho_s"):
            if getattr(p, name) is None:
                raise ValidationError(f"parameters.{name}", "required for the attack stage")
        if not p.beta > 1.0:
            raise ValidationError("parameters.beta", f"beta > 1 is required (interceptors faster), got {p.beta}")
        if not p.rho > 0.0:
            raise ValidationError("parameters.rho", "must be positive")
        if not p.rho_s > 0.0:
            raise ValidationError("parameters.rho_s", "must be positive")
        B = sf.position("B")
        for role in ("R1", "R2"):
            if B.dist(sf.position(role)) <= p.rho:
                raise ValidationError(f"agents[{seen[role]}].position", f"{role} starts within engagement range of B")
        if B.dist(sf.position("Rs")) < p.rho_s:
            raise ValidationError(f"agents[{seen['B']}].position", "B starts inside the asset's engagement range")
        if sf.position("R1") == sf.position("R2"):
            raise ValidationError(f"agents[{seen['R2']}].position", "R1 and R2 coincide")
    if sf.stage in ("retreat", "chained"):
        a = retreat_alpha(sf)
        if not 0.0 < a < 1.0:
            raise ValidationError("parameters.alpha", f"alpha must lie in (0, 1), got {a}")
        if p.w is not None and not 0.0 <= p.w <= 1.0:
            raise ValidationError("parameters.w", "must lie in [0, 1]")
    if sf.stage == "retreat":
        if ("A2" in seen) != ("D2" in seen):
            raise ValidationError("agents", "A2 and D2 must be given together")
        for i in (1, 2):
            if f"A{i}" in seen and sf.position(f"A{i}") == sf.position(f"D{i}"):
                raise ValidationError(f"agents[{seen[f'D{i}']}].position", f"D{i} coincides with A{i}")
    s = sf.sim
    for name in ("dt", "capture_eps", "max_time"):
        v = getattr(s, name)
        if v is not None and not v > 0.0:
            raise ValidationError(f"sim.{name}", "must be positive")
    if s.replan_every is not None and s.replan_every < 1:
        raise ValidationError("sim.replan_every", "must be a positive integer")


def retreat_alpha(sf: ScenarioFile) -> float:
    p = sf.parameters
    if p.alpha is not None:
        return p.alpha
    if p.v_B_retreat is not None and p.v_missile is not None:
        return p.v_B_retreat / p.v_missile
    raise ValidationError("parameters.alpha", "give alpha or both v_B_retreat and v_missile")


# ------------------------------------------------------------ serializing


def _dyn_dict(d: DynamicsSpec) -> dict:
    out: dict[str, Any] = {"kind": d.kind.value}
    if d.tau_theta is not None:
        out["tau_theta"] = d.tau_theta
    if d.tau_v is not None:
        out["tau_v"] = d.tau_v
    return out


def scenario_to_dict(sf: ScenarioFile) -> dict:
    agents = []
    for a in sf.agents:
        d: dict[str, Any] = {"id": a.id, "role": a.role, "position": [a.position.x, a.position.y]}
        for k in ("speed", "heading"):
            if getattr(a, k) is not None:
                d[k] = getattr(a, k)
        for k in ("dynamics", "retreat_dynamics"):
            if getattr(a, k) is not None:
                d[k] = _dyn_dict(getattr(a, k))
        agents.append(d)
    params = {f.name: getattr(sf.parameters, f.name) for f in fields(Parameters)}
    params = {k: v for k, v in params.items() if v is not None or k == "heading_constraint"}
    sim = {f.name: getattr(sf.sim, f.name) for f in fields(SimOverrides) if getattr(sf.sim, f.name) is not None}
    return {"schema_version": sf.schema_version, "stage": sf.stage, "agents": agents, "parameters": params, "sim": sim}


def serialize_scenario(sf: ScenarioFile) -> str:
    return json.dumps(scenario_to_dict(sf), indent=2) + "\n"


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ValidationError(str(path), "scenario file not found") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text") from exc
    return parse_scenario(text)


# ------------------------------------------------------- solver plumbing


def sim_config(sf: ScenarioFile, **overrides) -> SimConfig:
    vals = {f.name: getattr(sf.sim, f.name) for f in fields(SimConfig)}
    vals.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**{k: v for k, v in vals.items() if v is not None})


def attack_scenario(sf: ScenarioFile) -> AttackScenario:
    p = sf.parameters
    return AttackScenario(sf.position("B"), sf.position("R1"), sf.position("R2"), sf.position("Rs"), p.beta, p.rho, p.rho_s)


def attack_setup(sf: ScenarioFile) -> AttackSetup:
    B = sf.agent("B")
    BW = sf.agent("BW")
    heads = {a.role: a.heading for a in sf.agents if a.heading is not None}
    dyn = {a.role: a.dynamics for a in sf.agents if a.dynamics is not None}
    return AttackSetup(
        attack_scenario(sf),
        B_W=BW.position if BW else None,
        v_B=B.speed if B.speed is not None else 1.0,
        headings=heads,
        dynamics=dyn,
    )


def _constraint_arc(v) -> Arc | str | None:
    if isinstance(v, dict):
        return Arc.span(v["lo"], v["width"], "constraint")
    return v


def retreat_setup(sf: ScenarioFile) -> RetreatSetup:
    p = sf.parameters
    alpha = retreat_alpha(sf)
    v_missile = p.v_missile if p.v_missile is not None else 3.0
    B = sf.agent("B")
    return RetreatSetup(
        v_B=p.v_B_retreat if p.v_B_retreat is not None else alpha * v_missile,
        v_missile=v_missile,
        w=p.w if p.w is not None else 0.5,
        constraint=_constraint_arc(p.heading_constraint),
        pairing=p.pairing or "index",
        dynamics=B.retreat_dynamics or DynamicsSpec(),
        replan=bool(sf.sim.replan),
    )


def retreat_problem(sf: ScenarioFile) -> tuple[RetreatScenario, AgentDynamics, float]:
    """Explicit retreat-stage scenario with B's initial kinematic state and missile speed."""
    rs = retreat_setup(sf)
    alpha = rs.v_B / rs.v_missile
    pair1 = MissilePair(sf.position("A1"), sf.position("D1"), alpha)
    pair2 = MissilePair(sf.position("A2"), sf.position("D2"), alpha) if sf.agent("A2") else None
    constraint = rs.constraint
    b = sf.agent("B")
    heading = b.heading if b.heading is not None else 0.0
    if constraint == "default":
        bw = sf.agent("BW")
        if bw is None:
            constraint = None
        else:
            constraint = default_constraint(b.position, bw.position, heading)
    sc = RetreatScenario(b.position, pair1, pair2, rs.w if pair2 else 1.0, constraint)
    speed = b.speed if b.speed is not None else rs.v_B
    B = AgentDynamics(b.position, heading, speed, heading, rs.v_B, rs.dynamics)
    return sc, B, rs.v_missile


# ----------------------------------------------------------------- output


def write_trajectory(log: TrajectoryLog, traj_sink, events_sink) -> None:
    """Trajectory CSV ``t,agent,x,y,heading,speed`` and event CSV ``t,event,subjects``."""
    order = {name: i for i, name in enumerate(log.agents)}
    rows = sorted(
        ((r[0], order[name], name, r) for name, rs in log.samples.items() for r in rs), key=lambda e: (e[0], e[1])
    )
    w = csv.writer(traj_sink, lineterminator="\n")
    w.writerow(["t", "agent", "x", "y", "heading", "speed"])
    for t, _, name, r in rows:
        w.writerow([fmt(t), name, fmt(r[1]), fmt(r[2]), fmt(r[3]), fmt(r[4])])
    w = csv.writer(events_sink, lineterminator="\n")
    w.writerow(["t", "event", "subjects"])
    for e in log.events:
        w.writerow([fmt(e.t), e.kind.value, ";".join(e.subjects)])


def read_trajectory(source) -> dict[str, list[tuple[float, float, float, float, float]]]:
    out: dict[str, list] = {}
    for row in csv.DictReader(source):
        out.setdefault(row["agent"], []).append(
            tuple(float(row[k]) for k in ("t", "x", "y", "heading", "speed"))
        )
    return out


def _clean(v: Any) -> Any:
    if isinstance(v, float):
        return round_sig(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):
        return v.value
    return v


def summary_json(
    stage: str,
    mode: str | None,
    value: float | None,
    terminal_cost: float | None,
    winner: str | None,
    theta_star: float | None,
    events: list | None = None,
    **extra: Any,
) -> str:
    doc = {
        "stage": stage,
        "mode": mode,
        "value": value,
        "terminal_cost": terminal_cost,
        "winner": winner,
        "theta_star": theta_star,
        "events": [{"t": e.t, "event": e.kind.value, "subjects": list(e.subjects)} for e in (events or [])],
    }
    doc.update(extra)
    return json.dumps(_clean(doc), indent=2) + "\n"


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()
