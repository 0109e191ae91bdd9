"""Closed-loop engagement simulator.

Vehicles follow simple motion or a first-order lag on heading (and speed).
Every ``replan_every`` steps each feedback-driven agent re-solves its game at
the current joint state and takes the optimal heading as its command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

from .attack import AttackScenario, AttackSolution, select_strategy
from .errors import GameError, SolverFailure, WrongTermination
from .geometry import TWO_PI, Point2, as_point, heading_to, wrap_angle
from .retreat import Arc, HeadingResult, MissilePair, RetreatScenario, admissible_arcs, optimize_heading, pair_game_solve


class DynKind(str, Enum):
    SIMPLE = "SimpleMotion"
    HEADING_LAG = "HeadingLag"
    HEADING_SPEED_LAG = "HeadingSpeedLag"


@dataclass(frozen=True)
class DynamicsSpec:
    """Vehicle model of one agent (lag constants in seconds)."""

    kind: DynKind = DynKind.SIMPLE
    tau_theta: float | None = None
    tau_v: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DynKind(self.kind))
        if self.kind is not DynKind.SIMPLE and not (self.tau_theta and self.tau_theta > 0):
            raise ValueError(f"{self.kind.value} needs tau_theta > 0")
        if self.kind is DynKind.HEADING_SPEED_LAG and not (self.tau_v and self.tau_v > 0):
            raise ValueError("HeadingSpeedLag needs tau_v > 0")


SIMPLE = DynamicsSpec()


@dataclass(frozen=True)
class AgentDynamics:
    """Kinematic state of one vehicle.

    ``heading`` is kept unwrapped; ``commanded_heading`` is stored on the same
    branch so the lag turns the intended way (see :func:`command_heading`).
    """

    position: Point2
    heading: float
    speed: float
    commanded_heading: float
    commanded_speed: float
    spec: DynamicsSpec = SIMPLE

    @classmethod
    def at(cls, position, heading: float, speed: float, spec: DynamicsSpec = SIMPLE) -> "AgentDynamics":
        return cls(as_point(position), heading, speed, heading, speed, spec)


def command_heading(agent: AgentDynamics, theta: float, direction: int = 0) -> AgentDynamics:
    """Set the heading command, turning by the shortest arc or in ``direction`` (+1 left, -1 right)."""
    err = wrap_angle(theta - agent.heading)
    if direction > 0 and err < 0.0:
        err += TWO_PI
    elif direction < 0 and err > 0.0:
        err -= TWO_PI
    return replace(agent, commanded_heading=agent.heading + err)


def step_agent(agent: AgentDynamics, dt: float) -> AgentDynamics:
    """Advance one step: exact lag update, Euler position at the initial heading/speed."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    spec = agent.spec
    pos = Point2(
        agent.position.x + agent.speed * dt * math.cos(agent.heading),
        agent.position.y + agent.speed * dt * math.sin(agent.heading),
    )
    if spec.kind is DynKind.SIMPLE:
        heading, speed = agent.commanded_heading, agent.commanded_speed
    else:
        k = math.exp(-dt / spec.tau_theta)
        heading = agent.commanded_heading + (agent.heading - agent.commanded_heading) * k
        speed = agent.commanded_speed
        if spec.kind is DynKind.HEADING_SPEED_LAG:
            speed = agent.commanded_speed + (agent.speed - agent.commanded_speed) * math.exp(-dt / spec.tau_v)
    return AgentDynamics(pos, heading, speed, agent.commanded_heading, agent.commanded_speed, spec)


def _aligned(agent: AgentDynamics) -> AgentDynamics:
    # simple-motion agents take their command before moving
    if agent.spec.kind is DynKind.SIMPLE:
        return replace(agent, heading=agent.commanded_heading, speed=agent.commanded_speed)
    return agent


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    capture_eps: float = 1e-2
    replan_every: int = 1
    max_time: float = 200.0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.capture_eps > 0.0:
            raise ValueError("capture_eps must be positive")
        if self.replan_every < 1:
            raise ValueError("replan_every must be a positive integer")


class EventKind(str, Enum):
    RANGE_RHO_REACHED = "RangeRhoReached"
    GAMMA_REACHED = "GammaReached"
    MISSILE_LAUNCH = "MissileLaunch"
    INTERCEPTION = "Interception"
    CAPTURE = "Capture"
    STAGE_TRANSITION = "StageTransition"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class Event:
    t: float
    kind: EventKind
    subjects: tuple[str, ...]


@dataclass
class TrajectoryLog:
    """Per-agent samples ``(t, x, y, heading, speed)`` and a list of events."""

    samples: dict[str, list[tuple[float, float, float, float, float]]] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)

    def record(self, t: float, agents: Mapping[str, AgentDynamics]) -> None:
        for name, a in agents.items():
            self.samples.setdefault(name, []).append((t, a.position.x, a.position.y, wrap_angle(a.heading), a.speed))

    def event(self, t: float, kind: EventKind, *subjects: str) -> None:
        self.events.append(Event(t, kind, tuple(subjects)))

    def extend(self, other: "TrajectoryLog") -> None:
        for name, rows in other.samples.items():
            mine = self.samples.setdefault(name, [])
            last = mine[-1][0] if mine else -math.inf
            mine.extend(r for r in rows if r[0] > last)
        self.events.extend(other.events)

    @property
    def agents(self) -> list[str]:
        return list(self.samples)

    def final(self, agent: str) -> tuple[float, float, float, float, float]:
        return self.samples[agent][-1]


# ------------------------------------------------------------------- attack


@dataclass(frozen=True)
class AttackSetup:
    scenario: AttackScenario
    B_W: Point2 | None = None
    v_B: float = 1.0
    headings: Mapping[str, float] = field(default_factory=dict)
    dynamics: Mapping[str, DynamicsSpec] = field(default_factory=dict)


@dataclass(frozen=True)
class AttackTerminal:
    t: float
    kind: str  # "T_R", "T_Gamma" or "Timeout"
    positions: dict[str, Point2]
    headings: dict[str, float]
    speeds: dict[str, float]
    J: float
    blocked_by: tuple[str, ...]


def _attack_state(agents: Mapping[str, AgentDynamics]) -> dict:
    return {k: (a.position.x, a.position.y, wrap_angle(a.heading), a.speed) for k, a in agents.items()}


def run_attack_stage(
    setup: AttackSetup,
    cfg: SimConfig = SimConfig(),
    deviations: Mapping[str, float] | None = None,
) -> tuple[TrajectoryLog, AttackTerminal]:
    """Replay the attack-stage feedback until a termination set is reached.

    ``deviations`` maps an agent ("B", "R1", "R2") to a constant heading it
    flies instead of its feedback strategy.
    """
    sc = setup.scenario
    deviations = dict(deviations or {})
    speeds = {"B": setup.v_B, "R1": sc.beta * setup.v_B, "R2": sc.beta * setup.v_B}
    starts = {"B": sc.B, "R1": sc.R1, "R2": sc.R2}
    agents: dict[str, AgentDynamics] = {
        k: AgentDynamics.at(starts[k], setup.headings.get(k, 0.0), speeds[k], setup.dynamics.get(k, SIMPLE))
        for k in ("B", "R1", "R2")
    }
    if setup.B_W is not None:
        agents["BW"] = AgentDynamics.at(setup.B_W, setup.headings.get("BW", setup.headings.get("B", 0.0)), setup.v_B)
    log = TrajectoryLog()
    ranges = {"R1": sc.rho, "R2": sc.rho}

    def check(t: float) -> AttackTerminal | None:
        B = agents["B"].position
        dRs = B.dist(sc.Rs)
        hit = [k for k in ("R1", "R2") if B.dist(agents[k].position) <= ranges[k]]
        kind = None
        if dRs <= sc.rho_s:
            kind = "T_Gamma"
            log.event(t, EventKind.GAMMA_REACHED, "B", "Rs")
        elif hit:
            kind = "T_R"
            # an interceptor within one step of range counts as simultaneous
            slack = cfg.dt * (speeds["B"] + sc.beta * setup.v_B)
            hit = [k for k in ("R1", "R2") if B.dist(agents[k].position) <= ranges[k] + slack]
            log.event(t, EventKind.RANGE_RHO_REACHED, "B", *hit)
        elif t >= cfg.max_time - 0.5 * cfg.dt:
            kind = "Timeout"
            log.event(t, EventKind.TIMEOUT)
        if kind is None:
            return None
        return AttackTerminal(
            t=t,
            kind=kind,
            positions={k: a.position for k, a in agents.items()},
            headings={k: wrap_angle(a.heading) for k, a in agents.items()},
            speeds={k: a.speed for k, a in agents.items()},
            J=dRs,
            blocked_by=tuple(hit) if kind == "T_R" else (),
        )

    step = 0
    t = 0.0
    while True:
        term = check(t)
        if term is not None:
            log.record(t, agents)
            return log, term
        if step % cfg.replan_every == 0:
            if len(deviations) < 3:
                cur = sc.moved(agents["B"].position, agents["R1"].position, agents["R2"].position)
                try:
                    sol: AttackSolution = select_strategy(cur)
                except GameError as exc:
                    raise SolverFailure(f"attack strategy failed at t={t:.6g}: {exc}", _attack_state(agents)) from exc
            for k in ("B", "R1", "R2"):
                theta = deviations[k] if k in deviations else sol.heading(k)
                agents[k] = _aligned(command_heading(agents[k], theta))
        log.record(t, agents)
        B_old = agents["B"].position
        for k in ("B", "R1", "R2"):
            agents[k] = step_agent(agents[k], cfg.dt)
        if "BW" in agents:
            # the wingman flies in formation with the leader
            d = agents["B"].position - B_old
            agents["BW"] = replace(
                agents["BW"], position=agents["BW"].position + d, heading=agents["B"].heading, speed=agents["B"].speed
            )
        step += 1
        t = step * cfg.dt


def analytic_attack_terminal(setup: AttackSetup) -> AttackTerminal:
    """Terminal state under simple motion and optimal play (straight lines to the aimpoint)."""
    sc = setup.scenario
    sol = select_strategy(sc)
    aim = sol.aimpoint
    tf = sc.B.dist(aim) / setup.v_B
    pos = {"B": aim}
    heads = {"B": sol.theta_B}
    for k, R in (("R1", sc.R1), ("R2", sc.R2)):
        travel = min(sc.beta * setup.v_B * tf, R.dist(aim))
        pos[k] = R + Point2(math.cos(sol.heading(k)), math.sin(sol.heading(k))).scaled(travel)
        heads[k] = sol.heading(k)
    if setup.B_W is not None:
        pos["BW"] = setup.B_W + (aim - sc.B)
        heads["BW"] = sol.theta_B
    if sol.value <= sc.rho_s:
        kind, blocked = "T_Gamma", ()
    else:
        kind = "T_R"
        tol = 1e-9 * max(1.0, sc.B.dist(sc.Rs))
        blocked = tuple(k for k in ("R1", "R2") if pos[k].dist(aim) <= sc.rho + tol)
    speeds = {k: (setup.v_B if k in ("B", "BW") else sc.beta * setup.v_B) for k in pos}
    return AttackTerminal(tf, kind, pos, heads, speeds, sol.value, blocked)


# ------------------------------------------------------------------ retreat


def default_constraint(B: Point2, B_W: Point2, theta_a: float) -> Arc:
    """Turn away from the wingman: [theta_a, theta_a + pi) if B_W is on the right."""
    cross = math.cos(theta_a) * (B_W.y - B.y) - math.sin(theta_a) * (B_W.x - B.x)
    if cross <= 0.0:
        return Arc.span(theta_a, math.pi, "constraint")
    return Arc.span(theta_a - math.pi, math.pi, "constraint")


def _admissible_width(sc: RetreatScenario) -> float:
    try:
        arcs, _ = admissible_arcs(sc)
    except GameError:
        return -1.0
    return sum(a.width for a in arcs)


def spawn_retreat(
    terminal: AttackTerminal,
    v_B: float,
    v_missile: float,
    w: float = 0.5,
    constraint: Arc | str | None = "default",
    pairing: str = "index",
) -> RetreatScenario:
    """Missile pairs launched from the end-of-attack positions."""
    if terminal.kind != "T_R":
        raise WrongTermination(f"attack stage ended in {terminal.kind}; no retreat game is posed")
    B = terminal.positions["B"]
    BW = terminal.positions.get("BW")
    if BW is None:
        raise WrongTermination("no wingman position available to launch defenders")
    alpha = v_B / v_missile
    if constraint == "default":
        constraint = default_constraint(B, BW, terminal.headings["B"])
    pairs = [MissilePair(terminal.positions[k], BW, alpha) for k in terminal.blocked_by]
    if len(pairs) == 1:
        return RetreatScenario(B, pairs[0], None, 1.0, constraint)
    sc = RetreatScenario(B, pairs[0], pairs[1], w, constraint)
    if pairing == "best":
        defenders = (pairs[1].D, pairs[0].D)
        swapped = RetreatScenario(
            B, replace(pairs[0], D=defenders[0]), replace(pairs[1], D=defenders[1]), w, constraint
        )
        if _admissible_width(swapped) > _admissible_width(sc):
            sc = swapped
    elif pairing != "index":
        raise ValueError(f"unknown pairing mode {pairing!r}")
    return sc


def _turn_direction(constraint: Arc | None, heading: float, target: float) -> int:
    """Turn sense whose swept arc stays inside the heading constraint (0 = shortest)."""
    if constraint is None:
        return 0
    left = (target - heading) % TWO_PI
    if constraint.contains(heading + 0.5 * left, 0.0):
        return 1
    if constraint.contains(heading - 0.5 * (TWO_PI - left), 0.0):
        return -1
    return 0


def first_contact(p0: Point2, p1: Point2, q0: Point2, q1: Point2, eps: float) -> float | None:
    """Earliest fraction s of a step at which linearly moving p and q come within ``eps``."""
    rx, ry = p0.x - q0.x, p0.y - q0.y
    vx, vy = (p1.x - q1.x) - rx, (p1.y - q1.y) - ry
    c = rx * rx + ry * ry - eps * eps
    if c <= 0.0:
        return 0.0
    a = vx * vx + vy * vy
    b = 2.0 * (rx * vx + ry * vy)
    disc = b * b - 4.0 * a * c
    if a == 0.0 or disc < 0.0 or b >= 0.0:
        return None
    s = (-b - math.sqrt(disc)) / (2.0 * a)
    return s if s <= 1.0 else None


def _lerp(p: Point2, q: Point2, s: float) -> Point2:
    return Point2(p.x + s * (q.x - p.x), p.y + s * (q.y - p.y))


@dataclass(frozen=True)
class RetreatOutcome:
    t: float
    loss: bool
    theta_star: float
    heading: HeadingResult | None
    intercept_times: tuple[float | None, ...]
    separations: tuple[float | None, ...]
    J_c: float | None
    timeout: bool = False


def run_retreat_stage(
    sc: RetreatScenario,
    B: AgentDynamics,
    v_missile: float,
    cfg: SimConfig = SimConfig(),
    replan: bool = False,
    t0: float = 0.0,
    heading: HeadingResult | None = None,
) -> tuple[TrajectoryLog, RetreatOutcome]:
    """Fly the optimal retreat heading while the missile pairs replay their feedback.

    The missiles always solve with the nominal speed ratio of ``sc`` and B's
    current heading, so lag in B's manoeuvre is seen as it happens.
    """
    if heading is None:
        heading = optimize_heading(sc)
    theta_star = heading.theta
    B = _aligned(command_heading(B, theta_star, _turn_direction(sc.constraint, B.heading, theta_star)))
    missiles: dict[str, AgentDynamics] = {}
    for i, p in enumerate(sc.pairs, start=1):
        missiles[f"A{i}"] = AgentDynamics.at(p.A, heading_to(p.A, sc.B), v_missile)
        missiles[f"D{i}"] = AgentDynamics.at(p.D, heading_to(p.D, p.A), v_missile)
    n = len(sc.pairs)
    active = [True] * n
    t_int: list[float | None] = [None] * n
    sep: list[float | None] = [None] * n
    log = TrajectoryLog()
    for i in range(1, n + 1):
        log.event(t0, EventKind.MISSILE_LAUNCH, f"A{i}", f"D{i}")
    step = 0
    t = t0
    loss = timeout = False
    prev: dict[str, Point2] | None = None
    while True:
        # termination checks over the step just taken, so fast closures are not stepped over
        now = {"B": B.position, **{k: a.position for k, a in missiles.items()}}
        before = prev or now
        for i in range(n):
            if not active[i]:
                continue
            a, d = f"A{i + 1}", f"D{i + 1}"
            s_cap = first_contact(before[a], now[a], before["B"], now["B"], cfg.capture_eps)
            s_int = first_contact(before[a], now[a], before[d], now[d], cfg.capture_eps)
            if s_cap is not None and (s_int is None or s_cap <= s_int):
                log.event(t - (1.0 - s_cap) * cfg.dt if prev else t, EventKind.CAPTURE, a, "B")
                loss = True
            elif s_int is not None:
                t_hit = t - (1.0 - s_int) * cfg.dt if prev else t
                log.event(t_hit, EventKind.INTERCEPTION, d, a)
                active[i] = False
                t_int[i] = t_hit
                sep[i] = _lerp(before[a], now[a], s_int).dist(_lerp(before["B"], now["B"], s_int))
        if loss or not any(active) or t - t0 >= cfg.max_time - 0.5 * cfg.dt:
            timeout = any(active) and not loss
            if timeout:
                log.event(t, EventKind.TIMEOUT)
            agents = {"B": B, **missiles}
            log.record(t, agents)
            break
        if step % cfg.replan_every == 0:
            if replan and step > 0:
                live = RetreatScenario(
                    B.position,
                    MissilePair(missiles["A1"].position, missiles["D1"].position, sc.pair1.alpha),
                    None
                    if n == 1
                    else MissilePair(missiles["A2"].position, missiles["D2"].position, sc.pair2.alpha),
                    sc.w,
                    sc.constraint,
                )
                try:
                    theta_star = optimize_heading(live).theta
                except GameError:
                    pass
                B = command_heading(B, theta_star)
            for i, p in enumerate(sc.pairs, start=1):
                if not active[i - 1]:
                    continue
                A, D = missiles[f"A{i}"], missiles[f"D{i}"]
                try:
                    sol = pair_game_solve(MissilePair(A.position, D.position, p.alpha), B.position, B.heading, check=False)
                except GameError as exc:
                    state = {k: (a.position.x, a.position.y, wrap_angle(a.heading)) for k, a in {"B": B, **missiles}.items()}
                    raise SolverFailure(f"pair {i} strategy failed at t={t:.6g}: {exc}", state) from exc
                missiles[f"A{i}"] = _aligned(command_heading(A, sol.chi_star))
                missiles[f"D{i}"] = _aligned(command_heading(D, sol.psi_star))
        log.record(t, {"B": B, **missiles})
        prev = {"B": B.position, **{k: a.position for k, a in missiles.items()}}
        B = step_agent(B, cfg.dt)
        for i in range(n):
            if active[i]:
                for k in (f"A{i + 1}", f"D{i + 1}"):
                    missiles[k] = step_agent(missiles[k], cfg.dt)
        step += 1
        t = t0 + step * cfg.dt
    # contact times are interpolated inside a step, so keep the event list in time order
    log.events.sort(key=lambda e: e.t)
    J_c = None
    if all(s is not None for s in sep):
        J_c = sum(w * s for w, s in zip(sc.weights, sep))
    return log, RetreatOutcome(t, loss, theta_star, heading, tuple(t_int), tuple(sep), J_c, timeout)


# ------------------------------------------------------------------ chained


@dataclass(frozen=True)
class RetreatSetup:
    v_B: float = 1.5
    v_missile: float = 3.0
    w: float = 0.5
    constraint: Arc | str | None = "default"
    pairing: str = "index"
    dynamics: DynamicsSpec = SIMPLE
    replan: bool = False


@dataclass(frozen=True)
class ChainedResult:
    log: TrajectoryLog
    attack: AttackTerminal
    retreat_scenario: RetreatScenario | None
    retreat: RetreatOutcome | None


def run_chained(attack: AttackSetup, retreat: RetreatSetup, cfg: SimConfig = SimConfig()) -> ChainedResult:
    log, term = run_attack_stage(attack, cfg)
    if term.kind != "T_R":
        return ChainedResult(log, term, None, None)
    sc = spawn_retreat(term, retreat.v_B, retreat.v_missile, retreat.w, retreat.constraint, retreat.pairing)
    log.event(term.t, EventKind.STAGE_TRANSITION, "attack", "retreat")
    B = AgentDynamics(
        term.positions["B"], term.headings["B"], term.speeds["B"], term.headings["B"], retreat.v_B, retreat.dynamics
    )
    rlog, outcome = run_retreat_stage(sc, B, retreat.v_missile, cfg, retreat.replan, t0=term.t)
    log.extend(rlog)
    return ChainedResult(log, term, sc, outcome)
