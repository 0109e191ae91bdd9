"""Acceptance criteria for the solver, one test (and one report line) per criterion.

Each test appends a PASS/FAIL line to ``conftest.ACCEPTANCE_LINES``; the lines
are echoed in the terminal summary so a plain ``pytest`` run lists them all.
"""

from __future__ import annotations

import math
import statistics
import time

import numpy as np
import pytest

import conftest
from bvrgame import scenario_io as sio
from bvrgame.attack import Mode, select_strategy, solo_stationarity_residual, solo_stationary_radii
from bvrgame.errors import NoStationaryPoint
from bvrgame.geometry import apollonius
from bvrgame.retreat import MissilePair, optimize_heading, pair_game_solve, retreat_quartic, retreat_stationarity_residual
from bvrgame.rootfind import real_roots
from bvrgame.sim import (
    AgentDynamics,
    SimConfig,
    analytic_attack_terminal,
    run_attack_stage,
    run_retreat_stage,
    spawn_retreat,
)
from oracles import attack_value_oracle, random_attack_scenario, random_pair_game, retreat_value_oracle


def report(n: int, ok: bool, text: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _load(name: str) -> sio.ScenarioFile:
    return sio.load_scenario(conftest.SCENARIOS / name)


def _retreat_problem(sf: sio.ScenarioFile, term):
    rs = sio.retreat_setup(sf)
    sc = spawn_retreat(term, rs.v_B, rs.v_missile, rs.w, rs.constraint, rs.pairing)
    B = AgentDynamics(
        term.positions["B"], term.headings["B"], term.speeds["B"], term.headings["B"], rs.v_B, rs.dynamics
    )
    return sc, B, rs.v_missile


# ------------------------------------------------------------------ criteria


def test_criterion_1_attack_value():
    sc = sio.attack_scenario(_load("attack_v.json"))
    select_strategy(sc)
    times = []
    for _ in range(20):
        t0 = time.perf_counter()
        sol = select_strategy(sc)
        times.append(time.perf_counter() - t0)
    dt = statistics.median(times)
    ok = abs(sol.value - 13.9870) <= 1e-3 and dt < 1e-2
    report(1, ok, f"V={sol.value:.6f} (target 13.9870 +/- 1e-3), mode={sol.mode.value}, runtime {dt * 1e3:.2f} ms (< 10 ms)")


def test_criterion_2_lagged_attack_simulation():
    setup = sio.attack_setup(_load("attack_v_lagged.json"))
    t0 = time.perf_counter()
    _, term = run_attack_stage(setup, SimConfig(dt=1e-3))
    dt = time.perf_counter() - t0
    simultaneous = term.kind == "T_R" and set(term.blocked_by) == {"R1", "R2"}
    ok = simultaneous and abs(term.J - 13.9052) <= 0.05 and dt < 5.0
    report(
        2,
        ok,
        f"termination={term.kind} blocked_by={','.join(term.blocked_by)} J={term.J:.4f} "
        f"(target 13.9052 +/- 0.05), runtime {dt:.2f} s (< 5 s)",
    )


def test_criterion_3_retreat_value_and_heading():
    sf = _load("chained_v.json")
    term = analytic_attack_terminal(sio.attack_setup(sf))
    t0 = time.perf_counter()
    sc, _, _ = _retreat_problem(sf, term)
    res = optimize_heading(sc)
    dt = time.perf_counter() - t0
    ok_theta = abs(res.theta - 3.1956) <= 1e-2 and res.constraint_active
    ok_value = abs(res.value - 3.2442) <= 1e-2
    report(
        3,
        ok_theta and ok_value and dt < 0.1,
        f"theta*={res.theta:.5f} (target 3.1956 +/- 1e-2) active={res.constraint_active}, "
        f"J_c={res.value:.5f} (target 3.2442 +/- 1e-2), runtime {dt * 1e3:.1f} ms (< 100 ms)",
    )


def test_criterion_4_constrained_retreat_simulation():
    sf = _load("chained_v_lagged.json")
    cfg = sio.sim_config(sf)
    _, term = run_attack_stage(sio.attack_setup(sf), cfg)
    assert term.kind == "T_R"
    sc, B, v_missile = _retreat_problem(sf, term)
    t0 = time.perf_counter()
    _, out = run_retreat_stage(sc, B, v_missile, cfg, t0=term.t)
    dt = time.perf_counter() - t0
    t1, t2 = out.intercept_times
    gap = t1 - t2 if t1 is not None and t2 is not None else math.nan
    ok_J = abs(out.J_c - 2.9308) <= 0.06
    ok_gap = abs(gap - 0.1) <= 0.05
    report(
        4,
        ok_J and ok_gap and not out.loss and dt < 5.0,
        f"J_c={out.J_c:.4f} (target 2.9308 +/- 0.06), A2 intercepted {gap:.3f} s before A1 "
        f"(target 0.1 +/- 0.05), loss={out.loss}, retreat runtime {dt:.2f} s (< 5 s)",
    )


def test_criterion_5_oracle_equivalence():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst_a = worst_r = 0.0
    bad = 0
    for k in range(500):
        sc = random_attack_scenario(rng, behind=k % 2 == 0)
        got = select_strategy(sc).value
        want = attack_value_oracle(sc.B, sc.R1, sc.R2, sc.Rs, sc.beta, sc.rho)
        err = abs(got - want) / want if want > 1e-9 else abs(got - want)
        worst_a = max(worst_a, err)
        bad += err > 1e-5
    for _ in range(500):
        pair, B, th = random_pair_game(rng)
        got = pair_game_solve(pair, B, th).value
        want = retreat_value_oracle(pair.A, pair.D, B, pair.alpha, th)
        err = abs(got - want) / want if want > 1e-9 else abs(got - want)
        worst_r = max(worst_r, err)
        bad += err > 1e-5
    dt = time.perf_counter() - t0
    report(
        5,
        bad == 0 and dt < 120.0,
        f"500 attack + 500 retreat cases, {bad} beyond 1e-5 relative "
        f"(worst attack {worst_a:.1e}, worst retreat {worst_r:.1e}), runtime {dt:.1f} s (< 120 s)",
    )


def _defining_properties(n: int = 1000):
    rng = np.random.default_rng(6)
    worst = dict.fromkeys(("oval", "apollonius", "bisector", "stationarity"), 0.0)
    count = dict.fromkeys(worst, 0)

    def note(key, value):
        worst[key] = max(worst[key], value)
        count[key] += 1

    # interception points of the attack stage lie on the blocking ovals
    k = 0
    while count["oval"] < n or count["bisector"] < n // 2:
        sc = random_attack_scenario(rng, behind=k % 2 == 0)
        k += 1
        sol = select_strategy(sc)
        P = sol.aimpoint
        scale = max(sc.B.dist(sc.R1), sc.B.dist(sc.R2))
        blockers = {Mode.COOPERATIVE: (sc.R1, sc.R2), Mode.SOLO1: (sc.R1,), Mode.SOLO2: (sc.R2,)}.get(sol.mode, ())
        for R in blockers:
            note("oval", abs(R.dist(P) - sc.rho - sc.beta * sc.B.dist(P)) / scale)
        if sol.mode is Mode.COOPERATIVE:
            note("bisector", abs(sc.R1.dist(P) - sc.R2.dist(P)) / scale)

    # interception points of the retreat stage are equidistant from the missiles
    for _ in range(n):
        pair, B, th = random_pair_game(rng)
        s = pair_game_solve(pair, B, th)
        d = pair.A.dist(pair.D)
        note("bisector", abs(pair.A.dist(s.intercept_point) - pair.D.dist(s.intercept_point)) / d)
        frame, _ = pair.frame()
        Bp = frame.to_relative(B)
        note("stationarity", retreat_stationarity_residual(pair.alpha, s.x_m, Bp.y, s.d_m, math.cos(s.phi), s.y_star))

    # Apollonius circle: points where B and A arrive together
    for _ in range(n):
        A, B = rng.uniform(-20, 20, 2), rng.uniform(-20, 20, 2)
        if np.hypot(*(A - B)) < 1e-2:
            continue
        alpha = rng.uniform(0.05, 0.95)
        c = apollonius(A, B, alpha)
        t = rng.uniform(-math.pi, math.pi)
        P = np.array([c.center.x + c.radius * math.cos(t), c.center.y + c.radius * math.sin(t)])
        dA = np.hypot(*(P - A))
        note("apollonius", abs(np.hypot(*(P - B)) - alpha * dA) / max(dA, np.hypot(*(A - B))))

    # accepted solo-sextic roots satisfy the un-squared stationarity condition
    while count["stationarity"] < 2 * n:
        x1, beta, d_s = rng.uniform(1, 20), rng.uniform(1.05, 2.0), rng.uniform(1, 40)
        rho, phi = rng.uniform(0.1, 0.9) * x1, rng.uniform(0, math.pi)
        try:
            radii = solo_stationary_radii(x1, beta, rho, d_s, phi)
        except NoStationaryPoint:
            continue
        for r in radii:
            note("stationarity", solo_stationarity_residual(x1, beta, rho, d_s, phi, r))
    return worst, count


def test_criterion_6_defining_properties():
    worst, count = _defining_properties()
    ok = all(v <= 1e-6 for v in worst.values()) and all(c >= 1000 for c in count.values())
    detail = ", ".join(f"{k} {worst[k]:.1e} over {count[k]}" for k in worst)
    report(6, ok, f"worst normalised residuals (<= 1e-6, >= 1000 cases each): {detail}")


def test_criterion_7_nash_deviation():
    setup = sio.attack_setup(_load("attack_v.json"))
    sol = select_strategy(setup.scenario)
    V = sol.value
    parts = []
    ok = True
    for who, theta in (("B", sol.theta_B), ("R1", sol.theta_1), ("R2", sol.theta_2)):
        for d in (-0.1, 0.1):
            _, term = run_attack_stage(setup, SimConfig(dt=1e-3), {who: theta + d})
            good = term.J >= V - 1e-3 if who == "B" else term.J <= V + 1e-3
            ok &= good
            parts.append(f"{who}{d:+.1f}:{term.J - V:+.4f}")
    report(7, ok, f"J - V under single deviations (B >= -1e-3, R <= +1e-3): {' '.join(parts)}")


def test_criterion_8_alpha_zero_projection():
    rng = np.random.default_rng(8)
    worst_y = worst_root = 0.0
    doubles = 0
    for _ in range(100):
        A, D, B = (rng.uniform(-10, 10, 2) for _ in range(3))
        pair = MissilePair(A, D, 0.0)
        s = pair_game_solve(pair, B, rng.uniform(-math.pi, math.pi), check=False)
        frame, _ = pair.frame()
        yB = frame.to_relative(B).y
        worst_y = max(worst_y, abs(s.y_star - yB))
        poly = retreat_quartic(0.0, s.x_m, yB, s.d_m if s.d_m is not None else 0.0, math.cos(s.phi), math.sin(s.phi))
        rs = real_roots(poly, -1e3, 1e3)
        near = [(r, m) for r, m in zip(rs.roots, rs.multiplicities) if abs(r - yB) <= 1e-6]
        if near:
            worst_root = max(worst_root, abs(near[0][0] - yB))
            doubles += sum(m for _, m in near) >= 2
    ok = worst_y <= 1e-9 and doubles == 100 and worst_root <= 1e-9
    report(
        8,
        ok,
        f"100 geometries: max |y* - y'_B| = {worst_y:.1e}, quartic double root at y'_B in {doubles}/100 "
        f"(max offset {worst_root:.1e}), tolerance 1e-9",
    )

