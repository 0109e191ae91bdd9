"""Command-line entry point: ``bvrgame {solve-attack,solve-retreat,simulate,sweep}``.

Exit codes: 0 success (either side may win), 2 invalid input or missing
file, 3 solver failure, 4 empty feasible heading set.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import scenario_io as sio
from .attack import select_strategy
from .errors import EmptyFeasibleSet, GameError, ParseError, ValidationError
from .geometry import Point2
from .retreat import optimize_heading, pair_game_solve
from .sim import (
    AgentDynamics,
    analytic_attack_terminal,
    run_attack_stage,
    run_chained,
    run_retreat_stage,
    spawn_retreat,
)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_EMPTY = 0, 2, 3, 4

log = logging.getLogger("bvrgame")


def _emit(text: str, out: Path | None, name: str) -> None:
    sys.stdout.write(text)
    if out is not None:
        (out / name).write_text(text, encoding="utf-8")


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _apply_overrides(sf: sio.ScenarioFile, args) -> sio.ScenarioFile:
    p = sf.parameters
    if getattr(args, "w", None) is not None:
        p = replace(p, w=args.w)
    if getattr(args, "pairing", None) is not None:
        p = replace(p, pairing=args.pairing)
    if p is not sf.parameters:
        sf = replace(sf, parameters=p)
        sio.validate(sf)
    return sf


def _band_dicts(bands) -> list[dict]:
    return [
        {"arcs": [{"lo": a.lo, "hi": a.hi, "kind": a.kind} for a in b.arcs], "y_low": b.y_low, "y_high": b.y_high}
        for b in bands
    ]


# ------------------------------------------------------------ subcommands


def cmd_solve_attack(args) -> int:
    sf = _apply_overrides(sio.load_scenario(args.scenario), args)
    if sf.stage == "retreat":
        raise ValidationError("stage", "solve-attack needs an attack or chained scenario")
    sc = sio.attack_scenario(sf)
    sol = select_strategy(sc)
    out = _outdir(args)
    text = sio.summary_json(
        "attack",
        sol.mode.value,
        sol.value,
        sol.value,
        sol.winner.value,
        sol.theta_B,
        aimpoint=list(sol.aimpoint),
        headings={"B": sol.theta_B, "R1": sol.theta_1, "R2": sol.theta_2},
        solo_values=list(sol.solo_values) if sol.solo_values else None,
    )
    _emit(text, out, "summary.json")
    if out is not None:
        from .plotting import plot_attack_solution

        plot_attack_solution(sc, sol, out / "attack_solution.png")
    return EXIT_OK


def _retreat_from_file(sf: sio.ScenarioFile):
    """Retreat scenario, B's state and missile speed; chained files use the closed-form attack end state."""
    if sf.stage == "retreat":
        return sio.retreat_problem(sf)
    rs = sio.retreat_setup(sf)
    term = analytic_attack_terminal(sio.attack_setup(sf))
    sc = spawn_retreat(term, rs.v_B, rs.v_missile, rs.w, rs.constraint, rs.pairing)
    B = AgentDynamics(term.positions["B"], term.headings["B"], rs.v_B, term.headings["B"], rs.v_B, rs.dynamics)
    return sc, B, rs.v_missile


def cmd_solve_retreat(args) -> int:
    sf = _apply_overrides(sio.load_scenario(args.scenario), args)
    if sf.stage == "attack":
        raise ValidationError("stage", "solve-retreat needs a retreat or chained scenario")
    sc, B, _ = _retreat_from_file(sf)
    res = optimize_heading(sc)
    pairs = []
    for i, p in enumerate(sc.pairs, start=1):
        s = pair_game_solve(p, sc.B, res.theta, check=False)
        pairs.append(
            {"pair": i, "value": s.value, "intercept": list(s.intercept_point), "chi": s.chi_star, "psi": s.psi_star}
        )
    out = _outdir(args)
    text = sio.summary_json(
        "retreat",
        "constrained" if res.constraint_active else "interior",
        res.value,
        res.value,
        None,
        res.theta,
        constraint_active=res.constraint_active,
        pair_values=list(res.pair_values),
        pairs=pairs,
        bands=_band_dicts(res.bands),
        admissible=[{"lo": a.lo, "hi": a.hi, "kind": a.kind} for a in res.admissible],
    )
    _emit(text, out, "summary.json")
    if out is not None:
        from .plotting import plot_retreat_solution

        plot_retreat_solution(sc, res, out / "retreat_solution.png")
    return EXIT_OK


def _write_run(out: Path | None, log_, title: str) -> None:
    if out is None:
        return
    with open(out / "trajectory.csv", "w", newline="", encoding="utf-8") as ft, open(
        out / "events.csv", "w", newline="", encoding="utf-8"
    ) as fe:
        sio.write_trajectory(log_, ft, fe)
    from .plotting import plot_trajectories

    plot_trajectories(log_, out / "trajectory.png", title)


def cmd_simulate(args) -> int:
    sf = _apply_overrides(sio.load_scenario(args.scenario), args)
    stage = args.stage or sf.stage
    if stage in ("attack", "chained") and sf.stage == "retreat":
        raise ValidationError("stage", f"--stage {stage} needs an attack or chained scenario")
    if stage in ("retreat", "chained") and sf.stage == "attack":
        raise ValidationError("stage", f"--stage {stage} needs a retreat or chained scenario")
    cfg = sio.sim_config(sf, dt=args.dt, capture_eps=args.capture_eps, replan_every=args.replan_every)
    out = _outdir(args)
    extra: dict = {}
    if stage == "attack":
        setup = sio.attack_setup(sf)
        log_, term = run_attack_stage(setup, cfg)
        sol = select_strategy(setup.scenario)
        if args.richardson:
            _, half = run_attack_stage(setup, replace(cfg, dt=0.5 * cfg.dt))
            extra["richardson"] = {
                "dt": cfg.dt,
                "J_dt": term.J,
                "J_half_dt": half.J,
                "J_extrapolated": 2 * half.J - term.J,
            }
        text = sio.summary_json(
            "attack",
            sol.mode.value,
            sol.value,
            term.J,
            "Blue" if term.kind == "T_Gamma" else ("Red" if term.kind == "T_R" else None),
            sol.theta_B,
            log_.events,
            termination=term.kind,
            t_final=term.t,
            **extra,
        )
    elif stage == "retreat":
        sc, B, v_missile = _retreat_from_file(sf)
        log_, res = run_retreat_stage(sc, B, v_missile, cfg, replan=bool(sf.sim.replan))
        text = sio.summary_json(
            "retreat",
            "Loss" if res.loss else ("Timeout" if res.timeout else "Escape"),
            res.heading.value,
            res.J_c,
            "Red" if res.loss else "Blue",
            res.theta_star,
            log_.events,
            intercept_times=list(res.intercept_times),
            separations=list(res.separations),
        )
    else:
        setup = sio.attack_setup(sf)
        rs = sio.retreat_setup(sf)
        result = run_chained(setup, rs, cfg)
        log_ = result.log
        sol = select_strategy(setup.scenario)
        r = result.retreat
        text = sio.summary_json(
            "chained",
            sol.mode.value,
            sol.value,
            result.attack.J,
            "Blue" if result.attack.kind == "T_Gamma" else ("Red" if result.attack.kind == "T_R" else None),
            r.theta_star if r else sol.theta_B,
            log_.events,
            attack={"termination": result.attack.kind, "J": result.attack.J, "t_final": result.attack.t},
            retreat=None
            if r is None
            else {
                "value": r.heading.value,
                "J_c": r.J_c,
                "theta_star": r.theta_star,
                "constraint_active": r.heading.constraint_active,
                "loss": r.loss,
                "intercept_times": list(r.intercept_times),
                "separations": list(r.separations),
            },
        )
    _emit(text, out, "summary.json")
    _write_run(out, log_, f"{stage} simulation")
    return EXIT_OK


# ------------------------------------------------------------------ sweep

SWEEP_PARAMS = ("beta", "rho", "rho_s", "w", "alpha")


def parse_grid(spec: str, seed: int | None = None) -> list[tuple[str, list[float]]]:
    """``name=v1,v2,...``, ``name=lo:hi:n`` or ``name=rand:lo:hi:n`` separated by ``;``.

    Names are parameters (beta, rho, rho_s, w, alpha) or agent coordinates
    such as ``B.x`` or ``Rs.y``.
    """
    rng = np.random.default_rng(seed)
    axes = []
    for part in filter(None, (s.strip() for s in spec.split(";"))):
        if "=" not in part:
            raise ValidationError(f"--grid {part}", "expected name=values")
        name, vals = (s.strip() for s in part.split("=", 1))
        if name not in SWEEP_PARAMS and not (len(name.split(".")) == 2 and name.split(".")[1] in ("x", "y")):
            raise ValidationError(f"--grid {name}", "unknown sweep parameter")
        try:
            if vals.startswith("rand:"):
                lo, hi, n = vals[5:].split(":")
                values = sorted(rng.uniform(float(lo), float(hi), int(n)).tolist())
            elif ":" in vals:
                lo, hi, n = vals.split(":")
                values = np.linspace(float(lo), float(hi), int(n)).tolist()
            else:
                values = [float(v) for v in vals.split(",")]
        except ValueError as exc:
            raise ValidationError(f"--grid {name}", f"cannot parse values {vals!r}") from exc
        if not values or not all(math.isfinite(v) for v in values):
            raise ValidationError(f"--grid {name}", "needs at least one finite value")
        axes.append((name, values))
    if not axes:
        raise ValidationError("--grid", "empty grid")
    return axes


def _with_point(sf: sio.ScenarioFile, assignment: dict[str, float]) -> sio.ScenarioFile:
    p = sf.parameters
    agents = list(sf.agents)
    for name, v in assignment.items():
        if name in SWEEP_PARAMS:
            p = replace(p, **{name: v})
        else:
            role, coord = name.split(".")
            idx = next((i for i, a in enumerate(agents) if a.role == role), None)
            if idx is None:
                raise ValidationError(f"--grid {name}", f"no agent with role {role}")
            pos = agents[idx].position
            agents[idx] = replace(agents[idx], position=Point2(v, pos.y) if coord == "x" else Point2(pos.x, v))
    sf = replace(sf, parameters=p, agents=tuple(agents))
    sio.validate(sf)
    return sf


def _sweep_point(job) -> list:
    sf, assignment = job
    try:
        pt = _with_point(sf, assignment)
        if sf.stage == "retreat":
            sc, _, _ = _retreat_from_file(pt)
            res = optimize_heading(sc)
            return ["constrained" if res.constraint_active else "interior", res.value, "", res.theta, ""]
        sol = select_strategy(sio.attack_scenario(pt))
        return [sol.mode.value, sol.value, sol.winner.value, sol.theta_B, ""]
    except GameError as exc:
        return ["", "", "", "", f"{type(exc).__name__}: {exc}"]


def cmd_sweep(args) -> int:
    sf = sio.load_scenario(args.scenario)
    axes = parse_grid(args.grid, args.seed)
    names = [a[0] for a in axes]
    jobs = [(sf, dict(zip(names, combo))) for combo in itertools.product(*(a[1] for a in axes))]
    if args.workers == 1 or len(jobs) == 1:
        results = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            # map preserves grid order regardless of completion order
            results = list(ex.map(_sweep_point, jobs, chunksize=max(1, len(jobs) // 64)))
    rows = [[j[1][n] for n in names] + r for j, r in zip(jobs, results)]
    text = sio.csv_text(names + ["mode", "value", "winner", "theta_star", "error"], rows)
    out = _outdir(args)
    _emit(text, out, "sweep.csv")
    if out is not None and len(names) == 1:
        pts = [(r[0], r[2]) for r in rows if isinstance(r[2], float)]
        if pts:
            from .plotting import plot_sweep

            plot_sweep([p[0] for p in pts], [p[1] for p in pts], names[0], "value", out / "sweep.png")
    return EXIT_OK


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bvrgame", description="Two-stage BVR air-combat differential game")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, overrides=True):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", help="directory for summary, CSV and figure files")
        if overrides:
            p.add_argument("--w", type=float, help="composite weight of pair 1")
            p.add_argument("--pairing", choices=("index", "best"))
        return p

    common(sub.add_parser("solve-attack", help="solve the attack-stage game")).set_defaults(func=cmd_solve_attack)
    common(sub.add_parser("solve-retreat", help="solve the retreat-stage game")).set_defaults(func=cmd_solve_retreat)
    p = common(sub.add_parser("simulate", help="closed-loop simulation"))
    p.add_argument("--stage", choices=("attack", "retreat", "chained"))
    p.add_argument("--dt", type=float)
    p.add_argument("--capture-eps", type=float)
    p.add_argument("--replan-every", type=int)
    p.add_argument("--richardson", action="store_true", help="also run at dt/2 and report the extrapolation")
    p.set_defaults(func=cmd_simulate)
    p = common(sub.add_parser("sweep", help="parameter sweep"), overrides=False)
    p.add_argument("--grid", required=True, help="e.g. 'rho_s=10:16:7;beta=1.2,1.3'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValidationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyFeasibleSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps(sio._clean(_band_dicts(exc.bands)), indent=2), file=sys.stderr)
        return EXIT_EMPTY
    except GameError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        state = getattr(exc, "state", None)
        if state:
            print(json.dumps(sio._clean(state)), file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
