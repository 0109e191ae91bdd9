"""Matplotlib figures for solutions and simulated trajectories (files only)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .attack import AttackScenario, AttackSolution  # noqa: E402
from .retreat import HeadingResult, RetreatScenario, pair_values_grid  # noqa: E402
from .sim import TrajectoryLog  # noqa: E402

COLORS = {"B": "tab:blue", "BW": "tab:cyan", "R1": "tab:red", "R2": "tab:orange", "A1": "tab:red", "A2": "tab:orange", "D1": "tab:green", "D2": "tab:olive"}


def _dominance_contours(ax, sc: AttackScenario, pad: float = 4.0) -> None:
    pts = np.array([sc.B, sc.R1, sc.R2, sc.Rs])
    lo, hi = pts.min(axis=0) - pad - sc.rho, pts.max(axis=0) + pad + sc.rho
    X, Y = np.meshgrid(np.linspace(lo[0], hi[0], 400), np.linspace(lo[1], hi[1], 400))
    dB = np.hypot(X - sc.B.x, Y - sc.B.y)
    for R, color in ((sc.R1, COLORS["R1"]), (sc.R2, COLORS["R2"])):
        F = np.hypot(X - R.x, Y - R.y) - sc.rho - sc.beta * dB
        ax.contour(X, Y, F, levels=[0.0], colors=[color], linewidths=1.0)
    ax.add_patch(plt.Circle(sc.Rs, sc.rho_s, fill=False, ls="--", color="k", lw=0.8))


def plot_attack_solution(sc: AttackScenario, sol: AttackSolution, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    _dominance_contours(ax, sc)
    for name, p in (("B", sc.B), ("R1", sc.R1), ("R2", sc.R2)):
        ax.plot(*p, "o", color=COLORS[name])
        ax.plot([p.x, sol.aimpoint.x], [p.y, sol.aimpoint.y], "-", color=COLORS[name], lw=1, label=name)
    ax.plot(*sc.Rs, "ks", label="Rs")
    ax.plot(*sol.aimpoint, "k*", ms=10, label=f"aimpoint ({sol.mode.value})")
    ax.set_aspect("equal")
    ax.set_title(f"Attack stage: V = {sol.value:.4f}")
    ax.legend(fontsize=7, loc="best")
    return _save(fig, path)


def plot_retreat_solution(sc: RetreatScenario, res: HeadingResult, path: str | Path) -> Path:
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    B = sc.B
    for i, p in enumerate(sc.pairs, start=1):
        ax.plot(*p.A, "^", color=COLORS[f"A{i}"], label=f"A{i}")
        ax.plot(*p.D, "v", color=COLORS[f"D{i}"], label=f"D{i}")
        d = p.A - p.D
        mid = p.D + d.scaled(0.5)
        n = np.array([-d.y, d.x]) / math.hypot(*d)
        span = 2.0 * math.hypot(*d)
        ax.plot([mid.x - span * n[0], mid.x + span * n[0]], [mid.y - span * n[1], mid.y + span * n[1]], ":", color=COLORS[f"A{i}"], lw=0.8)
    ax.plot(*B, "o", color=COLORS["B"], label="B")
    L = 3.0
    ax.plot([B.x, B.x + L * math.cos(res.theta)], [B.y, B.y + L * math.sin(res.theta)], "-", color=COLORS["B"])
    ax.set_aspect("equal")
    ax.legend(fontsize=7)
    ax.set_title("Retreat stage geometry")
    for arc in res.admissible:
        th = np.linspace(arc.lo, arc.hi, 361)
        vals = sum(w * pair_values_grid(p, B, th) for w, p in zip(sc.weights, sc.pairs))
        ax2.plot(th, vals, color="tab:blue")
    ax2.axvline(np.unwrap([res.admissible[0].lo, res.theta])[1], color="k", ls="--", lw=0.8)
    ax2.set_xlabel("heading of B [rad]")
    ax2.set_ylabel("composite cost")
    ax2.set_title(f"theta* = {res.theta:.4f}, J_c = {res.value:.4f}")
    return _save(fig, path)


def plot_trajectories(log: TrajectoryLog, path: str | Path, title: str = "") -> Path:
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    for name, rows in log.samples.items():
        a = np.asarray(rows)
        color = COLORS.get(name)
        ax.plot(a[:, 1], a[:, 2], "-", color=color, lw=1, label=name)
        ax.plot(a[-1, 1], a[-1, 2], "*", color=color)
        ax2.plot(a[:, 0], a[:, 3], "-", color=color, lw=1, label=name)
    ax.set_aspect("equal")
    ax.legend(fontsize=7)
    ax.set_title(title or "Trajectories")
    ax2.set_xlabel("t")
    ax2.set_ylabel("heading [rad]")
    ax2.legend(fontsize=7)
    return _save(fig, path)


def plot_sweep(xs, ys, xlabel: str, ylabel: str, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
