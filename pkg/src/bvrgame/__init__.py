"""Two-stage beyond-visual-range air-combat differential game.

Attack stage: two interceptors cooperatively block a slower attacker short of
a protected asset.  Retreat stage: the attacker evades two missiles while its
wingman's defender missiles intercept them.
"""

from __future__ import annotations

from .attack import AttackScenario, AttackSolution, Mode, Winner, select_strategy
from .errors import GameError
from .geometry import Point2
from .retreat import MissilePair, RetreatScenario, feasible_band, optimize_heading, pair_game_solve
from .sim import AttackSetup, DynamicsSpec, RetreatSetup, SimConfig, run_attack_stage, run_chained, run_retreat_stage

__all__ = [
    "AttackScenario",
    "AttackSetup",
    "AttackSolution",
    "DynamicsSpec",
    "GameError",
    "MissilePair",
    "Mode",
    "Point2",
    "RetreatScenario",
    "RetreatSetup",
    "SimConfig",
    "Winner",
    "feasible_band",
    "optimize_heading",
    "pair_game_solve",
    "run_attack_stage",
    "run_chained",
    "run_retreat_stage",
    "select_strategy",
]

__version__ = "0.1.0"
