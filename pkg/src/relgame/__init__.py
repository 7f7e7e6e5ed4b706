"""Exact solver and strategy library for relator games on Cayley graphs."""

from __future__ import annotations

__version__ = "0.1.0"

from relgame.groups import build_group, load_group_table
from relgame.cayley import build_cayley
from relgame.engine import GameKind, initial_state
from relgame.solver import adversarial_strategy_check, best_move, solve

__all__ = [
    "GameKind",
    "__version__",
    "adversarial_strategy_check",
    "best_move",
    "build_cayley",
    "build_group",
    "initial_state",
    "load_group_table",
    "solve",
]
