"""
Büchi automata: translation from LTL, products, emptiness and simulations
"""

from automata.buchi import BuchiAutomaton, SymbolicLabel, Transition, to_dot
from automata.emptiness import accepts_lasso, find_accepting_lasso, is_empty
from automata.product import product, unify_alphabets
from automata.simulation import (
    SimulationKind, SimulationRelation, backward_simulation, forward_simulation,
    prune_with_simulation,
)
from automata.translate import translate

__all__ = [
    "BuchiAutomaton", "SymbolicLabel", "Transition", "to_dot", "accepts_lasso",
    "find_accepting_lasso", "is_empty", "product", "unify_alphabets", "SimulationKind",
    "SimulationRelation", "backward_simulation", "forward_simulation",
    "prune_with_simulation", "translate",
]
