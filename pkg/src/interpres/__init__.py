"""Finite-model workbench for first-order interpretations, hereditarily finite
sets, Mostowski collapse and Mathias growth classes."""

from .hf import HFSet, ack_decode, ack_encode, mostowski_collapse, parse_hf, render_hf
from .interp import (
    BiInterpretation, Interpretation, Theory, apply, check_bi, check_mutual, check_synonymy,
    compose, scott_reduce, translate,
)
from .logic import Signature, evaluate, parse_formula, render
from .structures import EqRelation, FinStructure, find_isomorphisms, quotient
from .tower import TowerInt, tower_cmp

__version__ = "0.1.0"

__all__ = [
    "BiInterpretation", "EqRelation", "FinStructure", "HFSet", "Interpretation", "Signature",
    "Theory", "TowerInt", "ack_decode", "ack_encode", "apply", "check_bi", "check_mutual",
    "check_synonymy", "compose", "evaluate", "find_isomorphisms", "mostowski_collapse",
    "parse_formula", "parse_hf", "quotient", "render", "render_hf", "scott_reduce",
    "tower_cmp", "translate",
]
