"""Wadge and Bezem semantics for higher-order definitional logic programs."""

from .core import Classification, Program, classify, load_program
from .bezem import GroundModel, lfp_deepening, lfp_ground
from .diff import compare, divergence_suite, fuzz_equivalence
from .domains import Domains, enumerate_domain
from .generate import GenConfig, gen_program
from .universe import ActiveUniverse, enumerate_universe, ground_instantiation
from .wadge import Interp, Wadge, eval_ground_atom, ground_restrict, is_model, lfp_wadge, tp_step

__all__ = [
    "ActiveUniverse", "Classification", "Domains", "GenConfig", "GroundModel", "Interp", "Program",
    "Wadge", "classify", "compare", "divergence_suite", "enumerate_domain", "enumerate_universe",
    "eval_ground_atom", "fuzz_equivalence", "gen_program", "ground_instantiation", "ground_restrict",
    "is_model", "lfp_deepening", "lfp_ground", "lfp_wadge", "load_program", "tp_step",
]
