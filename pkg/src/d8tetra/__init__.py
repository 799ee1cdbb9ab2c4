"""Exact Z4 index computations and a numerical search for D8-symmetric tetrahedra on deformed spheres."""

from .exact_linalg import FinAbGroup, smith_normal_form
from .geometry import Config4, parse_embedding, solve, square_peg_solve, test_map
from .index_ring import GradedIdeal, Verdict, no_map_verdict, parse_ideal
from .rep_chern import chern_top, decompose, sphere_index
from .spectral import build_e2, edge_index, forced_pattern_search, parse_ledger, run_ledger
from .verify import verify_all
from .zg_modules import ZGModule, named_module

__all__ = [
    "Config4", "FinAbGroup", "GradedIdeal", "Verdict", "ZGModule", "build_e2", "chern_top", "decompose",
    "edge_index", "forced_pattern_search", "named_module", "no_map_verdict", "parse_embedding", "parse_ideal",
    "parse_ledger", "run_ledger", "smith_normal_form", "solve", "sphere_index", "square_peg_solve", "test_map",
    "verify_all",
]

__version__ = "0.1.0"
