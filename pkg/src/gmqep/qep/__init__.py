"""Quadratic-eigenvalue reduction for 1-regular semi-bipartite graphs."""
from .homotopy import (HomotopyTrace, TrackingError, companion_matrix, companion_roots,
                       eval_F_homotopy, eval_G_homotopy, homotopy_top_roots, track_all,
                       track_root)
from .isolate import Bracket, BracketError, BracketTable, brackets, find_roots, pole_groups
from .pencil import (J2Quadratics, PencilParams, PoleError, RootSet, build_M,
                     equal_k_closed_form, eval_F, eval_G, j2_quadratics, kernel_vector,
                     pencil_matrix, q_factor, quadratic_roots, secular, secular_deflated)

__all__ = [
    "Bracket", "BracketError", "BracketTable", "HomotopyTrace", "J2Quadratics",
    "PencilParams", "PoleError", "RootSet", "TrackingError", "brackets", "build_M",
    "companion_matrix", "companion_roots", "equal_k_closed_form", "eval_F",
    "eval_F_homotopy", "eval_G", "eval_G_homotopy", "find_roots", "homotopy_top_roots",
    "j2_quadratics", "kernel_vector", "pencil_matrix", "pole_groups", "q_factor",
    "quadratic_roots", "secular", "secular_deflated", "track_all", "track_root",
]
