"""Symblicit strategy iteration for monotonic MDPs with pseudo-antichains."""

from .lattice import BitsetDomain, GridDomain, PseudoAntichain, pa_difference, pa_equal, pa_intersect, pa_union
from .mdp import CostModel, MonotonicMdp
from .solver import SolveReport, solve_emp_symblicit, solve_ssp_symblicit
from .strips import Mss, gen_monkey, gen_moats, gen_random, mss_to_mdp, parse_mss

__all__ = [
    "BitsetDomain", "GridDomain", "PseudoAntichain", "pa_difference", "pa_equal", "pa_intersect", "pa_union",
    "CostModel", "MonotonicMdp", "SolveReport", "solve_emp_symblicit", "solve_ssp_symblicit",
    "Mss", "gen_monkey", "gen_moats", "gen_random", "mss_to_mdp", "parse_mss",
]
