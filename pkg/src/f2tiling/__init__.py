"""Exact tools for deciding and certifying non-tileability of subsets of F_2^n."""

from .gf2core import Region, convolve, is_tile_pair, read_region, format_region, wht
from .ideal import ideal_from_generators, table1_region, to_region
from .binpack import Projection, binpack_feasible, non_tiling_by_projection, piece_census
from .lpmodel import LpBuildOptions, build_primal, export_lp, model_stats, parse_lp, witness_check
from .farkas import build_dual, parse_certificate, format_certificate, verify_certificate
from .exactlp import RationalSystem, decide_tiling_lp, solve_phase1, to_dual_certificate
from .oracle import cross_validate, find_complement

__version__ = "0.1.0"
