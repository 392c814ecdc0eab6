"""Normalized right transversals of finite groups and their induced right loops."""

from .expr import group, parse_group_expr, realize, render
from .groups import GroupTable, SubgroupHandle, build_from_generators, subgroups_all
from .loops import RightLoopTable, canonical_form, census, classify_loops
from .orbits import ClassifyOptions, IsoClassReport, burnside_conjugation_count, classify_pair, orbit_report
from .transversal import Transversal, induced_loop, nrt_count, right_cosets

__version__ = "0.1.0"
