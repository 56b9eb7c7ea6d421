"""Torsion, virtually cyclic subgroups, lower K-theory and FIC derivations for mapping class groups."""
from ._backend import BACKEND
from .klower import AbelianGroupDesc, KProfile, k_minus_one_cyclic, vanishing_report
from .mcg_torsion import VCShape, enumerate_vc_shapes, torsion_orders
from .surface_actions import BranchDatum, enumerate_branch_data, harvey_filter, is_realizable

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AbelianGroupDesc", "BranchDatum", "KProfile", "VCShape",
    "enumerate_branch_data", "enumerate_vc_shapes", "harvey_filter", "is_realizable",
    "k_minus_one_cyclic", "torsion_orders", "vanishing_report",
]
