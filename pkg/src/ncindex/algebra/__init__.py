from .crossed import CrossedElement, block, comm_phi, cp_apply, cp_mul, cp_seminorm, derive_phi, sub_block
from .functions import PeriodicFunction
from .groups import GroupSpec, cyclic, lattice, reflection, torus_action
from .inversion import cp_invert, invert, neumann_partial_sums
from .torus import NCTorusElement, tau_e_torus
from .traces import TauValue, tau_e_mean, tau_g_finite

__all__ = [
    "CrossedElement", "GroupSpec", "NCTorusElement", "PeriodicFunction", "TauValue",
    "block", "comm_phi", "cp_apply", "cp_invert", "cp_mul", "cp_seminorm", "cyclic",
    "derive_phi", "invert", "lattice", "neumann_partial_sums", "reflection", "sub_block",
    "tau_e_mean", "tau_e_torus", "tau_g_finite", "torus_action",
]
