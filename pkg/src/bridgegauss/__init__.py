"""Bridge potential functionals and Schrodinger perturbations of the Gauss-Weierstrass kernel."""
from .kernel import (BlockSplit, BridgeSpec, DomainError, bridge_density, bridge_moments,
                     factorized_bridge_density, heat_kernel)
from .potentials import Potential, lp_norm, paper_example, potential_from_json, scale_shift
from .bridge_quad import QuadConfig, SResult, SupEstimate, bridge_apply, F_sup, f_sup, s_value
from .newtonian import NewtonianResult, local_time_bound, potential_bound_sup
from .newtonian import newtonian as newtonian_potential
from .schrodinger import SeriesEstimate, envelope_check, g_series, lower_exp_constants, perturbation_term
from .feynman_kac import McConfig, McEstimate, g_ratio_mc, sample_bridge_path

__version__ = "0.1.0"
