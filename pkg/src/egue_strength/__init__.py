"""Bivariate moments, cumulants and Edgeworth densities of EGUE transition strengths."""
from .combinatorics import (binom, d_nu, d_nu_b, lambda_b, lambda_f, racah_u2,
                            racah_u2_boson)
from .edgeworth import EdgeworthParams, density_grid, edgeworth_density, gaussian_biv
from .moments import CumulantSet, MomentSet, cumulants_from_moments
from .removal import RemovalParams, cumulants_removal
from .spinless import SpinlessParams, cumulants_asymptotic, cumulants_exact
from .two_species import TwoSpeciesParams, cumulants_two

__version__ = "0.1.0"
