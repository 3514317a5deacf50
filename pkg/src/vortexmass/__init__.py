"""
Radial solutions of the Newtonian-vortex equation with sublinear mobility.

In the volume coordinate ``rho`` the enclosed mass of a radial density
solves ``m_t + m (m_rho)^alpha = 0`` for ``0 < alpha < 1``. The subpackages
provide exact and self-similar solutions (:mod:`~vortexmass.exact`),
characteristics with rarefaction fans (:mod:`~vortexmass.characteristics`),
shock tracking (:mod:`~vortexmass.shocks`), a monotone finite-difference
scheme (:mod:`~vortexmass.hjfd`), the viscous regularisation
(:mod:`~vortexmass.viscous`), error metrics (:mod:`~vortexmass.analysis`)
and a batch front end (:mod:`~vortexmass.cli`).
"""
from . import analysis, characteristics, exact, hjfd, shocks, viscous
from .characteristics import RadialInitialData, eval_m, eval_u, gap_data, invert_P, square_data, triangle_data
from .exact import MobilityExponent, SelfSimilarParams, friendly_giant, profile_F, self_similar_mass, self_similar_u
from .hjfd import run_fd
from .viscous import run_viscous

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "characteristics",
    "exact",
    "hjfd",
    "shocks",
    "viscous",
    "MobilityExponent",
    "RadialInitialData",
    "SelfSimilarParams",
    "eval_m",
    "eval_u",
    "friendly_giant",
    "gap_data",
    "invert_P",
    "profile_F",
    "run_fd",
    "run_viscous",
    "self_similar_mass",
    "self_similar_u",
    "square_data",
    "triangle_data",
]
