"""Numerical minimal graphs near quadratic cones C(S^p x S^q)."""

__version__ = "0.1.0"

from .geometry import (
    AmbientPoint,
    ConeParams,
    E_MINUS,
    E_PLUS,
    LinkCoords,
    ON_CONE,
    T_map,
    link_normal,
    side_classify,
    spherical_exp,
)
from .spectrum import (
    BoundaryData,
    Mode,
    axisym_eigenfunction,
    enumerate_modes,
    gamma4_plus,
    make_mode,
    nu,
    project_Pi,
)
from .radial import (
    H_operator,
    ModeField,
    RadialGrid,
    apply_L_cone,
    linear_dirichlet_solve,
    solve_mode_ode,
    weighted_norm_mode_field,
)

__all__ = [
    "AmbientPoint",
    "BoundaryData",
    "ConeParams",
    "E_MINUS",
    "E_PLUS",
    "H_operator",
    "LinkCoords",
    "Mode",
    "ModeField",
    "ON_CONE",
    "RadialGrid",
    "T_map",
    "apply_L_cone",
    "axisym_eigenfunction",
    "enumerate_modes",
    "gamma4_plus",
    "link_normal",
    "linear_dirichlet_solve",
    "make_mode",
    "nu",
    "project_Pi",
    "side_classify",
    "solve_mode_ode",
    "spherical_exp",
    "weighted_norm_mode_field",
]
