"""Computational toolkit for algebraic dynamical systems: Mahler measures
(archimedean, p-adic, multivariate), entropies of toral/solenoid/principal
actions, exact periodic-point counts, mixing statistics of F_p shift
systems, and Fuglede-Kadison determinant estimates."""

from .fkdet import (
    HEISENBERG,
    GroupRingElement,
    GroupSpec,
    compare_estimators,
    finite_section_logdet,
    group_inv,
    group_mul,
    trace_series_logdet,
    zd,
)
from .fpshift import (
    FpShiftSystem,
    cylinder_measure,
    frobenius_dilate,
    ideal_support_search,
    ledrappier_system,
    mixing_defect,
    window_count,
    window_entropy_trace,
)
from .laurent import GridSpec, LaurentPoly, grid_eval, parse_poly
from .local import (
    CharPolyData,
    IntPoly,
    RationalMatrix,
    char_poly_data,
    mahler_1d,
    mahler_1d_report,
    newton_polygon,
    padic_mahler,
    roots_with_modulus_class,
    solenoid_entropy,
)
from .periodic import growth_rate_trace, principal_periodic_count, toral_periodic_count
from .torus import (
    lawton_slice,
    mahler_nd,
    riemann_mahler,
    torsion_aware_square_grids,
    unitary_variety_probe,
)

__version__ = "0.1.0"

__all__ = [
    "LaurentPoly",
    "GridSpec",
    "parse_poly",
    "grid_eval",
    "IntPoly",
    "RationalMatrix",
    "CharPolyData",
    "mahler_1d",
    "mahler_1d_report",
    "roots_with_modulus_class",
    "char_poly_data",
    "newton_polygon",
    "padic_mahler",
    "solenoid_entropy",
    "riemann_mahler",
    "mahler_nd",
    "unitary_variety_probe",
    "lawton_slice",
    "torsion_aware_square_grids",
    "toral_periodic_count",
    "principal_periodic_count",
    "growth_rate_trace",
    "FpShiftSystem",
    "ledrappier_system",
    "window_count",
    "window_entropy_trace",
    "cylinder_measure",
    "mixing_defect",
    "ideal_support_search",
    "frobenius_dilate",
    "GroupSpec",
    "GroupRingElement",
    "zd",
    "HEISENBERG",
    "group_mul",
    "group_inv",
    "finite_section_logdet",
    "trace_series_logdet",
    "compare_estimators",
]
