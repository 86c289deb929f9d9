from app.analysis.averaging import (
    AveragedProfile,
    ZeroSetStructure,
    average_along,
    average_direction,
    exact_mass,
    fit_vanishing_exponent,
    fit_zero_set,
    fubini_check,
    local_average_bounds,
    zero_set,
)
from app.analysis.glancing import (
    classify_line,
    estimate_order,
    find_glancing_lines,
    find_glancing_points,
    glancing_report,
)
from app.analysis.quadrature import c0_integral


__all__ = [
    "AveragedProfile",
    "ZeroSetStructure",
    "average_along",
    "average_direction",
    "c0_integral",
    "classify_line",
    "estimate_order",
    "exact_mass",
    "find_glancing_lines",
    "find_glancing_points",
    "fit_vanishing_exponent",
    "fit_zero_set",
    "fubini_check",
    "glancing_report",
    "local_average_bounds",
    "zero_set",
]
