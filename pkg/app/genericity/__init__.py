from app.genericity.candidates import CandidateDirectionSet
from app.genericity.curve import curve_exceptional_rotation_set, curve_f_gamma, curve_in_Y
from app.genericity.polygon import (
    RotationDiagnostics,
    polygon_exceptional_rotations,
    polygon_in_Q,
    polygon_membership,
)


__all__ = [
    "CandidateDirectionSet",
    "RotationDiagnostics",
    "curve_exceptional_rotation_set",
    "curve_f_gamma",
    "curve_in_Y",
    "polygon_exceptional_rotations",
    "polygon_in_Q",
    "polygon_membership",
]
