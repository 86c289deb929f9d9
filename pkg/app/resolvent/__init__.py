from app.resolvent.operator import (
    DiscreteDampedOperator,
    build_operator,
    dense_resolvent_norm,
    pairing_check,
    resolvent_norm,
)
from app.resolvent.scan import ResolventScan, fit_scaling, resolvent_scan, sweep_E


__all__ = [
    "DiscreteDampedOperator",
    "ResolventScan",
    "build_operator",
    "dense_resolvent_norm",
    "fit_scaling",
    "pairing_check",
    "resolvent_norm",
    "resolvent_scan",
    "sweep_E",
]
