from app.geometry.base import DampingShape, shadow_gaps
from app.geometry.curves import Disk, SmoothCurve, SuperEllipse
from app.geometry.field import DampingField, GridField, evaluate_W, regularity_check
from app.geometry.polygon import Polygon
from app.geometry.scene import SceneConfig, load_scene
from app.geometry.shapes import (
    Shape,
    ShapeUnion,
    Strip,
    contains,
    curvature,
    distance_to_complement,
    inradius,
    line_chords,
    proper_projection_check,
    support_interval,
)
from app.geometry.torus import (
    DirectionFrame,
    RationalDirection,
    TorusPoint,
    enumerate_candidate_directions,
    geodesic_sample,
    transverse_step,
)


__all__ = [
    "DampingShape",
    "DampingField",
    "DirectionFrame",
    "Disk",
    "GridField",
    "Polygon",
    "RationalDirection",
    "SceneConfig",
    "Shape",
    "ShapeUnion",
    "SmoothCurve",
    "Strip",
    "SuperEllipse",
    "TorusPoint",
    "contains",
    "curvature",
    "distance_to_complement",
    "enumerate_candidate_directions",
    "evaluate_W",
    "geodesic_sample",
    "inradius",
    "line_chords",
    "load_scene",
    "proper_projection_check",
    "regularity_check",
    "shadow_gaps",
    "support_interval",
    "transverse_step",
]
