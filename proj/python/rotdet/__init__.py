"""Rotated-box geometry, label assignment and evaluation toolkit."""

from ._core import (
    AngleMode,
    AnchorSet,
    AssignmentResult,
    BoxOffsets,
    ClassEval,
    Detection,
    EvalReport,
    GtInstance,
    MetricStyle,
    OrientedBox,
    TS4Result,
    atss_assign,
    canonicalize,
    corners,
    decode,
    encode,
    evaluate_detections,
    focal_loss,
    from_quad,
    generate_anchors,
    iou_matrix,
    make_box,
    max_iou_assign,
    min_area_rect,
    monte_carlo_iou,
    normalize_angle,
    refine_anchors,
    rotated_iou,
    rotated_nms,
    smooth_l1,
    ts4_assign,
)

__all__ = [
    "AngleMode",
    "AnchorSet",
    "AssignmentResult",
    "BoxOffsets",
    "ClassEval",
    "Detection",
    "EvalReport",
    "GtInstance",
    "MetricStyle",
    "OrientedBox",
    "TS4Result",
    "atss_assign",
    "canonicalize",
    "corners",
    "decode",
    "encode",
    "evaluate_detections",
    "focal_loss",
    "from_quad",
    "generate_anchors",
    "iou_matrix",
    "make_box",
    "max_iou_assign",
    "min_area_rect",
    "monte_carlo_iou",
    "normalize_angle",
    "refine_anchors",
    "rotated_iou",
    "rotated_nms",
    "smooth_l1",
    "ts4_assign",
]

__version__ = "0.1.0"
