#pragma once

#include "mot/types.hpp"

#include <vector>

namespace mot {

/// Convex polygon, counter-clockwise vertex order, signed area > 0.
struct Polygon2D {
  std::vector<Vec2> vertices;
};

/// Shoelace area; positive for counter-clockwise order.
double polygon_area(const Polygon2D& poly);

/// BEV footprint of a box as a CCW quad (length along yaw, width across).
Polygon2D box_footprint(const Box3D& b);

/// Intersection of two convex CCW polygons (Sutherland-Hodgman clipping).
/// Returns an empty polygon when they do not overlap.
Polygon2D convex_intersection(const Polygon2D& a, const Polygon2D& b);

/// Convex hull of a point set (monotone chain), CCW.
Polygon2D convex_hull(std::vector<Vec2> points);

/// Rotated BEV intersection-over-union, in [0, 1].
double iou_bev(const Box3D& a, const Box3D& b);

/// Generalized IoU on BEV footprints: IoU - (hull - union) / hull, in (-1, 1].
double giou_bev(const Box3D& a, const Box3D& b);

/// Euclidean distance between BEV centers, meters.
double l2_center(const Box3D& a, const Box3D& b);

/// Volumetric IoU: BEV intersection scaled by z-extent overlap.
double iou_3d(const Box3D& a, const Box3D& b);

/// Greedy score-descending suppression: keep the highest-score box, drop
/// every box with iou_bev >= threshold against a kept one, repeat. Output is
/// score-descending, ties broken by input order.
std::vector<Box3D> nms_bev(const std::vector<Box3D>& boxes,
                           double iou_threshold);

}  // namespace mot
