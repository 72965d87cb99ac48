#include "mot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mot {

namespace {

// Degenerate-intersection tolerance: avoids sign flips in the shoelace sum
// on collinear clip output.
constexpr double kAreaEps = 1e-9;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

double polygon_area(const Polygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    sum += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * sum;
}

Polygon2D box_footprint(const Box3D& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = 0.5 * b.length;
  const double dy = 0.5 * b.width;
  Polygon2D poly;
  poly.vertices.reserve(4);
  // CCW in the box frame: (+dx,+dy), (-dx,+dy), (-dx,-dy), (+dx,-dy)
  const double lx[4] = {dx, -dx, -dx, dx};
  const double ly[4] = {dy, dy, -dy, -dy};
  for (int i = 0; i < 4; ++i) {
    poly.vertices.emplace_back(b.cx + c * lx[i] - s * ly[i],
                               b.cy + s * lx[i] + c * ly[i]);
  }
  return poly;
}

Polygon2D convex_intersection(const Polygon2D& a, const Polygon2D& b) {
  std::vector<Vec2> output = a.vertices;
  const auto& clip = b.vertices;
  for (std::size_t i = 0; i < clip.size() && !output.empty(); ++i) {
    const Vec2& e0 = clip[i];
    const Vec2& e1 = clip[(i + 1) % clip.size()];
    std::vector<Vec2> input;
    input.swap(output);
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Vec2& cur = input[j];
      const Vec2& nxt = input[(j + 1) % input.size()];
      const double dc = cross2(e0, e1, cur);
      const double dn = cross2(e0, e1, nxt);
      const bool cur_in = dc >= 0.0;
      const bool nxt_in = dn >= 0.0;
      if (cur_in) output.push_back(cur);
      if (cur_in != nxt_in) {
        const double t = dc / (dc - dn);
        output.push_back(cur + t * (nxt - cur));
      }
    }
  }
  Polygon2D result;
  if (output.size() >= 3) result.vertices = std::move(output);
  return result;
}

Polygon2D convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& p, const Vec2& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& p, const Vec2& q) {
                             return p.x() == q.x() && p.y() == q.y();
                           }),
               points.end());
  const std::size_t n = points.size();
  Polygon2D hull;
  if (n < 3) {
    hull.vertices = std::move(points);
    return hull;
  }
  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(h[k - 2], h[k - 1], points[i]) <= 0.0) --k;
    h[k++] = points[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
    while (k >= t && cross2(h[k - 2], h[k - 1], points[i]) <= 0.0) --k;
    h[k++] = points[i];
  }
  h.resize(k - 1);
  hull.vertices = std::move(h);
  return hull;
}

namespace {

double intersection_area(const Box3D& a, const Box3D& b) {
  const double inter =
      polygon_area(convex_intersection(box_footprint(a), box_footprint(b)));
  return inter < kAreaEps ? 0.0 : inter;
}

}  // namespace

double iou_bev(const Box3D& a, const Box3D& b) {
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  const double inter = intersection_area(a, b);
  const double uni = area_a + area_b - inter;
  if (uni <= kAreaEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double giou_bev(const Box3D& a, const Box3D& b) {
  const Polygon2D fa = box_footprint(a);
  const Polygon2D fb = box_footprint(b);
  const double inter = intersection_area(a, b);
  const double uni = a.length * a.width + b.length * b.width - inter;
  std::vector<Vec2> pts = fa.vertices;
  pts.insert(pts.end(), fb.vertices.begin(), fb.vertices.end());
  const double hull = polygon_area(convex_hull(std::move(pts)));
  if (uni <= kAreaEps || hull <= kAreaEps) return 0.0;
  const double iou = std::clamp(inter / uni, 0.0, 1.0);
  return iou - (hull - uni) / hull;
}

double l2_center(const Box3D& a, const Box3D& b) {
  return (a.center2d() - b.center2d()).norm();
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double inter_bev = intersection_area(a, b);
  const double z_lo = std::max(a.cz - 0.5 * a.height, b.cz - 0.5 * b.height);
  const double z_hi = std::min(a.cz + 0.5 * a.height, b.cz + 0.5 * b.height);
  const double inter = inter_bev * std::max(0.0, z_hi - z_lo);
  const double vol_a = a.length * a.width * a.height;
  const double vol_b = b.length * b.width * b.height;
  const double uni = vol_a + vol_b - inter;
  if (uni <= kAreaEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Box3D> nms_bev(const std::vector<Box3D>& boxes,
                           double iou_threshold) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return boxes[i].score > boxes[j].score;
                   });
  std::vector<Box3D> kept;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (const Box3D& k : kept) {
      if (iou_bev(boxes[idx], k) >= iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(boxes[idx]);
  }
  return kept;
}

}  // namespace mot
