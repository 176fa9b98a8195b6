#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "artic/geometry.hpp"

namespace artic {

/// Row-major binary occupancy grid.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h);

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool on = true) { bits[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool operator==(const Mask&) const = default;
};

using Polygon2D = std::vector<Vec2>;

/// Axis-aligned box; max edges are exclusive for boxes derived from masks.
struct Box2D {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }

  bool operator==(const Box2D&) const = default;
};

/// Horizontal run of covered pixels [x0, x1) on row y.
struct Span {
  int y = 0;
  int x0 = 0;
  int x1 = 0;
};

/// Rasterized coverage kept as disjoint spans sorted by (y, x0).
struct SpanCoverage {
  int width = 0;
  int height = 0;
  std::vector<Span> spans;

  std::size_t count() const;
  Mask to_mask() const;
};

double polygon_area(const Polygon2D& poly);
double polygon_perimeter(const Polygon2D& poly);

/// Even-odd fill sampled at pixel centers (x + 0.5, y + 0.5); the union is
/// taken across polygons. Out-of-image parts are clipped.
SpanCoverage rasterize_spans(std::span<const Polygon2D> polys, int width, int height);
Mask rasterize_polygons(std::span<const Polygon2D> polys, int width, int height);
Mask rasterize_polygon(const Polygon2D& poly, int width, int height);

/// Per-row prefix sums of a mask so that IoU against span coverage costs
/// O(#spans) instead of O(width * height).
class MaskIndex {
 public:
  MaskIndex() = default;
  explicit MaskIndex(const Mask& mask);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t count() const { return total_; }
  std::size_t covered(const Span& span) const;
  double iou(const SpanCoverage& coverage) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t total_ = 0;
  std::vector<std::uint32_t> prefix_;  // height * (width + 1)
};

/// |a & b| / |a | b|; 0 when both masks are empty.
double mask_iou(const Mask& a, const Mask& b);
double bbox_iou(const Box2D& a, const Box2D& b);

/// Outer boundaries of the 8-connected components. The outline runs through
/// the midpoints of the boundary pixel edges and is simplified with
/// Douglas-Peucker. Holes are not represented.
std::vector<Polygon2D> mask_to_boundary_polygons(const Mask& m, double simplify_tol = 1.0);

Polygon2D douglas_peucker_closed(const Polygon2D& ring, double tol);

/// Row-major run lengths; the first run counts zeros and may be 0.
std::vector<std::uint32_t> rle_encode(const Mask& m);
Mask rle_decode(std::span<const std::uint32_t> counts, int width, int height);

/// Tight box over set pixels with exclusive max edges.
Box2D mask_bbox(const Mask& m);

}  // namespace artic
