#include "artic/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace artic {

Mask::Mask(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) throw std::invalid_argument("mask dimensions must be at least 1x1");
  bits.assign(static_cast<std::size_t>(w) * h, 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::size_t SpanCoverage::count() const {
  std::size_t n = 0;
  for (const Span& s : spans) n += static_cast<std::size_t>(s.x1 - s.x0);
  return n;
}

Mask SpanCoverage::to_mask() const {
  Mask m(width, height);
  for (const Span& s : spans) {
    for (int x = s.x0; x < s.x1; ++x) m.set(x, s.y);
  }
  return m;
}

double polygon_area(const Polygon2D& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

double polygon_perimeter(const Polygon2D& poly) {
  double len = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) len += (poly[(i + 1) % n] - poly[i]).norm();
  return len;
}

namespace {

void validate_polygon(const Polygon2D& poly) {
  if (poly.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (const Vec2& v : poly) {
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) throw std::invalid_argument("polygon vertex is not finite");
  }
}

void append_polygon_spans(const Polygon2D& poly, int width, int height, std::vector<Span>& out,
                          std::vector<double>& xs) {
  validate_polygon(poly);
  if (polygon_area(poly) < 1e-12) return;

  double ymin = poly[0].y();
  double ymax = poly[0].y();
  for (const Vec2& v : poly) {
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const int row_begin = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
  const int row_end = std::min(height - 1, static_cast<int>(std::floor(ymax - 0.5)));
  const std::size_t n = poly.size();

  for (int row = row_begin; row <= row_end; ++row) {
    const double y = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[j];
      if ((a.y() > y) != (b.y() > y)) {
        xs.push_back((b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x());
      }
    }
    std::sort(xs.begin(), xs.end());
    // Center x is inside iff it lies in [xs[2k], xs[2k+1]).
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = std::ceil(xs[k] - 0.5);
      const double hi = std::ceil(xs[k + 1] - 0.5);
      const int x0 = static_cast<int>(std::clamp(lo, 0.0, static_cast<double>(width)));
      const int x1 = static_cast<int>(std::clamp(hi, 0.0, static_cast<double>(width)));
      if (x1 > x0) out.push_back({row, x0, x1});
    }
  }
}

}  // namespace

SpanCoverage rasterize_spans(std::span<const Polygon2D> polys, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("raster dimensions must be at least 1x1");
  SpanCoverage cov{width, height, {}};
  std::vector<Span> raw;
  std::vector<double> xs;
  for (const Polygon2D& poly : polys) append_polygon_spans(poly, width, height, raw, xs);
  if (polys.size() <= 1) {
    // A single even-odd polygon already yields disjoint, ordered spans.
    cov.spans = std::move(raw);
    return cov;
  }
  std::sort(raw.begin(), raw.end(), [](const Span& a, const Span& b) {
    return a.y != b.y ? a.y < b.y : a.x0 < b.x0;
  });
  for (const Span& s : raw) {
    if (!cov.spans.empty() && cov.spans.back().y == s.y && s.x0 <= cov.spans.back().x1) {
      cov.spans.back().x1 = std::max(cov.spans.back().x1, s.x1);
    } else {
      cov.spans.push_back(s);
    }
  }
  return cov;
}

Mask rasterize_polygons(std::span<const Polygon2D> polys, int width, int height) {
  return rasterize_spans(polys, width, height).to_mask();
}

Mask rasterize_polygon(const Polygon2D& poly, int width, int height) {
  return rasterize_polygons(std::span<const Polygon2D>(&poly, 1), width, height);
}

MaskIndex::MaskIndex(const Mask& mask) : width_(mask.width), height_(mask.height) {
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  prefix_.assign(stride * height_, 0);
  for (int y = 0; y < height_; ++y) {
    std::uint32_t* row = prefix_.data() + stride * y;
    for (int x = 0; x < width_; ++x) row[x + 1] = row[x] + (mask.at(x, y) ? 1u : 0u);
    total_ += row[width_];
  }
}

std::size_t MaskIndex::covered(const Span& span) const {
  const std::uint32_t* row = prefix_.data() + (static_cast<std::size_t>(width_) + 1) * span.y;
  return row[span.x1] - row[span.x0];
}

double MaskIndex::iou(const SpanCoverage& coverage) const {
  if (coverage.width != width_ || coverage.height != height_) {
    throw std::invalid_argument("coverage and mask dimensions differ");
  }
  std::size_t inter = 0;
  std::size_t area = 0;
  for (const Span& s : coverage.spans) {
    inter += covered(s);
    area += static_cast<std::size_t>(s.x1 - s.x0);
  }
  const std::size_t uni = total_ + area - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double mask_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height) throw std::invalid_argument("mask dimensions differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += (a.bits[i] & b.bits[i]);
    uni += (a.bits[i] | b.bits[i]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double bbox_iou(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

void douglas_peucker(const Polygon2D& pts, std::size_t first, std::size_t last, double tol,
                     std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double worst = -1.0;
  std::size_t index = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = point_segment_distance(pts[i], pts[first], pts[last]);
    if (d > worst) {
      worst = d;
      index = i;
    }
  }
  if (worst > tol) {
    keep[index] = true;
    douglas_peucker(pts, first, index, tol, keep);
    douglas_peucker(pts, index, last, tol, keep);
  }
}

// Directions in image coordinates (y down): E, S, W, N. Turning right is +1.
constexpr std::array<std::array<int, 2>, 4> kDirs{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// Walks the pixel-edge boundary of one component clockwise on screen (the
// component stays on the right-hand side). At a vertex the ahead-left pixel
// is tried first, which keeps diagonal neighbours in the same outline.
Polygon2D trace_outline(const std::vector<int>& labels, int width, int height, int label, int sx, int sy) {
  auto inside = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < width && y < height && labels[static_cast<std::size_t>(y) * width + x] == label;
  };
  Polygon2D ring;
  int vx = sx;
  int vy = sy;
  int dir = 0;
  ring.emplace_back(vx, vy);
  const std::size_t guard = 4 * static_cast<std::size_t>(width + 1) * (height + 1);
  for (std::size_t step = 0; step < guard; ++step) {
    vx += kDirs[dir][0];
    vy += kDirs[dir][1];
    const int dx = kDirs[dir][0];
    const int dy = kDirs[dir][1];
    // Pixel whose center is at vertex + 0.5*d + 0.5*side, side = right (-dy, dx) or left (dy, -dx).
    auto pixel_at = [&](int sxn, int syn) {
      const double px = vx + 0.5 * dx + 0.5 * sxn;
      const double py = vy + 0.5 * dy + 0.5 * syn;
      return inside(static_cast<int>(std::floor(px)), static_cast<int>(std::floor(py)));
    };
    const bool ahead_left = pixel_at(dy, -dx);
    const bool ahead_right = pixel_at(-dy, dx);
    int next = dir;
    if (ahead_left) {
      next = (dir + 3) % 4;
    } else if (!ahead_right) {
      next = (dir + 1) % 4;
    }
    if (vx == sx && vy == sy && next == 0) return ring;
    if (next != dir) ring.emplace_back(vx, vy);
    dir = next;
  }
  throw std::logic_error("contour tracing did not close");
}

// Replaces a pixel-corner ring by the midpoints of its unit edges, keeping
// only the two end midpoints of each straight run. On staircases this puts
// the outline halfway between inside and outside pixel centers, so the
// simplified polygon rasterizes closer to the source mask.
Polygon2D edge_midpoints(const Polygon2D& corners) {
  Polygon2D out;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[(i + 1) % corners.size()];
    const Vec2 step = (b - a) / (b - a).norm();
    out.push_back(a + 0.5 * step);
    if ((b - a).squaredNorm() > 1.5) out.push_back(b - 0.5 * step);
  }
  return out;
}

}  // namespace

Polygon2D douglas_peucker_closed(const Polygon2D& ring, double tol) {
  if (ring.size() <= 3 || tol <= 0.0) return ring;
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const double d = (ring[i] - ring[0]).squaredNorm();
    if (d > best) {
      best = d;
      far = i;
    }
  }
  Polygon2D closed(ring);
  closed.push_back(ring[0]);
  std::vector<bool> keep(closed.size(), false);
  keep[0] = keep[far] = keep[closed.size() - 1] = true;
  douglas_peucker(closed, 0, far, tol, keep);
  douglas_peucker(closed, far, closed.size() - 1, tol, keep);
  Polygon2D out;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    if (keep[i]) out.push_back(closed[i]);
  }
  if (out.size() < 3 || polygon_area(out) < 1e-12) return ring;
  return out;
}

std::vector<Polygon2D> mask_to_boundary_polygons(const Mask& m, double simplify_tol) {
  if (m.empty()) throw std::invalid_argument("cannot polygonize an empty mask");
  const int w = m.width;
  const int h = m.height;
  std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
  std::vector<Polygon2D> out;
  std::deque<std::pair<int, int>> queue;
  int next_label = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0) continue;
      const int label = ++next_label;
      labels[static_cast<std::size_t>(y) * w + x] = label;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int oy = -1; oy <= 1; ++oy) {
          for (int ox = -1; ox <= 1; ++ox) {
            const int nx = cx + ox;
            const int ny = cy + oy;
            if (!m.contains(nx, ny) || !m.at(nx, ny)) continue;
            int& slot = labels[static_cast<std::size_t>(ny) * w + nx];
            if (slot == 0) {
              slot = label;
              queue.emplace_back(nx, ny);
            }
          }
        }
      }
      // (x, y) is the raster-first pixel of this component: its top edge is on the outline.
      out.push_back(douglas_peucker_closed(edge_midpoints(trace_outline(labels, w, h, label, x, y)), simplify_tol));
    }
  }
  return out;
}

std::vector<std::uint32_t> rle_encode(const Mask& m) {
  std::vector<std::uint32_t> counts;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t bit : m.bits) {
    if (bit != current) {
      counts.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

Mask rle_decode(std::span<const std::uint32_t> counts, int width, int height) {
  Mask m(width, height);
  const std::uint64_t expected = static_cast<std::uint64_t>(width) * height;
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total != expected) {
    throw std::invalid_argument("run lengths sum to " + std::to_string(total) + ", expected " +
                                std::to_string(expected));
  }
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (std::uint32_t run : counts) {
    std::fill_n(m.bits.begin() + static_cast<std::ptrdiff_t>(pos), run, value);
    pos += run;
    value ^= 1;
  }
  return m;
}

Box2D mask_bbox(const Mask& m) {
  int x0 = m.width;
  int y0 = m.height;
  int x1 = -1;
  int y1 = -1;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw std::invalid_argument("bounding box of an empty mask");
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 + 1), static_cast<double>(y1 + 1)};
}

}  // namespace artic
