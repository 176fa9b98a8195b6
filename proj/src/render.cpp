#include "artic/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "artic/eval.hpp"

namespace artic {

Rgb category_color(ArticulationType type) {
  return type == ArticulationType::rotation ? kRotationColor : kTranslationColor;
}

Canvas::Canvas(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("canvas must be at least 1x1");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

void Canvas::put(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  pixels_[static_cast<std::size_t>(y) * width_ + x] = c;
}

void Canvas::draw_line(Vec2 a, Vec2 b, Rgb c) {
  // Bresenham between rounded endpoints; callers clip to the image first.
  int x0 = static_cast<int>(std::lround(a.x()));
  int y0 = static_cast<int>(std::lround(a.y()));
  const int x1 = static_cast<int>(std::lround(b.x()));
  const int y1 = static_cast<int>(std::lround(b.y()));
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::draw_box(const Box2D& box, Rgb c) {
  const double x1 = box.x_max - 1.0;
  const double y1 = box.y_max - 1.0;
  draw_line({box.x_min, box.y_min}, {x1, box.y_min}, c);
  draw_line({x1, box.y_min}, {x1, y1}, c);
  draw_line({x1, y1}, {box.x_min, y1}, c);
  draw_line({box.x_min, y1}, {box.x_min, box.y_min}, c);
}

void Canvas::draw_contour(const Mask& mask, Rgb c) {
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = !mask.contains(x - 1, y) || !mask.at(x - 1, y) || !mask.contains(x + 1, y) ||
                        !mask.at(x + 1, y) || !mask.contains(x, y - 1) || !mask.at(x, y - 1) ||
                        !mask.contains(x, y + 1) || !mask.at(x, y + 1);
      if (edge) put(x, y, c);
    }
  }
}

void Canvas::tint(const Mask& mask, Rgb c, double weight) {
  auto mix = [weight](std::uint8_t base, std::uint8_t over) {
    return static_cast<std::uint8_t>(std::lround((1.0 - weight) * base + weight * over));
  };
  for (int y = 0; y < std::min(mask.height, height_); ++y) {
    for (int x = 0; x < std::min(mask.width, width_); ++x) {
      if (!mask.at(x, y)) continue;
      const Rgb base = at(x, y);
      put(x, y, {mix(base.r, c.r), mix(base.g, c.g), mix(base.b, c.b)});
    }
  }
}

void Canvas::draw_axis(const ProjectedAxis& axis, ArticulationType category, const Box2D& box, Rgb c) {
  // Clip against [0, w-1] x [0, h-1] so both endpoints land on real pixels.
  const auto seg = axis_segment(axis, category, box, width_ - 1, height_ - 1);
  if (seg) draw_line(seg->a, seg->b, c);
}

std::string Canvas::to_ppm() const {
  std::string out = "P6\n" + std::to_string(width_) + " " + std::to_string(height_) + "\n255\n";
  out.reserve(out.size() + pixels_.size() * 3);
  for (const Rgb& p : pixels_) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

Canvas render_frame(int width, int height, const std::vector<OverlayItem>& items) {
  Canvas canvas(width, height);
  // Truth first so predictions stay visible on top.
  for (int pass = 0; pass < 2; ++pass) {
    for (const OverlayItem& item : items) {
      if (item.truth != (pass == 0)) continue;
      const Rgb color = item.truth ? kTruthColor : category_color(item.category);
      if (item.mask) {
        if (item.truth) canvas.tint(*item.mask, color, 0.25);
        canvas.draw_contour(*item.mask, color);
      }
      if (item.box) canvas.draw_box(*item.box, color);
      if (item.axis2d) {
        const Box2D anchor = item.box.value_or(Box2D{0.0, 0.0, static_cast<double>(width), static_cast<double>(height)});
        canvas.draw_axis(*item.axis2d, item.category, anchor, color);
      }
    }
  }
  return canvas;
}

}  // namespace artic
