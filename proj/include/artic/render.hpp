#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "artic/geometry.hpp"
#include "artic/raster.hpp"

namespace artic {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kBackground{32, 32, 32};
inline constexpr Rgb kTruthColor{0, 200, 80};
inline constexpr Rgb kRotationColor{0, 114, 178};
inline constexpr Rgb kTranslationColor{204, 121, 167};

Rgb category_color(ArticulationType type);

class Canvas {
 public:
  Canvas(int width, int height, Rgb fill = kBackground);

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  void put(int x, int y, Rgb c);

  void draw_line(Vec2 a, Vec2 b, Rgb c);
  void draw_box(const Box2D& box, Rgb c);
  /// Pixels of the mask with a 4-neighbour outside it.
  void draw_contour(const Mask& mask, Rgb c);
  void tint(const Mask& mask, Rgb c, double weight);
  /// The whole visible extent of an image line.
  void draw_axis(const ProjectedAxis& axis, ArticulationType category, const Box2D& box, Rgb c);

  /// Binary PPM (P6).
  std::string to_ppm() const;

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// One thing to draw on a frame.
struct OverlayItem {
  ArticulationType category = ArticulationType::rotation;
  bool truth = false;
  std::optional<Box2D> box;
  std::optional<Mask> mask;
  std::optional<ProjectedAxis> axis2d;
};

Canvas render_frame(int width, int height, const std::vector<OverlayItem>& items);

}  // namespace artic
