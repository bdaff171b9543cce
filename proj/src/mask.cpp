#include "firesig/mask.hpp"

#include "firesig/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace firesig {

ShapeMask::ShapeMask(int width, int height, double pixel_scale)
    : width_(width), height_(height), pixel_scale_(pixel_scale) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::DegenerateShape, "mask dimensions must be positive");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

ShapeMask::ShapeMask(int width, int height, std::vector<std::uint8_t> data, double pixel_scale)
    : width_(width), height_(height), pixel_scale_(pixel_scale), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::DegenerateShape, "mask dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorKind::DegenerateShape, "mask data size does not match dimensions");
  for (auto& v : data_) v = v ? 1 : 0;
}

std::size_t ShapeMask::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

double ShapeMask::sample(double x, double y) const noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const double v00 = at_or_zero(x0, y0);
  const double v10 = at_or_zero(x0 + 1, y0);
  const double v01 = at_or_zero(x0, y0 + 1);
  const double v11 = at_or_zero(x0 + 1, y0 + 1);
  return (1.0 - ay) * ((1.0 - ax) * v00 + ax * v10) + ay * ((1.0 - ax) * v01 + ax * v11);
}

void ShapeMask::check_valid() const {
  if (width_ < kMinSide || height_ < kMinSide)
    throw Error(ErrorKind::DegenerateShape,
                "mask is " + std::to_string(width_) + "x" + std::to_string(height_) + ", minimum is 8x8");
  const auto fg = foreground_count();
  if (fg < static_cast<std::size_t>(kMinForeground))
    throw Error(ErrorKind::DegenerateShape, "mask has " + std::to_string(fg) + " foreground pixels, minimum is 16");
}

int count_components(const ShapeMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  int components = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      ++components;
      stack.emplace_back(x, y);
      seen[static_cast<std::size_t>(y) * w + x] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!mask.at_or_zero(nx, ny)) continue;
            auto& s = seen[static_cast<std::size_t>(ny) * w + nx];
            if (s) continue;
            s = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return components;
}

Point2 compute_centroid(const ShapeMask& mask) {
  // Integer sums keep the result exact and independent of scan order.
  long long sx = 0;
  long long sy = 0;
  long long n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");
  return {static_cast<double>(sx) / static_cast<double>(n), static_cast<double>(sy) / static_cast<double>(n)};
}

ShapeMask rotate_mask(const ShapeMask& mask, double degrees, Point2 center) {
  // A counterclockwise turn on screen is clockwise in (x right, y down) math
  // coordinates, so the inverse map uses +angle.
  const double a = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  ShapeMask out(mask.width(), mask.height(), mask.pixel_scale());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const double dx = x - center.x;
      const double dy = y - center.y;
      // Forward (screen CCW): x' = c dx + s dy, y' = -s dx + c dy. Inverse below.
      const double sx = center.x + c * dx - s * dy;
      const double sy = center.y + s * dx + c * dy;
      out.set(x, y, mask.sample(sx, sy) >= 0.5);
    }
  }
  return out;
}

ShapeMask scale_mask(const ShapeMask& mask, double factor) {
  const int w = std::max(1, static_cast<int>(std::lround(mask.width() * factor)));
  const int h = std::max(1, static_cast<int>(std::lround(mask.height() * factor)));
  ShapeMask out(w, h, mask.pixel_scale() / factor);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Pixel-area alignment: output center (x + 0.5) / factor - 0.5 in source.
      const double sx = (x + 0.5) / factor - 0.5;
      const double sy = (y + 0.5) / factor - 0.5;
      out.set(x, y, mask.sample(sx, sy) >= 0.5);
    }
  }
  return out;
}

ShapeMask pad_mask(const ShapeMask& mask, int border) {
  ShapeMask out(mask.width() + 2 * border, mask.height() + 2 * border, mask.pixel_scale());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask.at(x, y)) out.set(x + border, y + border, true);
  return out;
}

}  // namespace firesig
