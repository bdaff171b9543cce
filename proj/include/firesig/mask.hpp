#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace firesig {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Binary raster of a segmented pattern. Pixel (x, y) has its center at integer
/// coordinates; x grows to the right, y grows downward (image convention).
class ShapeMask {
 public:
  static constexpr int kMinSide = 8;
  static constexpr int kMinForeground = 16;

  ShapeMask() = default;
  ShapeMask(int width, int height, double pixel_scale = 1.0);
  ShapeMask(int width, int height, std::vector<std::uint8_t> data, double pixel_scale = 1.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double pixel_scale() const noexcept { return pixel_scale_; }
  void set_pixel_scale(double s) noexcept { pixel_scale_ = s; }

  bool at(int x, int y) const noexcept { return data_[index(x, y)] != 0; }
  /// Out-of-range coordinates read as background.
  bool at_or_zero(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && data_[index(x, y)] != 0;
  }
  void set(int x, int y, bool v) noexcept { data_[index(x, y)] = v ? 1 : 0; }

  /// Row-major cells, 1 = foreground.
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::size_t foreground_count() const noexcept;

  /// Bilinear interpolation of the 0/1 grid at a continuous position.
  double sample(double x, double y) const noexcept;

  /// Throws DegenerateShape unless size >= 8x8 and >= 16 foreground pixels.
  void check_valid() const;

  bool operator==(const ShapeMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && data_ == o.data_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  double pixel_scale_ = 1.0;
  std::vector<std::uint8_t> data_;
};

/// Number of 8-connected foreground components.
int count_components(const ShapeMask& mask);

/// Arithmetic mean of foreground pixel centers. Throws EmptyMask if none.
Point2 compute_centroid(const ShapeMask& mask);

/// Rotate counterclockwise (as displayed) by `degrees` about `center`, bilinear
/// resampling thresholded at 0.5. Output has the same size as the input.
ShapeMask rotate_mask(const ShapeMask& mask, double degrees, Point2 center);

/// Resample by `factor` (output size rounded), bilinear + threshold 0.5.
ShapeMask scale_mask(const ShapeMask& mask, double factor);

/// Place the mask centered on a larger background canvas.
ShapeMask pad_mask(const ShapeMask& mask, int border);

}  // namespace firesig
