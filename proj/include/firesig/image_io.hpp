#pragma once

#include "firesig/mask.hpp"

#include <filesystem>
#include <string>

namespace firesig {

/// Foreground threshold for grayscale inputs (value >= 128 is foreground).
inline constexpr int kForegroundThreshold = 128;

/// Reads P2 or P5 PGM (maxval <= 255). Throws Error{Io} on malformed input.
ShapeMask read_pgm(const std::filesystem::path& path);

/// Reads an 8-bit grayscale (or convertible) PNG through libpng.
ShapeMask read_png(const std::filesystem::path& path);

/// Dispatches on file signature, not extension.
ShapeMask read_mask(const std::filesystem::path& path);

/// Binary P5 with maxval 255; foreground written as 255.
void write_pgm(const std::filesystem::path& path, const ShapeMask& mask);

/// In-memory P5 encoding, identical to the bytes write_pgm produces.
std::string encode_pgm(const ShapeMask& mask);

}  // namespace firesig
