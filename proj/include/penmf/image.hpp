// image.hpp
// Grayscale images scaled to [0, 1], Netpbm PGM I/O (ASCII P2 and binary
// P5), and the resolution reduction used before building data matrices.
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "penmf/errors.hpp"

namespace penmf {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> intensities;  // row-major, each value in [0, 1]

  std::size_t pixel_count() const { return intensities.size(); }
};

enum class PgmFormat { P2, P5 };

// Parses a PGM byte stream. Header per the Netpbm spec: whitespace-delimited
// magic/width/height/maxval with '#' comments; a single whitespace character
// separates the P5 maxval from the raster; samples are two-byte big-endian
// when maxval > 255 (maxval up to 65535). Intensities come out as
// value / maxval. Errors carry the byte offset of the failure.
GrayImage parse_pgm(std::span<const unsigned char> bytes);

// Serializes with samples rounded to round(v * maxval).
std::vector<unsigned char> write_pgm(const GrayImage& img, PgmFormat format, int maxval = 255);

GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path,
              PgmFormat format = PgmFormat::P5, int maxval = 255);

// Reduces resolution. When both source dimensions are integer multiples of
// the target, averages over the integer-factor blocks; otherwise bilinear
// interpolation at target-pixel centers. Upscaling is rejected.
GrayImage downsample(const GrayImage& img, int target_w, int target_h);

}  // namespace penmf
