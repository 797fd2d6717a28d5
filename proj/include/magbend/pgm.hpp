#pragma once

// Binary 8-bit grayscale PGM (P5) reading/writing and centerline extraction
// from binarized images of a dark continuum on a light background.

#include <cstdint>
#include <string>
#include <vector>

#include "magbend/curve.hpp"

namespace magbend {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, top row first
    double mm_per_pixel = 0.0;

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<size_t>(row) * width + col];
    }
};

GrayImage parse_pgm(const std::string& bytes);
GrayImage read_pgm(const std::string& path);
std::string write_pgm(const GrayImage& img);

enum class ScanAxis { x, y };

// Binarize (pixel < threshold means continuum), take the mean index of the
// continuum run per scan line, convert with mm_per_pixel, and root-align.
// Output y uses the bottom row as 0 so curves keep their physical handedness.
// Throws extraction_error when no continuum pixels exist or when more than
// 20% of occupied scan lines hold disjoint runs.
Curve2D extract_centerline(const GrayImage& img, int threshold, ScanAxis axis);

}  // namespace magbend
