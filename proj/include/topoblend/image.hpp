#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace topoblend {

/// 8-bit grayscale raster.
struct GrayImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top

    std::uint8_t at(int col, int row) const { return pixels[size_t(row) * width + col]; }
    bool empty() const { return width == 0 || height == 0; }
};

/// Read a PGM file (P2 ascii or P5 binary, maxval <= 255).
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::string& bytes, const std::string& origin = "<memory>");

/// Write binary P5 (used by tests and fixtures).
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace topoblend
