#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace voskit {

/// Palette-indexed label image. `labels` holds one palette index per pixel,
/// row-major; index 0 is background, index k > 0 is object k.
struct IndexedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;
};

/// 8-bit interleaved RGB image, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel

    std::uint8_t r(int row, int col) const { return rgb[3 * (std::size_t(row) * width + col) + 0]; }
    std::uint8_t g(int row, int col) const { return rgb[3 * (std::size_t(row) * width + col) + 1]; }
    std::uint8_t b(int row, int col) const { return rgb[3 * (std::size_t(row) * width + col) + 2]; }
};

/// Reads a palette PNG without expanding it to RGB, so object indices are
/// preserved exactly. Bit depths 1/2/4/8 are unpacked to one byte per pixel.
/// Throws data_error (naming the file) if the image is not palette-indexed.
IndexedImage read_indexed_png(const std::filesystem::path& file);

/// Writes `image` as an 8-bit palette PNG using the standard VOC colormap.
void write_indexed_png(const std::filesystem::path& file, const IndexedImage& image);

/// Reads a color frame (JPEG or PNG) as RGB. Throws data_error on failure.
RgbImage read_color_image(const std::filesystem::path& file);

/// Writes an RGB image; format chosen from the file extension.
void write_color_image(const std::filesystem::path& file, const RgbImage& image);

}  // namespace voskit
