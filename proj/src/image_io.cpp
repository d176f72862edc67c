#include "voskit/image_io.hpp"

#include <png.h>

#include <array>
#include <cstdio>
#include <memory>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/core.hpp>

#include "voskit/errors.hpp"

namespace voskit {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& file, const std::string& why) {
    throw data_error(file.string() + ": " + why);
}

// Standard VOC/DAVIS palette: channel bits of the index spread over the
// high bits of r/g/b.
std::array<png_color, 256> voc_palette() {
    std::array<png_color, 256> palette{};
    for (int i = 0; i < 256; ++i) {
        int r = 0, g = 0, b = 0, c = i;
        for (int j = 0; j < 8; ++j) {
            r |= ((c >> 0) & 1) << (7 - j);
            g |= ((c >> 1) & 1) << (7 - j);
            b |= ((c >> 2) & 1) << (7 - j);
            c >>= 3;
        }
        palette[i] = png_color{png_byte(r), png_byte(g), png_byte(b)};
    }
    return palette;
}

}  // namespace

IndexedImage read_indexed_png(const std::filesystem::path& file) {
    FilePtr fp(std::fopen(file.string().c_str(), "rb"));
    if (!fp) fail(file, "cannot open mask image");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        fail(file, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(file, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(file, "libpng init failed");
    }

    std::vector<std::uint8_t> labels;
    std::vector<png_bytep> rows;
    // libpng reports errors via longjmp; everything it may skip over lives
    // outside this frame or is trivially destructible.
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(file, "corrupt PNG data");
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    if (color_type != PNG_COLOR_TYPE_PALETTE) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(file, "not an indexed-color (palette) image");
    }

    const int width = int(png_get_image_width(png, info));
    const int height = int(png_get_image_height(png, info));
    if (png_get_bit_depth(png, info) < 8) png_set_packing(png);  // one index per byte
    png_read_update_info(png, info);

    labels.assign(std::size_t(width) * height, 0);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = labels.data() + std::size_t(y) * width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return IndexedImage{width, height, std::move(labels)};
}

void write_indexed_png(const std::filesystem::path& file, const IndexedImage& image) {
    if (image.width < 1 || image.height < 1 ||
        image.labels.size() != std::size_t(image.width) * image.height)
        throw std::invalid_argument("write_indexed_png: inconsistent image dimensions");

    FilePtr fp(std::fopen(file.string().c_str(), "wb"));
    if (!fp) fail(file, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(file, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(file, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(file, "PNG write failed");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(image.width), png_uint_32(image.height), 8,
                 PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    auto palette = voc_palette();
    png_set_PLTE(png, info, palette.data(), int(palette.size()));
    png_write_info(png, info);

    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(image.labels.data() + std::size_t(y) * image.width));
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

RgbImage read_color_image(const std::filesystem::path& file) {
    cv::Mat bgr = cv::imread(file.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) fail(file, "cannot decode color frame");

    RgbImage out;
    out.width = bgr.cols;
    out.height = bgr.rows;
    out.rgb.resize(std::size_t(bgr.cols) * bgr.rows * 3);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            std::uint8_t* px = out.rgb.data() + 3 * (std::size_t(y) * bgr.cols + x);
            px[0] = row[x][2];
            px[1] = row[x][1];
            px[2] = row[x][0];
        }
    }
    return out;
}

void write_color_image(const std::filesystem::path& file, const RgbImage& image) {
    if (image.width < 1 || image.height < 1 ||
        image.rgb.size() != std::size_t(image.width) * image.height * 3)
        throw std::invalid_argument("write_color_image: inconsistent image dimensions");

    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            const std::uint8_t* px = image.rgb.data() + 3 * (std::size_t(y) * image.width + x);
            row[x] = cv::Vec3b(px[2], px[1], px[0]);
        }
    }
    if (!cv::imwrite(file.string(), bgr)) fail(file, "cannot write color frame");
}

}  // namespace voskit
