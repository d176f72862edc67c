#include "voskit/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "voskit/errors.hpp"
#include "voskit/image_io.hpp"

namespace voskit {

Mask::Mask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("Mask: width and height must be >= 1");
    bits_.assign(std::size_t(width) * height, 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1) throw std::invalid_argument("Mask: width and height must be >= 1");
    if (bits_.size() != std::size_t(width) * height)
        throw std::invalid_argument("Mask: bit count must equal width*height");
    for (auto& b : bits_) b = b ? 1 : 0;
}

int Mask::area() const {
    return int(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

PixelSet::PixelSet(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("PixelSet: width and height must be >= 1");
    bits_.assign(std::size_t(width) * height, 0);
}

void PixelSet::insert(int row, int col) {
    if (row < 0 || row >= height_ || col < 0 || col >= width_)
        throw std::invalid_argument("PixelSet: coordinate out of bounds");
    std::uint8_t& cell = bits_[index(row, col)];
    if (!cell) {
        cell = 1;
        ++count_;
    }
}

std::vector<Pixel> PixelSet::pixels() const {
    std::vector<Pixel> out;
    out.reserve(count_);
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c)
            if (bits_[index(r, c)]) out.push_back({r, c});
    return out;
}

bool PixelSet::is_subset_of(const PixelSet& other) const {
    if (width_ != other.width_ || height_ != other.height_) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !other.bits_[i]) return false;
    return true;
}

VideoAnnotation::VideoAnnotation(std::string video_id, int width, int height,
                                 std::vector<std::vector<std::uint8_t>> frames,
                                 std::vector<std::string> frame_names)
    : video_id_(std::move(video_id)),
      width_(width),
      height_(height),
      frames_(std::move(frames)),
      frame_names_(std::move(frame_names)) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("VideoAnnotation: width and height must be >= 1");
    if (frames_.empty()) throw std::invalid_argument("VideoAnnotation: no frames");
    std::set<int> ids;
    for (const auto& labels : frames_) {
        if (labels.size() != std::size_t(width) * height)
            throw std::invalid_argument("VideoAnnotation: frame size mismatch");
        for (std::uint8_t v : labels)
            if (v != 0) ids.insert(int(v));
    }
    object_ids_.assign(ids.begin(), ids.end());
    if (frame_names_.empty()) frame_names_.resize(frames_.size());
    if (frame_names_.size() != frames_.size())
        throw std::invalid_argument("VideoAnnotation: frame name count mismatch");
}

Mask VideoAnnotation::mask(int frame, int object_id) const {
    const auto& src = labels(frame);
    std::vector<std::uint8_t> bits(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) bits[i] = src[i] == object_id ? 1 : 0;
    return Mask(width_, height_, std::move(bits));
}

const std::vector<std::uint8_t>& VideoAnnotation::labels(int frame) const {
    if (frame < 1 || frame > frame_count())
        throw std::invalid_argument("VideoAnnotation: frame index out of range");
    return frames_[std::size_t(frame) - 1];
}

int VideoAnnotation::object_area(int frame, int object_id) const {
    const auto& src = labels(frame);
    return int(std::count(src.begin(), src.end(), std::uint8_t(object_id)));
}

VideoAnnotation load_annotation_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw data_error("annotation directory not found: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == ".png") files.push_back(entry.path());
    }
    if (files.empty()) throw data_error("no mask images in: " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<std::vector<std::uint8_t>> frames;
    std::vector<std::string> names;
    int width = 0, height = 0;
    for (const auto& file : files) {
        IndexedImage img = read_indexed_png(file);
        if (frames.empty()) {
            width = img.width;
            height = img.height;
        } else if (img.width != width || img.height != height) {
            throw data_error(file.string() + ": frame dimensions " + std::to_string(img.width) +
                             "x" + std::to_string(img.height) + " differ from " +
                             std::to_string(width) + "x" + std::to_string(height));
        }
        frames.push_back(std::move(img.labels));
        names.push_back(file.stem().string());
    }
    return VideoAnnotation(dir.filename().string(), width, height, std::move(frames),
                           std::move(names));
}

PixelSet boundary(const Mask& m) {
    PixelSet out(m.width(), m.height());
    const int h = m.height(), w = m.width();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!m.at(r, c)) continue;
            const bool edge = r == 0 || r == h - 1 || c == 0 || c == w - 1;
            if (edge || !m.at(r - 1, c) || !m.at(r + 1, c) || !m.at(r, c - 1) || !m.at(r, c + 1))
                out.insert(r, c);
        }
    }
    return out;
}

PixelSet dilate(const PixelSet& s, double radius) {
    if (radius < 0) throw std::invalid_argument("dilate: radius must be >= 0");
    const int w = s.width(), h = s.height();
    PixelSet out(w, h);
    if (s.empty()) return out;

    const double r2 = radius * radius;
    const double diag2 = double(w - 1) * (w - 1) + double(h - 1) * (h - 1);
    if (r2 >= diag2) {  // any member covers the whole image
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out.insert(r, c);
        return out;
    }

    const int reach = int(std::floor(radius));
    std::vector<Pixel> offsets;
    for (int dr = -reach; dr <= reach; ++dr)
        for (int dc = -reach; dc <= reach; ++dc)
            if (double(dr) * dr + double(dc) * dc <= r2) offsets.push_back({dr, dc});

    for (const Pixel& p : s.pixels()) {
        for (const Pixel& d : offsets) {
            const int r = p.row + d.row, c = p.col + d.col;
            if (r >= 0 && r < h && c >= 0 && c < w) out.insert(r, c);
        }
    }
    return out;
}

int mask_area(const Mask& m) { return m.area(); }

}  // namespace voskit
