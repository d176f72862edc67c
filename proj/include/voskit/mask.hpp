#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace voskit {

/// Per-object binary occupancy bitmap for one frame. Row-major, one byte per
/// pixel (1 = object). Operations never mutate their inputs.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height);
    Mask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }

    /// Number of set pixels.
    int area() const;
    bool is_empty() const { return area() == 0; }
    bool same_shape(const Mask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int row, int col) const { return std::size_t(row) * width_ + col; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Pixel {
    int row = 0;
    int col = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Set of pixel coordinates inside a fixed image bound. Backed by a bitmap so
/// membership tests stay O(1) for the boundary-matching metrics.
class PixelSet {
public:
    PixelSet() = default;
    PixelSet(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool contains(int row, int col) const { return bits_[index(row, col)] != 0; }
    void insert(int row, int col);

    /// Number of member pixels.
    int size() const { return count_; }
    bool empty() const { return count_ == 0; }

    /// Members in row-major order.
    std::vector<Pixel> pixels() const;

    bool is_subset_of(const PixelSet& other) const;

    friend bool operator==(const PixelSet&, const PixelSet&) = default;

private:
    std::size_t index(int row, int col) const { return std::size_t(row) * width_ + col; }

    int width_ = 0;
    int height_ = 0;
    int count_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Ordered per-frame, per-object annotation of one video. Frames are indexed
/// 1..T; object ids are the nonzero palette indices present in the label
/// images. All frames share one width/height.
class VideoAnnotation {
public:
    VideoAnnotation() = default;
    /// `frames[i]` holds the palette indices of frame i+1.
    VideoAnnotation(std::string video_id, int width, int height,
                    std::vector<std::vector<std::uint8_t>> frames,
                    std::vector<std::string> frame_names = {});

    const std::string& video_id() const { return video_id_; }
    int frame_count() const { return int(frames_.size()); }
    int width() const { return width_; }
    int height() const { return height_; }

    /// Sorted nonzero palette indices that occur in at least one frame.
    const std::vector<int>& object_ids() const { return object_ids_; }

    /// File stems (no extension) in load order; empty names when synthesized.
    const std::vector<std::string>& frame_names() const { return frame_names_; }

    /// Binary mask of `object_id` at `frame` (1-based). Empty masks are valid
    /// (disappearance frames).
    Mask mask(int frame, int object_id) const;

    /// Raw palette indices of `frame` (1-based).
    const std::vector<std::uint8_t>& labels(int frame) const;

    /// Set-pixel count of `object_id` at `frame` without materializing a Mask.
    int object_area(int frame, int object_id) const;

private:
    std::string video_id_;
    int width_ = 0;
    int height_ = 0;
    std::vector<std::vector<std::uint8_t>> frames_;
    std::vector<std::string> frame_names_;
    std::vector<int> object_ids_;
};

/// Loads `<dir>/<frame>.png` palette mask images, sorted lexicographically by
/// filename, into a VideoAnnotation whose video id is the directory name.
/// Throws data_error for a missing directory, inconsistent frame dimensions,
/// or a non-indexed image (the diagnostic names the offending file).
VideoAnnotation load_annotation_dir(const std::filesystem::path& dir);

/// Boundary pixels of `m` under 4-connectivity: p is a boundary pixel iff
/// m(p)=1 and at least one 4-neighbor is 0 or outside the image.
PixelSet boundary(const Mask& m);

/// Euclidean-disk dilation: q is included iff some p in `s` has
/// dist(q, p) <= radius. radius 0 is the identity; results clip to bounds.
PixelSet dilate(const PixelSet& s, double radius);

/// Number of set pixels.
int mask_area(const Mask& m);

}  // namespace voskit
