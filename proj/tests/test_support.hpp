#pragma once

// Shared helpers for the unit and acceptance suites: mask builders, synthetic
// datasets on disk, and brute-force oracles kept independent of the library's
// own geometry code.

#include <atomic>
#include <cassert>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "voskit/image_io.hpp"
#include "voskit/mask.hpp"

namespace voskit::testing {

namespace fs = std::filesystem;

/// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("voskit_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

/// Mask from rows of '0'/'1' art, e.g. {"0110", "0110"}.
inline Mask mask_from_art(const std::vector<std::string>& rows) {
    const int h = int(rows.size());
    const int w = int(rows.front().size());
    Mask m(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (rows[std::size_t(r)][std::size_t(c)] == '1') m.set(r, c);
    return m;
}

inline Mask random_mask(std::mt19937& rng, int width, int height, double fill = 0.3) {
    std::bernoulli_distribution bit(fill);
    Mask m(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (bit(rng)) m.set(r, c);
    return m;
}

/// Filled axis-aligned rectangle; bounds are inclusive.
inline Mask rect_mask(int width, int height, int r0, int c0, int r1, int c1) {
    Mask m(width, height);
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) m.set(r, c);
    return m;
}

// --- brute-force oracles -------------------------------------------------

inline double oracle_jaccard(const Mask& gt, const Mask& pred) {
    int inter = 0, uni = 0;
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            const bool a = gt.at(r, c), b = pred.at(r, c);
            inter += a && b;
            uni += a || b;
        }
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

inline std::vector<Pixel> oracle_boundary(const Mask& m) {
    std::vector<Pixel> out;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (!m.at(r, c)) continue;
            bool edge = false;
            const int dr[] = {-1, 1, 0, 0};
            const int dc[] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= m.height() || cc < 0 || cc >= m.width() || !m.at(rr, cc)) {
                    edge = true;
                    break;
                }
            }
            if (edge) out.push_back({r, c});
        }
    }
    return out;
}

inline double oracle_matched_fraction(const std::vector<Pixel>& candidate,
                                      const std::vector<Pixel>& reference, double radius) {
    int matched = 0;
    for (const Pixel& p : candidate) {
        for (const Pixel& q : reference) {
            const double d2 =
                double(p.row - q.row) * (p.row - q.row) + double(p.col - q.col) * (p.col - q.col);
            if (d2 <= radius * radius) {
                ++matched;
                break;
            }
        }
    }
    return double(matched) / double(candidate.size());
}

inline double oracle_contour_f(const Mask& gt, const Mask& pred, double radius) {
    const bool ge = gt.is_empty(), pe = pred.is_empty();
    if (ge && pe) return 1.0;
    if (ge != pe) return 0.0;
    const auto bg = oracle_boundary(gt);
    const auto bp = oracle_boundary(pred);
    const double precision = oracle_matched_fraction(bp, bg, radius);
    const double recall = oracle_matched_fraction(bg, bp, radius);
    if (precision + recall == 0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

// --- synthetic dataset on disk -------------------------------------------

/// One object's footprint at one frame; empty rect encodes a disappearance.
struct ObjectBox {
    int id = 0;
    int r0 = 0, c0 = 0, r1 = -1, c1 = -1;  // inclusive; r1 < r0 means absent
    bool present() const { return r1 >= r0 && c1 >= c0; }
};

inline IndexedImage frame_image(int width, int height, const std::vector<ObjectBox>& boxes) {
    IndexedImage img{width, height, std::vector<std::uint8_t>(std::size_t(width) * height, 0)};
    for (const ObjectBox& box : boxes) {
        if (!box.present()) continue;
        for (int r = box.r0; r <= box.r1; ++r)
            for (int c = box.c0; c <= box.c1; ++c)
                img.labels[std::size_t(r) * width + c] = std::uint8_t(box.id);
    }
    return img;
}

struct SyntheticVideo {
    std::string name;
    int width = 32;
    int height = 24;
    std::vector<std::vector<ObjectBox>> frames;  // per frame, per object
};

inline void write_video(const fs::path& root, const SyntheticVideo& video) {
    fs::create_directories(root / video.name);
    for (std::size_t t = 0; t < video.frames.size(); ++t) {
        char name[16];
        std::snprintf(name, sizeof name, "%05zu.png", t);
        write_indexed_png(root / video.name / name,
                          frame_image(video.width, video.height, video.frames[t]));
    }
}

/// Three videos mixing always-visible, disappearing, and reappearing objects
/// plus a small (adaptive-radius) object; every temporal metric is defined at
/// dataset level.
inline std::vector<SyntheticVideo> mini_dataset_videos() {
    std::vector<SyntheticVideo> videos;

    SyntheticVideo a;
    a.name = "video_a";
    a.frames = {
        {{1, 2, 2, 9, 9}, {2, 12, 14, 17, 19}},
        {{1, 3, 3, 10, 10}, {2, 12, 15, 17, 20}},
        {{1, 4, 4, 11, 11}, {2, 0, 0, -1, -1}},  // object 2 disappears
        {{1, 5, 5, 12, 12}, {2, 0, 0, -1, -1}},
        {{1, 5, 6, 12, 13}, {2, 13, 14, 18, 19}},  // object 2 reappears
        {{1, 5, 7, 12, 14}, {2, 13, 15, 18, 20}},
    };
    videos.push_back(a);

    SyntheticVideo b;
    b.name = "video_b";
    b.frames = {
        {{1, 8, 8, 15, 15}},
        {{1, 0, 0, -1, -1}},
        {{1, 9, 9, 16, 16}},
        {{1, 0, 0, -1, -1}},
        {{1, 10, 10, 17, 17}},
    };
    videos.push_back(b);

    SyntheticVideo c;
    c.name = "video_c";
    c.frames = {
        // object 3 is a single pixel: exercises the adaptive radius floor
        {{1, 2, 2, 12, 12}, {3, 20, 28, 20, 28}},
        {{1, 2, 3, 12, 13}, {3, 20, 27, 20, 27}},
        {{1, 2, 4, 12, 14}, {3, 0, 0, -1, -1}},
        {{1, 2, 5, 12, 15}, {3, 21, 27, 21, 27}},
    };
    videos.push_back(c);
    return videos;
}

/// Writes the mini dataset; predictions equal ground truth.
inline void write_mini_dataset(const fs::path& gt_root, const fs::path& pred_root) {
    for (const SyntheticVideo& video : mini_dataset_videos()) {
        write_video(gt_root, video);
        write_video(pred_root, video);
    }
}

}  // namespace voskit::testing
