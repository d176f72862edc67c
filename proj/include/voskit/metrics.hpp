#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voskit/mask.hpp"

namespace voskit {

/// Per-frame region similarity J, contour accuracy F, and adaptive contour
/// accuracy F-dot. All in [0, 1].
struct FrameScore {
    double j = 0.0;
    double f = 0.0;
    double f_dot = 0.0;
};

/// Parameters of the per-frame metrics. A value of 0 for `cap` or `f_radius`
/// means "use fixed_radius(H, W) of the frame".
struct MetricParams {
    double alpha = 0.1;  // adaptive-radius scale, r = round(alpha * sqrt(area))
    int cap = 0;         // upper clamp of the adaptive radius, in pixels
    int f_radius = 0;    // fixed tolerance used by F, in pixels
};

/// Scores of one (video, object) sequence. jf_d / jf_r stay empty when the
/// object has no disappearance / reappearance.
struct SequenceReport {
    std::string video_id;
    int object_id = 0;
    std::vector<FrameScore> per_frame;  // frames 1..T
    int eval_frame_count = 0;
    double j_mean = 0.0;
    double f_mean = 0.0;
    double f_dot_mean = 0.0;
    double jf = 0.0;      // (j_mean + f_mean) / 2
    double jf_dot = 0.0;  // (j_mean + f_dot_mean) / 2
    std::optional<double> jf_d;
    std::optional<double> jf_r;
};

/// Jaccard index |gt ∩ pred| / |gt ∪ pred|. Both masks empty -> 1, exactly
/// one empty -> 0. Throws std::invalid_argument on dimension mismatch.
double region_similarity(const Mask& gt, const Mask& pred);

/// Fixed F tolerance: ceil(0.008 * sqrt(h^2 + w^2)), at least 1 pixel.
int fixed_radius(int height, int width);

/// Adaptive F-dot tolerance: clamp(round(alpha * sqrt(gt_area)), 1, cap).
int adaptive_radius(int gt_area, double alpha, int cap);

/// Boundary F-measure at tolerance `radius`: precision and recall of
/// boundary pixels matched within the dilated opposite boundary, combined as
/// 2PR/(P+R). Both masks empty -> 1, exactly one empty -> 0.
double contour_accuracy(const Mask& gt, const Mask& pred, double radius);

/// Contour accuracy whose tolerance follows the ground-truth object size;
/// small objects get proportionally tight tolerances.
double adaptive_contour_accuracy(const Mask& gt, const Mask& pred, double alpha, int cap);

/// Bundles J, F and F-dot for one frame.
FrameScore frame_score(const Mask& gt, const Mask& pred, const MetricParams& params = {});

/// Arithmetic means of the per-frame scores over `eval_frames` (1-based frame
/// indices; the conventional choice excludes frame 1, the given annotation).
/// Throws std::invalid_argument when eval_frames is empty or out of range.
SequenceReport aggregate(std::string video_id, int object_id,
                         std::vector<FrameScore> per_frame,
                         const std::vector<int>& eval_frames);

}  // namespace voskit
