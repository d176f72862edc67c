#include "voskit/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace voskit {
namespace {

void require_same_shape(const Mask& gt, const Mask& pred, const char* op) {
    if (!gt.same_shape(pred))
        throw std::invalid_argument(std::string(op) + ": mask dimension mismatch");
}

// Fraction of `candidate` boundary pixels lying within the tolerance disk of
// the `reference` boundary.
double matched_fraction(const PixelSet& candidate, const PixelSet& reference, double radius) {
    const PixelSet zone = dilate(reference, radius);
    int matched = 0;
    for (const Pixel& p : candidate.pixels())
        if (zone.contains(p.row, p.col)) ++matched;
    return double(matched) / double(candidate.size());
}

}  // namespace

double region_similarity(const Mask& gt, const Mask& pred) {
    require_same_shape(gt, pred, "region_similarity");
    long long inter = 0, uni = 0;
    const auto& a = gt.bits();
    const auto& b = pred.bits();
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += (a[i] && b[i]);
        uni += (a[i] || b[i]);
    }
    if (uni == 0) return 1.0;  // both empty
    return double(inter) / double(uni);
}

int fixed_radius(int height, int width) {
    if (height < 1 || width < 1)
        throw std::invalid_argument("fixed_radius: dimensions must be >= 1");
    const double diagonal = std::hypot(double(height), double(width));
    return std::max(1, int(std::ceil(0.008 * diagonal)));
}

int adaptive_radius(int gt_area, double alpha, int cap) {
    if (alpha <= 0) throw std::invalid_argument("adaptive_radius: alpha must be > 0");
    if (cap < 1) throw std::invalid_argument("adaptive_radius: cap must be >= 1");
    const long r = std::lround(alpha * std::sqrt(double(gt_area)));
    return int(std::clamp(r, 1L, long(cap)));
}

double contour_accuracy(const Mask& gt, const Mask& pred, double radius) {
    require_same_shape(gt, pred, "contour_accuracy");
    if (radius < 0) throw std::invalid_argument("contour_accuracy: radius must be >= 0");

    const bool gt_empty = gt.is_empty();
    const bool pred_empty = pred.is_empty();
    if (gt_empty && pred_empty) return 1.0;
    if (gt_empty != pred_empty) return 0.0;

    const PixelSet gt_boundary = boundary(gt);
    const PixelSet pred_boundary = boundary(pred);
    // A non-empty mask always has boundary pixels, since image borders count
    // as outside.
    assert(!gt_boundary.empty() && !pred_boundary.empty());

    const double precision = matched_fraction(pred_boundary, gt_boundary, radius);
    const double recall = matched_fraction(gt_boundary, pred_boundary, radius);
    if (precision + recall == 0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double adaptive_contour_accuracy(const Mask& gt, const Mask& pred, double alpha, int cap) {
    require_same_shape(gt, pred, "adaptive_contour_accuracy");
    if (gt.is_empty()) return pred.is_empty() ? 1.0 : 0.0;  // radius irrelevant
    return contour_accuracy(gt, pred, adaptive_radius(gt.area(), alpha, cap));
}

FrameScore frame_score(const Mask& gt, const Mask& pred, const MetricParams& params) {
    require_same_shape(gt, pred, "frame_score");
    const int default_radius = fixed_radius(gt.height(), gt.width());
    const int f_radius = params.f_radius > 0 ? params.f_radius : default_radius;
    const int cap = params.cap > 0 ? params.cap : default_radius;
    FrameScore score;
    score.j = region_similarity(gt, pred);
    score.f = contour_accuracy(gt, pred, double(f_radius));
    score.f_dot = adaptive_contour_accuracy(gt, pred, params.alpha, cap);
    return score;
}

SequenceReport aggregate(std::string video_id, int object_id,
                         std::vector<FrameScore> per_frame,
                         const std::vector<int>& eval_frames) {
    if (eval_frames.empty()) throw std::invalid_argument("aggregate: eval_frames is empty");

    SequenceReport report;
    report.video_id = std::move(video_id);
    report.object_id = object_id;
    report.per_frame = std::move(per_frame);
    report.eval_frame_count = int(eval_frames.size());

    double j = 0, f = 0, f_dot = 0;
    for (int frame : eval_frames) {
        if (frame < 1 || frame > int(report.per_frame.size()))
            throw std::invalid_argument("aggregate: eval frame index out of range");
        const FrameScore& s = report.per_frame[std::size_t(frame) - 1];
        j += s.j;
        f += s.f;
        f_dot += s.f_dot;
    }
    const double n = double(eval_frames.size());
    report.j_mean = j / n;
    report.f_mean = f / n;
    report.f_dot_mean = f_dot / n;
    report.jf = (report.j_mean + report.f_mean) / 2.0;
    report.jf_dot = (report.j_mean + report.f_dot_mean) / 2.0;
    return report;
}

}  // namespace voskit
