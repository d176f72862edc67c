#pragma once

#include <string>
#include <vector>

#include "voskit/image_io.hpp"

namespace voskit {

struct HistogramBins {
    int h = 8;
    int s = 8;
    int v = 8;
    friend bool operator==(const HistogramBins&, const HistogramBins&) = default;
};

/// Normalized joint HSV histogram of one frame. Weights are laid out with the
/// V bin fastest: index = (hb * s + sb) * v + vb.
class Histogram {
public:
    Histogram() = default;

    /// Validates non-negative weights summing to 1 within 1e-9.
    static Histogram from_weights(HistogramBins bins, std::vector<double> weights);

    const HistogramBins& bins() const { return bins_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    HistogramBins bins_;
    std::vector<double> weights_;
};

/// Joint 3-D color histogram over H in [0,360), S,V in [0,1], normalized by
/// pixel count. Throws std::invalid_argument for a zero-pixel image.
Histogram hsv_histogram(const RgbImage& frame, HistogramBins bins = {});

/// Bounded Bhattacharyya distance D = sqrt(1 - sum_i sqrt(p_i q_i)), clamped
/// to [0,1]. Throws std::invalid_argument on bin-shape mismatch.
double bhattacharyya(const Histogram& p, const Histogram& q);

/// Scene-change decision. threshold 0 -> always active, threshold 1 -> never
/// active, otherwise active iff distance >= threshold.
bool gate_decision(double distance, double threshold);

/// Which frame the current one is compared against: the immediately previous
/// frame, or the frame of the last activation (initially frame 1).
enum class AnchorMode { previous, anchored };

struct GateEntry {
    int t = 0;            // 1-based frame index
    double distance = 0;  // Bhattacharyya distance to the reference frame
    bool active = false;
    int anchor = 0;  // reference frame compared against (t itself at t=1)
    friend bool operator==(const GateEntry&, const GateEntry&) = default;
};

/// Per-frame activation schedule of the concept memory.
struct GateTrace {
    double threshold = 0.0;
    AnchorMode anchor_mode = AnchorMode::previous;
    std::vector<GateEntry> entries;  // one per frame, t = 1..T

    int frame_count() const { return int(entries.size()); }
    bool active(int t) const { return entries.at(std::size_t(t) - 1).active; }
};

/// Runs the gate over a frame sequence. Frame 1 is never active (its mask is
/// given); for t >= 2 the distance is computed against the reference frame of
/// `mode`, and in anchored mode the anchor moves to t on activation.
GateTrace gate_trace(const std::vector<RgbImage>& frames, double threshold,
                     AnchorMode mode = AnchorMode::previous, HistogramBins bins = {});

/// As above, reading `<dir>/<frame>.{jpg,jpeg,png}` sorted by filename.
GateTrace gate_trace_from_dir(const std::filesystem::path& dir, double threshold,
                              AnchorMode mode = AnchorMode::previous, HistogramBins bins = {});

std::string gate_trace_to_json(const GateTrace& trace);
GateTrace gate_trace_from_json(const std::string& json_text);
GateTrace load_gate_trace(const std::filesystem::path& file);

}  // namespace voskit
