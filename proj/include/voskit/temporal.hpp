#pragma once

#include <optional>
#include <vector>

#include "voskit/metrics.hpp"

namespace voskit {

enum class SegmentKind { visible, disappeared, reappeared };

/// Inclusive frame range of one presence segment.
struct Segment {
    SegmentKind kind = SegmentKind::visible;
    int first = 0;
    int last = 0;
    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Partition of frames first_visible..T into visible / disappeared /
/// reappeared runs. Leading absence before the first appearance is not a
/// disappearance and belongs to no segment.
struct PresenceTimeline {
    int object_id = 0;
    int first_visible = 0;
    std::vector<Segment> segments;

    bool has_disappearance() const;
    bool has_reappearance() const;
};

/// Segments the per-frame ground-truth presence flags of one object
/// (presence[i] is frame i+1; true = non-empty mask). Maximal runs of empty
/// frames after the first appearance are "disappeared"; non-empty runs after
/// at least one disappearance are "reappeared". Throws std::invalid_argument
/// when the object is never visible.
PresenceTimeline timeline_segments(const std::vector<bool>& presence, int object_id = 0);

/// Mean of per-frame (J + F-dot)/2 over all frames in disappeared segments;
/// empty when the object never disappears.
std::optional<double> disappearance_score(const std::vector<FrameScore>& frame_scores,
                                          const PresenceTimeline& timeline);

/// Mean of per-frame (J + F-dot)/2 over frames in reappeared segments; empty
/// when the object never reappears. When `window` is set, only the first
/// `window` frames of each reappeared segment count.
std::optional<double> reappearance_score(const std::vector<FrameScore>& frame_scores,
                                         const PresenceTimeline& timeline,
                                         std::optional<int> window = std::nullopt);

}  // namespace voskit
