#include "voskit/temporal.hpp"

#include <algorithm>
#include <stdexcept>

namespace voskit {
namespace {

double combined(const FrameScore& s) { return (s.j + s.f_dot) / 2.0; }

std::optional<double> segment_mean(const std::vector<FrameScore>& frame_scores,
                                   const PresenceTimeline& timeline, SegmentKind kind,
                                   std::optional<int> window) {
    double sum = 0;
    int count = 0;
    for (const Segment& seg : timeline.segments) {
        if (seg.kind != kind) continue;
        int last = seg.last;
        if (window) last = std::min(last, seg.first + *window - 1);
        for (int t = seg.first; t <= last; ++t) {
            if (t < 1 || t > int(frame_scores.size()))
                throw std::invalid_argument("temporal score: frame scores do not cover timeline");
            sum += combined(frame_scores[std::size_t(t) - 1]);
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / double(count);
}

}  // namespace

bool PresenceTimeline::has_disappearance() const {
    return std::any_of(segments.begin(), segments.end(),
                       [](const Segment& s) { return s.kind == SegmentKind::disappeared; });
}

bool PresenceTimeline::has_reappearance() const {
    return std::any_of(segments.begin(), segments.end(),
                       [](const Segment& s) { return s.kind == SegmentKind::reappeared; });
}

PresenceTimeline timeline_segments(const std::vector<bool>& presence, int object_id) {
    const int total = int(presence.size());
    int first_visible = 0;
    for (int t = 1; t <= total; ++t) {
        if (presence[std::size_t(t) - 1]) {
            first_visible = t;
            break;
        }
    }
    if (first_visible == 0)
        throw std::invalid_argument("timeline_segments: object is never visible");

    PresenceTimeline timeline;
    timeline.object_id = object_id;
    timeline.first_visible = first_visible;

    bool seen_disappearance = false;
    int t = first_visible;
    while (t <= total) {
        const bool present = presence[std::size_t(t) - 1];
        int end = t;
        while (end + 1 <= total && presence[std::size_t(end + 1) - 1] == present) ++end;
        SegmentKind kind;
        if (!present) {
            kind = SegmentKind::disappeared;
            seen_disappearance = true;
        } else {
            kind = seen_disappearance ? SegmentKind::reappeared : SegmentKind::visible;
        }
        timeline.segments.push_back({kind, t, end});
        t = end + 1;
    }
    return timeline;
}

std::optional<double> disappearance_score(const std::vector<FrameScore>& frame_scores,
                                          const PresenceTimeline& timeline) {
    return segment_mean(frame_scores, timeline, SegmentKind::disappeared, std::nullopt);
}

std::optional<double> reappearance_score(const std::vector<FrameScore>& frame_scores,
                                         const PresenceTimeline& timeline,
                                         std::optional<int> window) {
    if (window && *window < 1)
        throw std::invalid_argument("reappearance_score: window must be >= 1");
    return segment_mean(frame_scores, timeline, SegmentKind::reappeared, window);
}

}  // namespace voskit
