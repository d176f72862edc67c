#include <doctest.h>

#include <random>

#include "voskit/temporal.hpp"

using namespace voskit;

namespace {

std::vector<bool> pattern(std::initializer_list<int> bits) {
    std::vector<bool> p;
    for (int b : bits) p.push_back(b != 0);
    return p;
}

// One FrameScore per frame with the same value on all three metrics.
std::vector<FrameScore> flat_scores(std::initializer_list<double> values) {
    std::vector<FrameScore> s;
    for (double v : values) s.push_back({v, v, v});
    return s;
}

}  // namespace

TEST_CASE("an always-present object is a single visible segment") {
    const PresenceTimeline t = timeline_segments(pattern({1, 1, 1, 1}), 5);
    CHECK(t.object_id == 5);
    CHECK(t.first_visible == 1);
    REQUIRE(t.segments.size() == 1);
    CHECK(t.segments[0] == Segment{SegmentKind::visible, 1, 4});
    CHECK_FALSE(t.has_disappearance());
    CHECK_FALSE(t.has_reappearance());
}

TEST_CASE("disappearance and reappearance split the timeline") {
    const PresenceTimeline t = timeline_segments(pattern({1, 1, 0, 0, 1, 1}));
    REQUIRE(t.segments.size() == 3);
    CHECK(t.segments[0] == Segment{SegmentKind::visible, 1, 2});
    CHECK(t.segments[1] == Segment{SegmentKind::disappeared, 3, 4});
    CHECK(t.segments[2] == Segment{SegmentKind::reappeared, 5, 6});
}

TEST_CASE("leading absence is pre-appearance, not disappearance") {
    const PresenceTimeline t = timeline_segments(pattern({0, 0, 1, 1}));
    CHECK(t.first_visible == 3);
    REQUIRE(t.segments.size() == 1);
    CHECK(t.segments[0] == Segment{SegmentKind::visible, 3, 4});
}

TEST_CASE("a never-visible object is rejected") {
    CHECK_THROWS_AS(timeline_segments(pattern({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("disappearance score follows the empty-prediction convention") {
    const PresenceTimeline t = timeline_segments(pattern({1, 1, 0, 0, 1, 1}));

    // prediction empty on every disappeared frame
    auto perfect = flat_scores({1, 1, 1, 1, 1, 1});
    CHECK(disappearance_score(perfect, t) == 1.0);

    // empty on frame 3 only: mean of {1, 0}
    auto half = flat_scores({1, 1, 1, 0, 1, 1});
    CHECK(disappearance_score(half, t) == 0.5);

    const PresenceTimeline no_gap = timeline_segments(pattern({1, 1, 1}));
    CHECK_FALSE(disappearance_score(flat_scores({1, 1, 1}), no_gap).has_value());
}

TEST_CASE("reappearance score averages reappeared frames only") {
    const PresenceTimeline t = timeline_segments(pattern({1, 0, 1}));
    auto scores = flat_scores({1, 1, 0.8});
    CHECK(reappearance_score(scores, t) == doctest::Approx(0.8).epsilon(1e-12));

    const PresenceTimeline steady = timeline_segments(pattern({1, 1, 1}));
    CHECK_FALSE(reappearance_score(flat_scores({1, 1, 1}), steady).has_value());
}

TEST_CASE("reappearance window limits each reappeared segment") {
    const PresenceTimeline t = timeline_segments(pattern({1, 0, 1, 1, 1}));
    auto scores = flat_scores({1, 1, 0.9, 0.5, 0.1});
    CHECK(reappearance_score(scores, t) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(reappearance_score(scores, t, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(reappearance_score(scores, t, 2) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_THROWS_AS(reappearance_score(scores, t, 0), std::invalid_argument);
}

TEST_CASE("segments partition frames from first_visible with alternating kinds") {
    std::mt19937 rng(41);
    std::bernoulli_distribution bit(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<bool> presence;
        bool any = false;
        for (int t = 0; t < 20; ++t) {
            presence.push_back(bit(rng));
            any = any || presence.back();
        }
        if (!any) continue;

        const PresenceTimeline timeline = timeline_segments(presence);
        int expected_next = timeline.first_visible;
        bool seen_gap = false;
        for (const Segment& seg : timeline.segments) {
            CHECK(seg.first == expected_next);
            CHECK(seg.last >= seg.first);
            for (int t = seg.first; t <= seg.last; ++t) {
                const bool present = presence[std::size_t(t) - 1];
                CHECK(present == (seg.kind != SegmentKind::disappeared));
            }
            if (seg.kind == SegmentKind::disappeared) seen_gap = true;
            if (seg.kind == SegmentKind::reappeared) CHECK(seen_gap);
            expected_next = seg.last + 1;
        }
        CHECK(expected_next == int(presence.size()) + 1);
    }
}

TEST_CASE("perfect predictions give 1.0 wherever the temporal metrics are defined") {
    std::mt19937 rng(43);
    std::bernoulli_distribution bit(0.6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<bool> presence;
        bool any = false;
        for (int t = 0; t < 15; ++t) {
            presence.push_back(bit(rng));
            any = any || presence.back();
        }
        if (!any) continue;
        const PresenceTimeline timeline = timeline_segments(presence);
        // prediction == ground truth means every frame scores 1.0
        std::vector<FrameScore> scores(presence.size(), FrameScore{1, 1, 1});
        if (auto d = disappearance_score(scores, timeline)) CHECK(*d == 1.0);
        if (auto r = reappearance_score(scores, timeline)) CHECK(*r == 1.0);
        CHECK(disappearance_score(scores, timeline).has_value() == timeline.has_disappearance());
        CHECK(reappearance_score(scores, timeline).has_value() == timeline.has_reappearance());
    }
}
