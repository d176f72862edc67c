#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "voskit/scene_gate.hpp"

namespace voskit {

/// Default memory capacities used across the tools.
inline constexpr int kDefaultGroundingCapacity = 22;
inline constexpr int kDefaultConceptCapacity = 7;

/// Frames held by the first-frame-anchored sliding grounding memory when
/// predicting frame t: {1} ∪ {max(2, t-capacity+1) .. t-1}, which is
/// min(t-1, capacity) frames. Requires 2 <= t <= total_frames, capacity >= 2.
std::vector<int> grounding_contents(int t, int capacity, int total_frames);

/// Bounded FIFO of frame indices. Pushes must be strictly increasing; when
/// the queue exceeds capacity the oldest frame is evicted.
class ConceptMemory {
public:
    explicit ConceptMemory(int capacity);

    /// Appends `frame`; returns the evicted frame, if any. Throws
    /// std::invalid_argument when `frame` is not greater than every queued
    /// index.
    std::optional<int> push(int frame);

    int capacity() const { return capacity_; }
    int size() const { return int(queue_.size()); }
    std::vector<int> contents() const { return {queue_.begin(), queue_.end()}; }

private:
    int capacity_ = 0;
    std::deque<int> queue_;
};

/// When frames enter the concept FIFO: only on gate activations (default), or
/// on every frame (the all-frames gate regime).
enum class ConceptPushPolicy { on_activation, every_frame };

struct MemorySnapshot {
    int t = 0;
    std::vector<int> grounding;       // empty at t=1
    std::vector<int> concept_queue;   // oldest first
    bool gate_active = false;
    std::optional<int> evicted;
    friend bool operator==(const MemorySnapshot&, const MemorySnapshot&) = default;
};

/// Full per-frame record of both memory policies over one video.
struct MemoryTrace {
    int grounding_capacity = 0;
    int concept_capacity = 0;
    ConceptPushPolicy push_policy = ConceptPushPolicy::on_activation;
    std::vector<MemorySnapshot> snapshots;  // one per frame, t = 1..T
};

/// Replays both memory policies for frames 1..total_frames. Frame 1 enters
/// the concept FIFO at the start; afterwards frame t is pushed whenever the
/// gate is active at t (or always, under every_frame). The gate trace must
/// cover at least total_frames frames. Throws std::invalid_argument on
/// inconsistent inputs.
MemoryTrace simulate(int total_frames, int grounding_capacity, int concept_capacity,
                     const GateTrace& gate,
                     ConceptPushPolicy policy = ConceptPushPolicy::on_activation);

/// One JSON object per line, one line per frame snapshot.
std::string memory_trace_to_jsonl(const MemoryTrace& trace);

}  // namespace voskit
