#include "voskit/memory_bank.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace voskit {

std::vector<int> grounding_contents(int t, int capacity, int total_frames) {
    if (capacity < 2) throw std::invalid_argument("grounding_contents: capacity must be >= 2");
    if (t < 2) throw std::invalid_argument("grounding_contents: t must be >= 2");
    if (t > total_frames)
        throw std::invalid_argument("grounding_contents: t exceeds total frames");

    std::vector<int> contents{1};
    for (int frame = std::max(2, t - capacity + 1); frame <= t - 1; ++frame)
        contents.push_back(frame);
    return contents;
}

ConceptMemory::ConceptMemory(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("ConceptMemory: capacity must be >= 1");
}

std::optional<int> ConceptMemory::push(int frame) {
    if (!queue_.empty() && frame <= queue_.back())
        throw std::invalid_argument("ConceptMemory: frame indices must be strictly increasing");
    queue_.push_back(frame);
    if (int(queue_.size()) > capacity_) {
        const int evicted = queue_.front();
        queue_.pop_front();
        return evicted;
    }
    return std::nullopt;
}

MemoryTrace simulate(int total_frames, int grounding_capacity, int concept_capacity,
                     const GateTrace& gate, ConceptPushPolicy policy) {
    if (total_frames < 1) throw std::invalid_argument("simulate: total_frames must be >= 1");
    if (grounding_capacity < 2)
        throw std::invalid_argument("simulate: grounding capacity must be >= 2");
    if (gate.frame_count() < total_frames)
        throw std::invalid_argument("simulate: gate trace shorter than the video");

    MemoryTrace trace;
    trace.grounding_capacity = grounding_capacity;
    trace.concept_capacity = concept_capacity;
    trace.push_policy = policy;

    ConceptMemory concept_memory(concept_capacity);
    for (int t = 1; t <= total_frames; ++t) {
        MemorySnapshot snap;
        snap.t = t;
        snap.gate_active = gate.active(t);
        if (t >= 2) snap.grounding = grounding_contents(t, grounding_capacity, total_frames);

        const bool push = policy == ConceptPushPolicy::every_frame
                              ? true
                              : (t == 1 || snap.gate_active);  // frame 1 seeds the FIFO
        if (push) snap.evicted = concept_memory.push(t);
        snap.concept_queue = concept_memory.contents();
        trace.snapshots.push_back(std::move(snap));
    }
    return trace;
}

std::string memory_trace_to_jsonl(const MemoryTrace& trace) {
    using ordered_json = nlohmann::ordered_json;
    std::ostringstream out;
    for (const MemorySnapshot& snap : trace.snapshots) {
        ordered_json line;
        line["t"] = snap.t;
        line["grounding"] = snap.grounding;
        line["concept"] = snap.concept_queue;
        line["gate_active"] = snap.gate_active;
        line["evicted"] = snap.evicted ? ordered_json(*snap.evicted) : ordered_json(nullptr);
        out << line.dump() << "\n";
    }
    return out.str();
}

}  // namespace voskit
