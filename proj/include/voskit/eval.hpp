#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "voskit/memory_bank.hpp"
#include "voskit/metrics.hpp"
#include "voskit/scene_gate.hpp"
#include "voskit/temporal.hpp"

namespace voskit {

enum class EvalFramePolicy { skip_first, all };

/// Full evaluation configuration. Everything here is surfaced as a CLI flag
/// and may also come from a key-value config file.
struct EvalConfig {
    std::filesystem::path gt_root;
    std::filesystem::path pred_root;
    std::optional<std::filesystem::path> frames_root;

    MetricParams metrics;
    HistogramBins bins;
    double threshold = 0.35;
    AnchorMode anchor_mode = AnchorMode::previous;

    EvalFramePolicy eval_frames = EvalFramePolicy::skip_first;
    std::optional<int> reappearance_window;

    bool strict = false;           // missing predictions become hard errors
    bool per_video_first = false;  // average objects within a video first
    bool frame_weighted = false;   // weight sequences by evaluated frame count

    // Parallelism only; excluded from report echoes so outputs stay
    // byte-identical across worker counts. 0 = env var / hardware default.
    int workers = 0;
};

/// The seven dataset columns, in report order. jf_d / jf_r average only the
/// sequences where they are defined and stay empty when none are.
struct DatasetMeans {
    double jf_dot = 0.0;
    double j = 0.0;
    double f_dot = 0.0;
    std::optional<double> jf_d;
    std::optional<double> jf_r;
    double f = 0.0;
    double jf = 0.0;
};

struct DatasetReport {
    std::vector<SequenceReport> sequences;  // sorted by (video_id, object_id)
    DatasetMeans means;
    std::vector<std::string> warnings;
    EvalConfig config;
};

/// Walks every video under gt_root, scores each (video, object) pair against
/// pred_root, and aggregates. Missing prediction videos or frames are scored
/// as empty masks and reported in warnings (hard errors under strict);
/// unknown prediction videos or object ids are hard errors. Videos run
/// concurrently; results are reduced in (video, object) order, so reports are
/// byte-identical regardless of the worker count.
DatasetReport run_evaluation(const EvalConfig& config);

/// One grid point of an ablation run.
struct AblationRow {
    std::string label;  // e.g. "7", "22", "0 (all w/ C)", "0.35", "1 (w/o C)"
    std::optional<int> grounding_capacity;
    std::optional<double> threshold;
    DatasetReport report;
    // Gate/memory statistics, present when frames_root is configured.
    std::optional<int> gate_activations;
    std::optional<int> concept_evictions;
};

/// Runs one evaluation per grid point over grounding-memory sizes and/or
/// scene-change thresholds (cross product when both are given). Row labels
/// follow the ablation-table conventions: threshold 0 -> "0 (all w/ C)",
/// threshold 1 -> "1 (w/o C)". Throws std::invalid_argument when both grids
/// are empty or a grid value is invalid.
std::vector<AblationRow> run_ablation_grid(const EvalConfig& config,
                                           const std::vector<int>& grounding_grid,
                                           const std::vector<double>& threshold_grid);

/// CSV cell presentation: scores x100 with 2 decimals, "-" when undefined.
std::string format_score_cell(const std::optional<double>& score);

/// Machine-precision report. Key order and float formatting are
/// deterministic; re-running on identical inputs gives identical bytes.
std::string report_to_json(const DatasetReport& report);

/// Summary CSV: header `name,JF_dot,J,F_dot,JFd,JFr,F,JF`, one row per
/// (video, object) named `<video>_<object>`, then an `overall` dataset row.
std::string report_to_csv(const DatasetReport& report);

std::string ablation_to_csv(const std::vector<AblationRow>& rows);
std::string ablation_to_json(const std::vector<AblationRow>& rows);

/// Recomputes dataset means from per-sequence values (consistency checks).
DatasetMeans recompute_means(const DatasetReport& report);

void write_text_file(const std::filesystem::path& file, const std::string& content);

/// Worker count resolution: explicit value, else VOSKIT_WORKERS, else
/// hardware concurrency.
int resolve_workers(int requested);

}  // namespace voskit
