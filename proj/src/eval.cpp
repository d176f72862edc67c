#include "voskit/eval.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "voskit/errors.hpp"
#include "voskit/image_io.hpp"
#include "voskit/version.hpp"

namespace voskit {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<std::string> sorted_subdirs(const fs::path& root) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<int> eval_frame_indices(EvalFramePolicy policy, int frame_count) {
    std::vector<int> frames;
    const int first = policy == EvalFramePolicy::skip_first ? 2 : 1;
    for (int t = first; t <= frame_count; ++t) frames.push_back(t);
    return frames;
}

Mask mask_from_labels(int width, int height, const std::vector<std::uint8_t>* labels,
                      int object_id) {
    Mask mask(width, height);
    if (!labels) return mask;  // missing prediction frame -> empty mask
    std::vector<std::uint8_t> bits(labels->size());
    for (std::size_t i = 0; i < labels->size(); ++i)
        bits[i] = (*labels)[i] == std::uint8_t(object_id) ? 1 : 0;
    return Mask(width, height, std::move(bits));
}

struct VideoResult {
    std::vector<SequenceReport> sequences;
    std::vector<std::string> warnings;
};

VideoResult evaluate_video(const EvalConfig& config, const std::string& video_id) {
    VideoResult result;
    const VideoAnnotation gt = load_annotation_dir(config.gt_root / video_id);
    const int frame_count = gt.frame_count();
    const std::vector<int> eval_frames = eval_frame_indices(config.eval_frames, frame_count);
    if (eval_frames.empty())
        throw data_error("video " + video_id +
                         ": single-frame video has nothing to evaluate under skip-first policy");

    auto warn_or_fail = [&](const std::string& message) {
        if (config.strict) throw data_error(message);
        result.warnings.push_back(message);
    };

    // Prediction frames are read individually by ground-truth stem so missing
    // files degrade to empty masks instead of failing the run.
    std::vector<std::unique_ptr<std::vector<std::uint8_t>>> pred_frames{};
    pred_frames.resize(std::size_t(frame_count));
    const fs::path pred_dir = config.pred_root / video_id;
    if (!fs::is_directory(pred_dir)) {
        warn_or_fail("video " + video_id +
                     ": prediction directory missing; all frames scored as empty");
    } else {
        std::set<std::string> gt_stems;
        for (int t = 1; t <= frame_count; ++t) {
            const std::string stem = gt.frame_names()[std::size_t(t) - 1];
            gt_stems.insert(stem);
            const fs::path file = pred_dir / (stem + ".png");
            if (!fs::exists(file)) {
                warn_or_fail("video " + video_id + ": missing prediction frame " + stem +
                             ".png; scored as empty");
                continue;
            }
            IndexedImage img = read_indexed_png(file);
            if (img.width != gt.width() || img.height != gt.height())
                throw data_error(file.string() + ": prediction dimensions " +
                                 std::to_string(img.width) + "x" + std::to_string(img.height) +
                                 " differ from ground truth " + std::to_string(gt.width()) + "x" +
                                 std::to_string(gt.height()));
            pred_frames[std::size_t(t) - 1] =
                std::make_unique<std::vector<std::uint8_t>>(std::move(img.labels));
        }
        for (const auto& entry : fs::directory_iterator(pred_dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
            if (!gt_stems.count(entry.path().stem().string()))
                warn_or_fail("video " + video_id + ": ignoring extra prediction frame " +
                             entry.path().filename().string());
        }
    }

    // Object ids must line up with the ground truth; anything else means the
    // prediction was produced for different data.
    std::array<bool, 256> known_id{};
    for (int id : gt.object_ids()) known_id[std::size_t(id)] = true;
    for (int t = 1; t <= frame_count; ++t) {
        if (!pred_frames[std::size_t(t) - 1]) continue;
        for (std::uint8_t v : *pred_frames[std::size_t(t) - 1]) {
            if (v != 0 && !known_id[v])
                throw data_error("video " + video_id + " frame " +
                                 gt.frame_names()[std::size_t(t) - 1] +
                                 ": prediction object id " + std::to_string(int(v)) +
                                 " not present in ground truth");
        }
    }

    if (gt.object_ids().empty()) {
        result.warnings.push_back("video " + video_id + ": no objects in ground truth");
        return result;
    }

    for (int object_id : gt.object_ids()) {
        std::vector<bool> presence(std::size_t(frame_count), false);
        for (int t = 1; t <= frame_count; ++t)
            presence[std::size_t(t) - 1] = gt.object_area(t, object_id) > 0;
        const PresenceTimeline timeline = timeline_segments(presence, object_id);

        std::vector<FrameScore> scores;
        scores.reserve(std::size_t(frame_count));
        for (int t = 1; t <= frame_count; ++t) {
            const Mask gt_mask = gt.mask(t, object_id);
            const Mask pred_mask = mask_from_labels(gt.width(), gt.height(),
                                                    pred_frames[std::size_t(t) - 1].get(),
                                                    object_id);
            scores.push_back(frame_score(gt_mask, pred_mask, config.metrics));
        }

        SequenceReport report = aggregate(video_id, object_id, std::move(scores), eval_frames);
        report.jf_d = disappearance_score(report.per_frame, timeline);
        report.jf_r = reappearance_score(report.per_frame, timeline, config.reappearance_window);
        result.sequences.push_back(std::move(report));
    }
    return result;
}

struct Averager {
    double sum = 0;
    double weight = 0;
    void add(double value, double w) {
        sum += value * w;
        weight += w;
    }
    std::optional<double> mean() const {
        if (weight == 0) return std::nullopt;
        return sum / weight;
    }
};

struct ColumnAccs {
    Averager jf_dot, j, f_dot, jf_d, jf_r, f, jf;

    void add(const SequenceReport& s, double w) {
        jf_dot.add(s.jf_dot, w);
        j.add(s.j_mean, w);
        f_dot.add(s.f_dot_mean, w);
        if (s.jf_d) jf_d.add(*s.jf_d, w);
        if (s.jf_r) jf_r.add(*s.jf_r, w);
        f.add(s.f_mean, w);
        jf.add(s.jf, w);
    }
};

DatasetMeans means_of(const ColumnAccs& acc) {
    DatasetMeans means;
    means.jf_dot = acc.jf_dot.mean().value_or(0.0);
    means.j = acc.j.mean().value_or(0.0);
    means.f_dot = acc.f_dot.mean().value_or(0.0);
    means.jf_d = acc.jf_d.mean();
    means.jf_r = acc.jf_r.mean();
    means.f = acc.f.mean().value_or(0.0);
    means.jf = acc.jf.mean().value_or(0.0);
    return means;
}

DatasetMeans compute_means(const std::vector<SequenceReport>& sequences,
                           const EvalConfig& config) {
    auto seq_weight = [&](const SequenceReport& s) {
        return config.frame_weighted ? double(s.eval_frame_count) : 1.0;
    };

    if (!config.per_video_first) {
        ColumnAccs acc;
        for (const SequenceReport& s : sequences) acc.add(s, seq_weight(s));
        return means_of(acc);
    }

    // Objects averaged within each video first, then videos equally.
    ColumnAccs dataset;
    std::size_t i = 0;
    while (i < sequences.size()) {
        std::size_t j = i;
        ColumnAccs video;
        while (j < sequences.size() && sequences[j].video_id == sequences[i].video_id) {
            video.add(sequences[j], seq_weight(sequences[j]));
            ++j;
        }
        const DatasetMeans v = means_of(video);
        dataset.jf_dot.add(v.jf_dot, 1.0);
        dataset.j.add(v.j, 1.0);
        dataset.f_dot.add(v.f_dot, 1.0);
        if (v.jf_d) dataset.jf_d.add(*v.jf_d, 1.0);
        if (v.jf_r) dataset.jf_r.add(*v.jf_r, 1.0);
        dataset.f.add(v.f, 1.0);
        dataset.jf.add(v.jf, 1.0);
        i = j;
    }
    return means_of(dataset);
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

std::string threshold_label(double threshold) {
    if (threshold == 0) return "0 (all w/ C)";
    if (threshold == 1) return "1 (w/o C)";
    return format_double(threshold);
}

ordered_json config_json(const EvalConfig& config) {
    ordered_json doc;
    doc["gt_root"] = config.gt_root.string();
    doc["pred_root"] = config.pred_root.string();
    doc["frames_root"] =
        config.frames_root ? ordered_json(config.frames_root->string()) : ordered_json(nullptr);
    doc["alpha"] = config.metrics.alpha;
    doc["cap"] = config.metrics.cap;            // 0 = fixed_radius(H, W)
    doc["f_radius"] = config.metrics.f_radius;  // 0 = fixed_radius(H, W)
    doc["bins"] = {config.bins.h, config.bins.s, config.bins.v};
    doc["threshold"] = config.threshold;
    doc["anchor_mode"] = config.anchor_mode == AnchorMode::previous ? "previous" : "anchored";
    doc["eval_frames"] = config.eval_frames == EvalFramePolicy::skip_first ? "skip-first" : "all";
    doc["reappearance_window"] = config.reappearance_window
                                     ? ordered_json(*config.reappearance_window)
                                     : ordered_json(nullptr);
    doc["strict"] = config.strict;
    doc["per_video_first"] = config.per_video_first;
    doc["frame_weighted"] = config.frame_weighted;
    doc["adaptive_radius_note"] =
        "F_dot tolerance r = clamp(round(alpha*sqrt(gt_area)), 1, cap) is an approximation; "
        "the official definition lives in the dataset toolkit";
    return doc;
}

ordered_json means_json(const DatasetMeans& means) {
    ordered_json doc;
    doc["JF_dot"] = means.jf_dot;
    doc["J"] = means.j;
    doc["F_dot"] = means.f_dot;
    doc["JFd"] = means.jf_d ? ordered_json(*means.jf_d) : ordered_json(nullptr);
    doc["JFr"] = means.jf_r ? ordered_json(*means.jf_r) : ordered_json(nullptr);
    doc["F"] = means.f;
    doc["JF"] = means.jf;
    return doc;
}

constexpr const char* kCsvHeader = "name,JF_dot,J,F_dot,JFd,JFr,F,JF";

std::string csv_row(const std::string& name, double jf_dot, double j, double f_dot,
                    const std::optional<double>& jf_d, const std::optional<double>& jf_r,
                    double f, double jf) {
    std::string row = name;
    for (const auto& cell :
         {format_score_cell(jf_dot), format_score_cell(j), format_score_cell(f_dot),
          format_score_cell(jf_d), format_score_cell(jf_r), format_score_cell(f),
          format_score_cell(jf)})
        row += "," + cell;
    return row + "\n";
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VOSKIT_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

DatasetReport run_evaluation(const EvalConfig& config) {
    if (config.metrics.alpha <= 0) throw std::invalid_argument("evaluation: alpha must be > 0");
    if (config.threshold < 0 || config.threshold > 1)
        throw std::invalid_argument("evaluation: threshold must be in [0, 1]");
    if (!fs::is_directory(config.gt_root))
        throw data_error("ground-truth root not found: " + config.gt_root.string());
    if (!fs::is_directory(config.pred_root))
        throw data_error("prediction root not found: " + config.pred_root.string());

    const std::vector<std::string> videos = sorted_subdirs(config.gt_root);
    if (videos.empty()) throw data_error("no videos found in: " + config.gt_root.string());
    for (const std::string& name : sorted_subdirs(config.pred_root)) {
        if (!std::binary_search(videos.begin(), videos.end(), name))
            throw data_error("prediction contains unknown video: " + name);
    }

    // Each worker owns whole videos; slot-indexed results keep the reduction
    // order independent of scheduling.
    std::vector<VideoResult> results(videos.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= videos.size()) return;
            try {
                results[i] = evaluate_video(config, videos[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(videos.size());
                return;
            }
        }
    };

    const int workers =
        std::max(1, std::min(resolve_workers(config.workers), int(videos.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    DatasetReport report;
    report.config = config;
    for (VideoResult& r : results) {
        std::move(r.sequences.begin(), r.sequences.end(), std::back_inserter(report.sequences));
        std::move(r.warnings.begin(), r.warnings.end(), std::back_inserter(report.warnings));
    }
    if (report.sequences.empty())
        throw data_error("no objects found under: " + config.gt_root.string());
    report.means = compute_means(report.sequences, config);
    return report;
}

std::vector<AblationRow> run_ablation_grid(const EvalConfig& config,
                                           const std::vector<int>& grounding_grid,
                                           const std::vector<double>& threshold_grid) {
    if (grounding_grid.empty() && threshold_grid.empty())
        throw std::invalid_argument("ablation: grid is empty");
    for (int nl : grounding_grid)
        if (nl < 2) throw std::invalid_argument("ablation: memory size must be >= 2");
    for (double t : threshold_grid)
        if (t < 0 || t > 1) throw std::invalid_argument("ablation: threshold must be in [0, 1]");

    struct Point {
        std::optional<int> nl;
        std::optional<double> threshold;
        std::string label;
    };
    std::vector<Point> points;
    if (!grounding_grid.empty() && !threshold_grid.empty()) {
        for (int nl : grounding_grid)
            for (double t : threshold_grid)
                points.push_back({nl, t,
                                  "Nl=" + std::to_string(nl) + " thr=" + threshold_label(t)});
    } else if (!grounding_grid.empty()) {
        for (int nl : grounding_grid) points.push_back({nl, std::nullopt, std::to_string(nl)});
    } else {
        for (double t : threshold_grid) points.push_back({std::nullopt, t, threshold_label(t)});
    }

    std::vector<AblationRow> rows;
    for (const Point& point : points) {
        EvalConfig point_config = config;
        if (point.threshold) point_config.threshold = *point.threshold;

        AblationRow row;
        row.label = point.label;
        row.grounding_capacity = point.nl;
        row.threshold = point.threshold;
        row.report = run_evaluation(point_config);

        if (config.frames_root) {
            int activations = 0, evictions = 0;
            for (const std::string& video : sorted_subdirs(config.gt_root)) {
                const fs::path frames_dir = *config.frames_root / video;
                if (!fs::is_directory(frames_dir)) {
                    row.report.warnings.push_back("video " + video +
                                                  ": no frames directory; gate stats skipped");
                    continue;
                }
                const GateTrace trace = gate_trace_from_dir(
                    frames_dir, point_config.threshold, config.anchor_mode, config.bins);
                const MemoryTrace mem = simulate(
                    trace.frame_count(), point.nl.value_or(kDefaultGroundingCapacity),
                    kDefaultConceptCapacity, trace);
                for (const GateEntry& e : trace.entries) activations += e.active ? 1 : 0;
                for (const MemorySnapshot& s : mem.snapshots) evictions += s.evicted ? 1 : 0;
            }
            row.gate_activations = activations;
            row.concept_evictions = evictions;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_score_cell(const std::optional<double>& score) {
    if (!score) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *score * 100.0);
    return buf;
}

std::string report_to_json(const DatasetReport& report) {
    ordered_json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["config"] = config_json(report.config);
    ordered_json dataset = means_json(report.means);
    dataset["sequences"] = report.sequences.size();
    doc["dataset"] = std::move(dataset);

    ordered_json sequences = ordered_json::array();
    for (const SequenceReport& s : report.sequences) {
        ordered_json seq;
        seq["name"] = s.video_id + "_" + std::to_string(s.object_id);
        seq["video"] = s.video_id;
        seq["object"] = s.object_id;
        seq["eval_frames"] = s.eval_frame_count;
        seq["JF_dot"] = s.jf_dot;
        seq["J"] = s.j_mean;
        seq["F_dot"] = s.f_dot_mean;
        seq["JFd"] = s.jf_d ? ordered_json(*s.jf_d) : ordered_json(nullptr);
        seq["JFr"] = s.jf_r ? ordered_json(*s.jf_r) : ordered_json(nullptr);
        seq["F"] = s.f_mean;
        seq["JF"] = s.jf;
        ordered_json frames = ordered_json::array();
        for (std::size_t t = 0; t < s.per_frame.size(); ++t) {
            frames.push_back(ordered_json{{"t", t + 1},
                                          {"J", s.per_frame[t].j},
                                          {"F", s.per_frame[t].f},
                                          {"F_dot", s.per_frame[t].f_dot}});
        }
        seq["frames"] = std::move(frames);
        sequences.push_back(std::move(seq));
    }
    doc["sequences"] = std::move(sequences);
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const DatasetReport& report) {
    std::string csv = std::string(kCsvHeader) + "\n";
    for (const SequenceReport& s : report.sequences) {
        csv += csv_row(s.video_id + "_" + std::to_string(s.object_id), s.jf_dot, s.j_mean,
                       s.f_dot_mean, s.jf_d, s.jf_r, s.f_mean, s.jf);
    }
    const DatasetMeans& m = report.means;
    csv += csv_row("overall", m.jf_dot, m.j, m.f_dot, m.jf_d, m.jf_r, m.f, m.jf);
    return csv;
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
    std::string csv = std::string(kCsvHeader) + "\n";
    for (const AblationRow& row : rows) {
        const DatasetMeans& m = row.report.means;
        csv += csv_row(row.label, m.jf_dot, m.j, m.f_dot, m.jf_d, m.jf_r, m.f, m.jf);
    }
    return csv;
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
    ordered_json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    if (!rows.empty()) doc["config"] = config_json(rows.front().report.config);
    ordered_json out_rows = ordered_json::array();
    for (const AblationRow& row : rows) {
        ordered_json r;
        r["name"] = row.label;
        r["memory_size"] = row.grounding_capacity ? ordered_json(*row.grounding_capacity)
                                                  : ordered_json(nullptr);
        r["threshold"] = row.threshold ? ordered_json(*row.threshold) : ordered_json(nullptr);
        r["gate_activations"] = row.gate_activations ? ordered_json(*row.gate_activations)
                                                     : ordered_json(nullptr);
        r["concept_evictions"] = row.concept_evictions ? ordered_json(*row.concept_evictions)
                                                       : ordered_json(nullptr);
        r["dataset"] = means_json(row.report.means);
        r["warnings"] = row.report.warnings;
        out_rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(out_rows);
    return doc.dump(2) + "\n";
}

DatasetMeans recompute_means(const DatasetReport& report) {
    return compute_means(report.sequences, report.config);
}

void write_text_file(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + file.string());
    out << content;
    if (!out) throw data_error("write failed: " + file.string());
}

}  // namespace voskit
