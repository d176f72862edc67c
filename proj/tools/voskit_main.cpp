// voskit command-line tool: dataset evaluation, ablation tables, scene-change
// gating, memory-policy simulation, and the attention reference demo.

#include <CLI11.hpp>

#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "voskit/attention.hpp"
#include "voskit/errors.hpp"
#include "voskit/eval.hpp"
#include "voskit/memory_bank.hpp"
#include "voskit/scene_gate.hpp"
#include "voskit/version.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct GateOptions {
    std::string frames;
    double threshold = 0.35;
    std::vector<int> bins{8, 8, 8};
    std::string anchor_mode = "previous";
    std::string out = "trace.json";
};

struct SimulateOptions {
    int frames = 0;
    int nl = voskit::kDefaultGroundingCapacity;
    int nc = voskit::kDefaultConceptCapacity;
    std::string gate;
    std::string push_policy = "on-activation";
    std::string out = "memtrace.json";
};

struct DemoOptions {
    int channels = 8;
    int hw = 4;
    int nl = voskit::kDefaultGroundingCapacity;
    int layers = 4;
    std::uint64_t seed = 7;
    std::string out = "demo.json";
};

struct EvaluateOptions {
    voskit::EvalConfig config;
    std::string gt, pred, frames_root;
    std::string eval_frames = "skip-first";
    std::string anchor_mode = "previous";
    std::vector<int> bins{8, 8, 8};
    int reappearance_window = 0;
    std::string out_json = "report.json";
    std::string out_csv = "report.csv";
    // ablate only:
    std::vector<int> nl_grid;
    std::vector<double> threshold_grid;
};

voskit::AnchorMode parse_anchor_mode(const std::string& name) {
    if (name == "previous") return voskit::AnchorMode::previous;
    if (name == "anchored") return voskit::AnchorMode::anchored;
    throw std::invalid_argument("anchor mode must be 'previous' or 'anchored'");
}

voskit::HistogramBins parse_bins(const std::vector<int>& bins) {
    if (bins.size() != 3) throw std::invalid_argument("--bins expects three values h,s,v");
    return voskit::HistogramBins{bins[0], bins[1], bins[2]};
}

void add_eval_flags(CLI::App* cmd, EvaluateOptions& opt) {
    cmd->add_option("--gt", opt.gt, "Ground-truth annotation root")->required();
    cmd->add_option("--pred", opt.pred, "Prediction root (same layout as --gt)")->required();
    cmd->add_option("--frames-root", opt.frames_root, "Color frame root (gate statistics)");
    cmd->add_option("--alpha", opt.config.metrics.alpha,
                    "Adaptive tolerance scale for F_dot (default 0.1)");
    cmd->add_option("--cap", opt.config.metrics.cap,
                    "Adaptive tolerance upper clamp in pixels (0 = fixed radius of the frame)");
    cmd->add_option("--f-radius", opt.config.metrics.f_radius,
                    "Fixed F tolerance in pixels (0 = 0.008 * image diagonal)");
    cmd->add_option("--bins", opt.bins, "HSV histogram bins h,s,v")->delimiter(',');
    cmd->add_option("--threshold", opt.config.threshold, "Scene-change threshold in [0,1]");
    cmd->add_option("--anchor-mode", opt.anchor_mode, "Gate reference frame: previous|anchored")
        ->check(CLI::IsMember({"previous", "anchored"}));
    cmd->add_option("--eval-frames", opt.eval_frames,
                    "Frames entering the means: skip-first (default) or all")
        ->check(CLI::IsMember({"skip-first", "all"}));
    cmd->add_option("--reappearance-window", opt.reappearance_window,
                    "Only the first N frames of each reappeared segment count (0 = all)");
    cmd->add_flag("--strict", opt.config.strict, "Treat missing predictions as errors");
    cmd->add_flag("--per-video-first", opt.config.per_video_first,
                  "Average objects within each video before the dataset mean");
    cmd->add_flag("--frame-weighted", opt.config.frame_weighted,
                  "Weight sequences by their evaluated frame count");
    cmd->add_option("--workers", opt.config.workers, "Worker threads (0 = auto)")
        ->envname("VOSKIT_WORKERS");
    cmd->add_option("--out-json", opt.out_json, "Full-precision JSON report path");
    cmd->add_option("--out-csv", opt.out_csv, "Summary CSV path");
}

voskit::EvalConfig finish_eval_config(EvaluateOptions& opt) {
    opt.config.gt_root = opt.gt;
    opt.config.pred_root = opt.pred;
    if (!opt.frames_root.empty()) opt.config.frames_root = opt.frames_root;
    opt.config.bins = parse_bins(opt.bins);
    opt.config.anchor_mode = parse_anchor_mode(opt.anchor_mode);
    opt.config.eval_frames = opt.eval_frames == "all" ? voskit::EvalFramePolicy::all
                                                      : voskit::EvalFramePolicy::skip_first;
    if (opt.reappearance_window > 0) opt.config.reappearance_window = opt.reappearance_window;
    return opt.config;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_evaluate(EvaluateOptions& opt) {
    const voskit::EvalConfig config = finish_eval_config(opt);
    const voskit::DatasetReport report = voskit::run_evaluation(config);
    print_warnings(report.warnings);
    voskit::write_text_file(opt.out_json, voskit::report_to_json(report));
    voskit::write_text_file(opt.out_csv, voskit::report_to_csv(report));

    const voskit::DatasetMeans& m = report.means;
    std::cout << "sequences: " << report.sequences.size() << "\n"
              << "JF_dot " << voskit::format_score_cell(m.jf_dot) << "  J "
              << voskit::format_score_cell(m.j) << "  F_dot " << voskit::format_score_cell(m.f_dot)
              << "  JFd " << voskit::format_score_cell(m.jf_d) << "  JFr "
              << voskit::format_score_cell(m.jf_r) << "  F " << voskit::format_score_cell(m.f)
              << "  JF " << voskit::format_score_cell(m.jf) << "\n"
              << "wrote " << opt.out_json << ", " << opt.out_csv << "\n";
    return 0;
}

int run_ablate(EvaluateOptions& opt) {
    const voskit::EvalConfig config = finish_eval_config(opt);
    const auto rows = voskit::run_ablation_grid(config, opt.nl_grid, opt.threshold_grid);
    for (const voskit::AblationRow& row : rows) print_warnings(row.report.warnings);
    voskit::write_text_file(opt.out_csv, voskit::ablation_to_csv(rows));
    voskit::write_text_file(opt.out_json, voskit::ablation_to_json(rows));
    std::cout << voskit::ablation_to_csv(rows) << "wrote " << opt.out_json << ", " << opt.out_csv
              << "\n";
    return 0;
}

int run_gate(const GateOptions& opt) {
    const voskit::GateTrace trace =
        voskit::gate_trace_from_dir(opt.frames, opt.threshold, parse_anchor_mode(opt.anchor_mode),
                                    parse_bins(opt.bins));
    voskit::write_text_file(opt.out, voskit::gate_trace_to_json(trace));
    int activations = 0;
    for (const voskit::GateEntry& e : trace.entries) activations += e.active ? 1 : 0;
    std::cout << "frames: " << trace.frame_count() << ", activations: " << activations
              << ", wrote " << opt.out << "\n";
    return 0;
}

int run_simulate(const SimulateOptions& opt) {
    if (opt.frames < 1) throw std::invalid_argument("--frames must be >= 1");
    const voskit::GateTrace gate = voskit::load_gate_trace(opt.gate);
    const voskit::ConceptPushPolicy policy = opt.push_policy == "every-frame"
                                                 ? voskit::ConceptPushPolicy::every_frame
                                                 : voskit::ConceptPushPolicy::on_activation;
    const voskit::MemoryTrace trace = voskit::simulate(opt.frames, opt.nl, opt.nc, gate, policy);
    voskit::write_text_file(opt.out, voskit::memory_trace_to_jsonl(trace));
    std::cout << "frames: " << opt.frames << ", final concept queue size: "
              << trace.snapshots.back().concept_queue.size() << ", wrote " << opt.out << "\n";
    return 0;
}

ordered_json tensor_json(const voskit::FeatureMap& map) {
    ordered_json channels = ordered_json::array();
    for (int c = 0; c < map.channels(); ++c) {
        ordered_json plane = ordered_json::array();
        for (int y = 0; y < map.height(); ++y) {
            ordered_json row = ordered_json::array();
            for (int x = 0; x < map.width(); ++x) row.push_back(map.at(c, y, x));
            plane.push_back(std::move(row));
        }
        channels.push_back(std::move(plane));
    }
    return channels;
}

int run_demo(const DemoOptions& opt) {
    if (opt.channels < 1 || opt.hw < 1 || opt.nl < 1 || opt.layers < 1)
        throw std::invalid_argument("attention-demo: dimensions must be >= 1");

    const voskit::EnhancerWeights weights(opt.channels, opt.layers, opt.seed);
    // Inputs come from a second stream so changing the layer count never
    // shifts them.
    voskit::SeededUniform inputs(opt.seed + 0x9e3779b97f4a7c15ULL);
    const int spatial = opt.hw * opt.hw;

    auto random_tokens = [&](int rows) {
        voskit::Matrix m(rows, opt.channels);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < opt.channels; ++c) m(r, c) = inputs.next_signed(1.0);
        return m;
    };

    const voskit::FeatureMap f_t =
        voskit::FeatureMap::from_tokens(opt.channels, opt.hw, opt.hw, random_tokens(spatial));
    voskit::PixelMemory pixel_memory;
    for (int i = 0; i < opt.nl; ++i) pixel_memory.entries.push_back(random_tokens(spatial));
    voskit::ObjectMemory object_memory{random_tokens(opt.nl)};

    // Concept token: masked mean over the memory frames with a centered
    // plus-shaped mask.
    voskit::Mask demo_mask(opt.hw, opt.hw);
    const int mid = opt.hw / 2;
    demo_mask.set(mid, mid);
    if (mid > 0) {
        demo_mask.set(mid - 1, mid);
        demo_mask.set(mid, mid - 1);
    }
    std::vector<std::pair<voskit::FeatureMap, voskit::Mask>> concept_frames;
    for (const voskit::Matrix& entry : pixel_memory.entries)
        concept_frames.emplace_back(
            voskit::FeatureMap::from_tokens(opt.channels, opt.hw, opt.hw, entry), demo_mask);
    const voskit::ConceptToken token = voskit::concept_vector_stub(concept_frames);

    std::vector<voskit::LayerDiagnostics> diagnostics;
    const voskit::EnhancedFeatures out = voskit::enhance_frame(
        f_t, pixel_memory, object_memory, token, /*gate_active=*/true, weights, &diagnostics);

    ordered_json doc;
    doc["tool"] = {{"name", voskit::kToolName}, {"version", voskit::kToolVersion}};
    doc["config"] = {{"channels", opt.channels}, {"hw", opt.hw},     {"nl", opt.nl},
                     {"layers", opt.layers},     {"seed", opt.seed}};
    doc["inputs"]["f_t"] = tensor_json(f_t);
    ordered_json memory_entries = ordered_json::array();
    for (const voskit::Matrix& entry : pixel_memory.entries)
        memory_entries.push_back(
            tensor_json(voskit::FeatureMap::from_tokens(opt.channels, opt.hw, opt.hw, entry)));
    doc["inputs"]["pixel_memory"] = std::move(memory_entries);
    ordered_json object_rows = ordered_json::array();
    for (int i = 0; i < opt.nl; ++i) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < opt.channels; ++c) row.push_back(object_memory.entries(i, c));
        object_rows.push_back(std::move(row));
    }
    doc["inputs"]["object_memory"] = std::move(object_rows);
    ordered_json token_values = ordered_json::array();
    for (int c = 0; c < opt.channels; ++c) token_values.push_back(token.values(c));
    doc["inputs"]["concept_token"] = std::move(token_values);

    doc["outputs"]["grounding"] = tensor_json(out.grounding);
    doc["outputs"]["concept"] = tensor_json(*out.concept_enhanced);
    doc["outputs"]["fused"] = tensor_json(out.fused);

    ordered_json layer_diag = ordered_json::array();
    for (const voskit::LayerDiagnostics& d : diagnostics) {
        layer_diag.push_back(ordered_json{{"self_row_sum_min", d.self_row_sum_min},
                                          {"self_row_sum_max", d.self_row_sum_max},
                                          {"cross_row_sum_min", d.cross_row_sum_min},
                                          {"cross_row_sum_max", d.cross_row_sum_max}});
    }
    doc["diagnostics"]["layers"] = std::move(layer_diag);
    voskit::write_text_file(opt.out, doc.dump(2) + "\n");
    std::cout << "wrote " << opt.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Video object segmentation metrics and dual-memory toolkit"};
    app.set_version_flag("--version", std::string(voskit::kToolVersion));
    app.set_config("--config", "", "Key-value configuration file; flags override file values");
    app.require_subcommand(1);

    EvaluateOptions eval_opt;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    add_eval_flags(evaluate, eval_opt);

    EvaluateOptions ablate_opt;
    CLI::App* ablate = app.add_subcommand("ablate", "Run an evaluation per grid point");
    add_eval_flags(ablate, ablate_opt);
    ablate->add_option("--nl-grid", ablate_opt.nl_grid, "Grounding memory sizes, e.g. 7,22")
        ->delimiter(',');
    ablate
        ->add_option("--threshold-grid", ablate_opt.threshold_grid,
                     "Scene-change thresholds, e.g. 0,0.35,0.5,0.7,1")
        ->delimiter(',');

    GateOptions gate_opt;
    CLI::App* gate = app.add_subcommand("gate", "Compute the scene-change gate trace");
    gate->add_option("--frames", gate_opt.frames, "Directory of color frames")->required();
    gate->add_option("--threshold", gate_opt.threshold, "Activation threshold in [0,1]");
    gate->add_option("--bins", gate_opt.bins, "HSV histogram bins h,s,v")->delimiter(',');
    gate->add_option("--anchor-mode", gate_opt.anchor_mode, "previous|anchored")
        ->check(CLI::IsMember({"previous", "anchored"}));
    gate->add_option("--out", gate_opt.out, "Output trace JSON path");

    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Replay both memory policies");
    simulate->add_option("--frames", sim_opt.frames, "Total frame count T")->required();
    simulate->add_option("--nl", sim_opt.nl, "Grounding memory capacity");
    simulate->add_option("--nc", sim_opt.nc, "Concept FIFO capacity");
    simulate->add_option("--gate", sim_opt.gate, "Gate trace JSON from the gate subcommand")
        ->required();
    simulate->add_option("--push-policy", sim_opt.push_policy, "on-activation|every-frame")
        ->check(CLI::IsMember({"on-activation", "every-frame"}));
    simulate->add_option("--out", sim_opt.out, "Output JSON-lines path");

    DemoOptions demo_opt;
    CLI::App* demo = app.add_subcommand("attention-demo",
                                        "Run the feature-enhancement reference on seeded inputs");
    demo->add_option("--c", demo_opt.channels, "Channels");
    demo->add_option("--hw", demo_opt.hw, "Feature height/width");
    demo->add_option("--nl", demo_opt.nl, "Memory entries");
    demo->add_option("--layers", demo_opt.layers, "Grounding enhancement layers");
    demo->add_option("--seed", demo_opt.seed, "Weight/input seed");
    demo->add_option("--out", demo_opt.out, "Output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(evaluate)) return run_evaluate(eval_opt);
        if (app.got_subcommand(ablate)) return run_ablate(ablate_opt);
        if (app.got_subcommand(gate)) return run_gate(gate_opt);
        if (app.got_subcommand(simulate)) return run_simulate(sim_opt);
        if (app.got_subcommand(demo)) return run_demo(demo_opt);
    } catch (const voskit::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
