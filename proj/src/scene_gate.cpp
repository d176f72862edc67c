#include "voskit/scene_gate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "voskit/errors.hpp"

namespace voskit {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Hsv {
    double h;  // [0, 360)
    double s;  // [0, 1]
    double v;  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double delta = maxc - minc;

    Hsv out{0.0, 0.0, maxc};
    if (maxc > 0) out.s = delta / maxc;
    if (delta > 0) {
        double h;
        if (maxc == r)
            h = std::fmod((g - b) / delta, 6.0);
        else if (maxc == g)
            h = (b - r) / delta + 2.0;
        else
            h = (r - g) / delta + 4.0;
        h *= 60.0;
        if (h < 0) h += 360.0;
        out.h = h < 360.0 ? h : 0.0;
    }
    return out;
}

int bin_of(double value, double range, int bins) {
    return std::min(bins - 1, int(value / range * bins));
}

std::string anchor_mode_name(AnchorMode mode) {
    return mode == AnchorMode::previous ? "previous" : "anchored";
}

AnchorMode anchor_mode_from_name(const std::string& name) {
    if (name == "previous") return AnchorMode::previous;
    if (name == "anchored") return AnchorMode::anchored;
    throw data_error("unknown anchor mode: " + name);
}

}  // namespace

Histogram Histogram::from_weights(HistogramBins bins, std::vector<double> weights) {
    if (bins.h < 1 || bins.s < 1 || bins.v < 1)
        throw std::invalid_argument("Histogram: bin counts must be >= 1");
    if (weights.size() != std::size_t(bins.h) * bins.s * bins.v)
        throw std::invalid_argument("Histogram: weight count does not match bin shape");
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("Histogram: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("Histogram: weights must sum to 1");
    Histogram h;
    h.bins_ = bins;
    h.weights_ = std::move(weights);
    return h;
}

Histogram hsv_histogram(const RgbImage& frame, HistogramBins bins) {
    if (frame.width < 1 || frame.height < 1)
        throw std::invalid_argument("hsv_histogram: zero-pixel image");
    if (bins.h < 1 || bins.s < 1 || bins.v < 1)
        throw std::invalid_argument("hsv_histogram: bin counts must be >= 1");

    std::vector<double> weights(std::size_t(bins.h) * bins.s * bins.v, 0.0);
    const std::size_t pixels = std::size_t(frame.width) * frame.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        const Hsv hsv = rgb_to_hsv(frame.rgb[3 * i], frame.rgb[3 * i + 1], frame.rgb[3 * i + 2]);
        const int hb = bin_of(hsv.h, 360.0, bins.h);
        const int sb = bin_of(hsv.s, 1.0, bins.s);
        const int vb = bin_of(hsv.v, 1.0, bins.v);
        weights[(std::size_t(hb) * bins.s + sb) * bins.v + vb] += 1.0;
    }
    const double inv = 1.0 / double(pixels);
    for (double& w : weights) w *= inv;
    return Histogram::from_weights(bins, std::move(weights));
}

double bhattacharyya(const Histogram& p, const Histogram& q) {
    if (!(p.bins() == q.bins()))
        throw std::invalid_argument("bhattacharyya: histogram bin shapes differ");
    double coeff = 0;
    const auto& pw = p.weights();
    const auto& qw = q.weights();
    for (std::size_t i = 0; i < pw.size(); ++i) coeff += std::sqrt(pw[i] * qw[i]);
    const double d = std::sqrt(std::max(0.0, 1.0 - coeff));
    return std::clamp(d, 0.0, 1.0);
}

bool gate_decision(double distance, double threshold) {
    if (threshold < 0 || threshold > 1)
        throw std::invalid_argument("gate_decision: threshold must be in [0, 1]");
    if (threshold == 0) return true;   // concept on all frames
    if (threshold == 1) return false;  // concept never considered
    return distance >= threshold;
}

GateTrace gate_trace(const std::vector<RgbImage>& frames, double threshold, AnchorMode mode,
                     HistogramBins bins) {
    if (frames.empty()) throw std::invalid_argument("gate_trace: needs at least one frame");
    if (threshold < 0 || threshold > 1)
        throw std::invalid_argument("gate_trace: threshold must be in [0, 1]");

    std::vector<Histogram> histograms;
    histograms.reserve(frames.size());
    for (const RgbImage& frame : frames) histograms.push_back(hsv_histogram(frame, bins));

    GateTrace trace;
    trace.threshold = threshold;
    trace.anchor_mode = mode;
    trace.entries.push_back({1, 0.0, false, 1});  // frame 1's mask is given

    int anchor = 1;
    for (int t = 2; t <= int(frames.size()); ++t) {
        const int reference = mode == AnchorMode::previous ? t - 1 : anchor;
        const double distance =
            bhattacharyya(histograms[std::size_t(t) - 1], histograms[std::size_t(reference) - 1]);
        const bool active = gate_decision(distance, threshold);
        trace.entries.push_back({t, distance, active, reference});
        if (active) anchor = t;
    }
    return trace;
}

GateTrace gate_trace_from_dir(const std::filesystem::path& dir, double threshold, AnchorMode mode,
                              HistogramBins bins) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw data_error("frames directory not found: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == ".jpg" || ext == ".jpeg" || ext == ".png") files.push_back(entry.path());
    }
    if (files.empty()) throw data_error("no frames in: " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<RgbImage> frames;
    frames.reserve(files.size());
    for (const auto& file : files) frames.push_back(read_color_image(file));
    return gate_trace(frames, threshold, mode, bins);
}

std::string gate_trace_to_json(const GateTrace& trace) {
    ordered_json doc;
    doc["threshold"] = trace.threshold;
    doc["anchor_mode"] = anchor_mode_name(trace.anchor_mode);
    ordered_json frames = ordered_json::array();
    for (const GateEntry& e : trace.entries) {
        frames.push_back(ordered_json{
            {"t", e.t}, {"distance", e.distance}, {"active", e.active}, {"anchor", e.anchor}});
    }
    doc["frames"] = std::move(frames);
    return doc.dump(2) + "\n";
}

GateTrace gate_trace_from_json(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("invalid gate trace JSON: ") + e.what());
    }
    try {
        GateTrace trace;
        trace.threshold = doc.at("threshold").get<double>();
        trace.anchor_mode = anchor_mode_from_name(doc.at("anchor_mode").get<std::string>());
        for (const auto& item : doc.at("frames")) {
            trace.entries.push_back({item.at("t").get<int>(), item.at("distance").get<double>(),
                                     item.at("active").get<bool>(), item.at("anchor").get<int>()});
        }
        for (std::size_t i = 0; i < trace.entries.size(); ++i) {
            if (trace.entries[i].t != int(i) + 1)
                throw data_error("gate trace frames must be contiguous from 1");
        }
        return trace;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("invalid gate trace JSON: ") + e.what());
    }
}

GateTrace load_gate_trace(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw data_error("cannot open gate trace: " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return gate_trace_from_json(text);
}

}  // namespace voskit
