#include "voskit/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace voskit {
namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite values");
}

// Flattened pixel memory (entry-major) with the object memory appended.
Matrix memory_tokens(const PixelMemory& pixel_memory, const ObjectMemory& object_memory,
                     int channels) {
    if (pixel_memory.entries.empty())
        throw std::invalid_argument("enhance_grounding: pixel memory is empty");
    const Eigen::Index spatial = pixel_memory.entries.front().rows();
    for (const Matrix& entry : pixel_memory.entries) {
        if (entry.cols() != channels)
            throw std::invalid_argument("enhance_grounding: memory channel mismatch");
        if (entry.rows() != spatial)
            throw std::invalid_argument("enhance_grounding: pixel memory entries differ in size");
        require_finite(entry, "pixel memory");
    }
    if (object_memory.entries.cols() != channels)
        throw std::invalid_argument("enhance_grounding: memory channel mismatch");
    if (object_memory.entries.rows() != Eigen::Index(pixel_memory.entries.size()))
        throw std::invalid_argument(
            "enhance_grounding: pixel and object memory entry counts differ");
    require_finite(object_memory.entries, "object memory");

    const Eigen::Index entries = Eigen::Index(pixel_memory.entries.size());
    Matrix tokens(entries * spatial + entries, channels);
    for (Eigen::Index i = 0; i < entries; ++i)
        tokens.middleRows(i * spatial, spatial) = pixel_memory.entries[std::size_t(i)];
    tokens.bottomRows(entries) = object_memory.entries;
    return tokens;
}

struct BlockResult {
    double row_sum_min = 0;
    double row_sum_max = 0;
};

// One attention application with query/key projections and raw values.
Matrix attend_projected(const Matrix& x, const Matrix& kv, const Matrix& wq, const Matrix& wk,
                        BlockResult* result) {
    const Matrix weights = attention_weights(x * wq, kv * wk);
    if (result) {
        const Vector sums = weights.rowwise().sum();
        result->row_sum_min = sums.minCoeff();
        result->row_sum_max = sums.maxCoeff();
    }
    return weights * kv;
}

}  // namespace

FeatureMap::FeatureMap(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 1 || height < 1 || width < 1)
        throw std::invalid_argument("FeatureMap: dimensions must be >= 1");
    tokens_ = Matrix::Zero(Eigen::Index(height) * width, channels);
}

FeatureMap FeatureMap::from_tokens(int channels, int height, int width, Matrix tokens) {
    if (channels < 1 || height < 1 || width < 1)
        throw std::invalid_argument("FeatureMap: dimensions must be >= 1");
    if (tokens.rows() != Eigen::Index(height) * width || tokens.cols() != channels)
        throw std::invalid_argument("FeatureMap: token matrix does not match C, h, w");
    require_finite(tokens, "FeatureMap");
    FeatureMap map;
    map.channels_ = channels;
    map.height_ = height;
    map.width_ = width;
    map.tokens_ = std::move(tokens);
    return map;
}

double SeededUniform::next() {
    // 53-bit mantissa mapping; mt19937_64's output sequence is fixed by the
    // standard, so this stream is identical everywhere.
    return double(state_() >> 11) * 0x1.0p-53;
}

Matrix SeededUniform::projection(int channels) {
    const double scale = 1.0 / std::sqrt(double(channels));
    Matrix m(channels, channels);
    for (int r = 0; r < channels; ++r)
        for (int c = 0; c < channels; ++c) m(r, c) = next_signed(scale);
    return m;
}

EnhancerWeights::EnhancerWeights(int channels, int grounding_layers, std::uint64_t seed)
    : channels_(channels) {
    if (channels < 1) throw std::invalid_argument("EnhancerWeights: channels must be >= 1");
    if (grounding_layers < 1)
        throw std::invalid_argument("EnhancerWeights: needs at least one layer");
    SeededUniform rng(seed);
    auto block = [&] {
        BlockWeights b;
        b.self_q = rng.projection(channels);
        b.self_k = rng.projection(channels);
        b.cross_q = rng.projection(channels);
        b.cross_k = rng.projection(channels);
        return b;
    };
    grounding_.reserve(std::size_t(grounding_layers));
    for (int i = 0; i < grounding_layers; ++i) grounding_.push_back(block());
    concept_ = block();
}

Matrix attention_weights(const Matrix& q, const Matrix& k) {
    if (q.cols() != k.cols())
        throw std::invalid_argument("attention: query/key dimension mismatch");
    if (k.rows() < 1) throw std::invalid_argument("attention: needs at least one key");
    if (q.cols() < 1) throw std::invalid_argument("attention: zero-width embeddings");
    require_finite(q, "attention query");
    require_finite(k, "attention key");

    Matrix logits = q * k.transpose() / std::sqrt(double(q.cols()));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double peak = logits.row(r).maxCoeff();
        logits.row(r) = (logits.row(r).array() - peak).exp();
        logits.row(r) /= logits.row(r).sum();
    }
    return logits;
}

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v) {
    if (v.rows() != k.rows()) throw std::invalid_argument("attention: key/value count mismatch");
    require_finite(v, "attention value");
    return attention_weights(q, k) * v;
}

FeatureMap enhance_grounding(const FeatureMap& features, const PixelMemory& pixel_memory,
                             const ObjectMemory& object_memory, const EnhancerWeights& weights,
                             std::vector<LayerDiagnostics>* diagnostics) {
    if (features.channels() != weights.channels())
        throw std::invalid_argument("enhance_grounding: channel mismatch with weights");
    const Matrix memory = memory_tokens(pixel_memory, object_memory, features.channels());

    Matrix x = features.tokens();
    if (diagnostics) diagnostics->clear();
    for (int layer = 0; layer < weights.grounding_layers(); ++layer) {
        const BlockWeights& w = weights.grounding_layer(layer);
        BlockResult self_result, cross_result;
        x += attend_projected(x, x, w.self_q, w.self_k, &self_result);
        x += attend_projected(x, memory, w.cross_q, w.cross_k, &cross_result);
        if (diagnostics)
            diagnostics->push_back({self_result.row_sum_min, self_result.row_sum_max,
                                    cross_result.row_sum_min, cross_result.row_sum_max});
    }
    return FeatureMap::from_tokens(features.channels(), features.height(), features.width(),
                                   std::move(x));
}

ConceptToken concept_vector_stub(const std::vector<std::pair<FeatureMap, Mask>>& frames) {
    if (frames.empty()) throw std::invalid_argument("concept_vector_stub: no frames");
    const int channels = frames.front().first.channels();

    Vector sum = Vector::Zero(channels);
    long count = 0;
    for (const auto& [map, mask] : frames) {
        if (map.channels() != channels)
            throw std::invalid_argument("concept_vector_stub: channel mismatch");
        if (mask.width() != map.width() || mask.height() != map.height())
            throw std::invalid_argument(
                "concept_vector_stub: mask is not at feature resolution");
        for (int y = 0; y < map.height(); ++y) {
            for (int x = 0; x < map.width(); ++x) {
                if (!mask.at(y, x)) continue;
                sum += map.tokens().row(Eigen::Index(y) * map.width() + x).transpose();
                ++count;
            }
        }
    }
    if (count == 0) throw std::invalid_argument("concept_vector_stub: all masks are empty");
    return ConceptToken{sum / double(count)};
}

FeatureMap enhance_concept(const FeatureMap& features, const ConceptToken& token,
                           const EnhancerWeights& weights, LayerDiagnostics* diagnostics) {
    if (features.channels() != weights.channels())
        throw std::invalid_argument("enhance_concept: channel mismatch with weights");
    if (token.values.size() != features.channels())
        throw std::invalid_argument("enhance_concept: token channel mismatch");
    if (!token.values.allFinite())
        throw std::invalid_argument("enhance_concept: non-finite token");

    const BlockWeights& w = weights.concept_block();
    const Matrix token_row = token.values.transpose();

    BlockResult self_result, cross_result;
    Matrix x = attend_projected(features.tokens(), features.tokens(), w.self_q, w.self_k,
                                &self_result);
    x += attend_projected(x, token_row, w.cross_q, w.cross_k, &cross_result);
    if (diagnostics)
        *diagnostics = {self_result.row_sum_min, self_result.row_sum_max,
                        cross_result.row_sum_min, cross_result.row_sum_max};
    return FeatureMap::from_tokens(features.channels(), features.height(), features.width(),
                                   std::move(x));
}

FeatureMap fuse(const FeatureMap& grounding, const std::optional<FeatureMap>& concept_enhanced,
                bool active) {
    if (!active) return grounding;
    if (!concept_enhanced)
        throw std::invalid_argument("fuse: gate active but concept features missing");
    if (!grounding.same_shape(*concept_enhanced))
        throw std::invalid_argument("fuse: feature shapes differ");
    return FeatureMap::from_tokens(grounding.channels(), grounding.height(), grounding.width(),
                                   (grounding.tokens() + concept_enhanced->tokens()) / 2.0);
}

EnhancedFeatures enhance_frame(const FeatureMap& features, const PixelMemory& pixel_memory,
                               const ObjectMemory& object_memory,
                               const std::optional<ConceptToken>& token, bool gate_active,
                               const EnhancerWeights& weights,
                               std::vector<LayerDiagnostics>* diagnostics) {
    if (gate_active && !token)
        throw std::invalid_argument("enhance_frame: gate active but no concept token");

    EnhancedFeatures out;
    out.grounding = enhance_grounding(features, pixel_memory, object_memory, weights, diagnostics);
    if (gate_active) {
        LayerDiagnostics concept_diag;
        out.concept_enhanced =
            enhance_concept(features, *token, weights, diagnostics ? &concept_diag : nullptr);
        if (diagnostics) diagnostics->push_back(concept_diag);
    }
    out.fused = fuse(out.grounding, out.concept_enhanced, gate_active);
    return out;
}

}  // namespace voskit
