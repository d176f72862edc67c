#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "voskit/mask.hpp"

namespace voskit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense C×h×w query features, stored as an (h*w) × C token matrix with
/// row index y*w + x. h and w are feature-scale dimensions (1/16 of the
/// declared image size in the full pipeline). All values must be finite.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int channels, int height, int width);  // zero-initialized
    static FeatureMap from_tokens(int channels, int height, int width, Matrix tokens);

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }

    const Matrix& tokens() const { return tokens_; }
    double at(int c, int y, int x) const { return tokens_(std::size_t(y) * width_ + x, c); }

    bool same_shape(const FeatureMap& other) const {
        return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
    }

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    Matrix tokens_;  // (h*w) x C
};

/// Pixel-level memory: one (h*w) × C token matrix per remembered frame.
struct PixelMemory {
    std::vector<Matrix> entries;
};

/// Object-level memory: one C-vector per remembered frame, as rows.
struct ObjectMemory {
    Matrix entries;  // N_l x C
};

/// Stand-in for the semantic token that summarizes the target across the
/// concept memory frames.
struct ConceptToken {
    Vector values;  // length C
};

struct EnhancedFeatures {
    FeatureMap grounding;
    std::optional<FeatureMap> concept_enhanced;
    FeatureMap fused;  // equals grounding when concept_enhanced is absent
};

/// Deterministic uniform stream derived from mt19937_64 with an explicit
/// 53-bit mapping, so generated weights are identical on every platform.
class SeededUniform {
public:
    explicit SeededUniform(std::uint64_t seed) : state_(seed) {}

    /// Next value in [0, 1).
    double next();
    /// Next value in [-scale, scale).
    double next_signed(double scale) { return (2.0 * next() - 1.0) * scale; }

    /// C×C matrix filled row-major with values in [-1/sqrt(C), 1/sqrt(C)).
    Matrix projection(int channels);

private:
    std::mt19937_64 state_;
};

/// Query/key projections of one self-attention + cross-attention block.
/// Values are passed through unprojected, which keeps convex-combination
/// identities of the reference exact (a single key returns its value row;
/// constant memory contributes exactly its constant).
struct BlockWeights {
    Matrix self_q, self_k;
    Matrix cross_q, cross_k;
};

/// All projection weights of the enhancement stack, generated from one seed
/// in a documented order: for each grounding layer, self_q, self_k, cross_q,
/// cross_k; then the same four for the concept block. Entries are drawn
/// row-major from SeededUniform.
class EnhancerWeights {
public:
    EnhancerWeights(int channels, int grounding_layers, std::uint64_t seed);

    int channels() const { return channels_; }
    int grounding_layers() const { return int(grounding_.size()); }
    const BlockWeights& grounding_layer(int i) const { return grounding_.at(i); }
    const BlockWeights& concept_block() const { return concept_; }

private:
    int channels_ = 0;
    std::vector<BlockWeights> grounding_;
    BlockWeights concept_;
};

/// Row-stochastic attention weights softmax(Q Kᵀ / sqrt(d)). Throws
/// std::invalid_argument on dimension mismatch or non-finite inputs.
Matrix attention_weights(const Matrix& q, const Matrix& k);

/// Scaled dot-product attention softmax(Q Kᵀ / sqrt(d)) V.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v);

/// Row-sum diagnostics of the softmax weights of one enhancement layer.
struct LayerDiagnostics {
    double self_row_sum_min = 0, self_row_sum_max = 0;
    double cross_row_sum_min = 0, cross_row_sum_max = 0;
};

/// Grounding-memory enhancement: per layer, x += SelfAttn(x) then
/// x += CrossAttn(x, M) where M is the flattened pixel memory concatenated
/// with the object memory. Shape-preserving; memory tokens carry no
/// positional encoding, so the result is invariant to permuting the memory
/// entries.
FeatureMap enhance_grounding(const FeatureMap& features, const PixelMemory& pixel_memory,
                             const ObjectMemory& object_memory, const EnhancerWeights& weights,
                             std::vector<LayerDiagnostics>* diagnostics = nullptr);

/// Mean of feature vectors at mask-covered positions across all memory
/// frames. Masks are at feature resolution (h×w). Throws
/// std::invalid_argument when every mask is empty.
ConceptToken concept_vector_stub(const std::vector<std::pair<FeatureMap, Mask>>& frames);

/// Concept enhancement stub: x = SelfAttn(f), then x += CrossAttn(x, token).
/// With the single key, every cross-attention increment equals the token.
FeatureMap enhance_concept(const FeatureMap& features, const ConceptToken& token,
                           const EnhancerWeights& weights,
                           LayerDiagnostics* diagnostics = nullptr);

/// Gated mean fusion: active -> elementwise (g + c) / 2; inactive -> g
/// unchanged (bit-exact). Throws std::invalid_argument when active without c.
FeatureMap fuse(const FeatureMap& grounding, const std::optional<FeatureMap>& concept_enhanced,
                bool active);

/// Runs the full per-frame enhancement: grounding always, concept only when
/// the gate is active, fused per `fuse`.
EnhancedFeatures enhance_frame(const FeatureMap& features, const PixelMemory& pixel_memory,
                               const ObjectMemory& object_memory,
                               const std::optional<ConceptToken>& token, bool gate_active,
                               const EnhancerWeights& weights,
                               std::vector<LayerDiagnostics>* diagnostics = nullptr);

}  // namespace voskit
