#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lrc/core.hpp"

namespace lrc {

struct StackConfig {
    int layers = 2;
    int heads = 2;
    int model_dim = 16;  // must be divisible by heads
    std::uint64_t seed = 0;
};

/// Per-head attention probabilities for one layer, heads x count x count,
/// row-major within a head. Every row is a softmax output, so it sums to 1.
struct AttnMap {
    int heads = 0;
    std::size_t count = 0;
    std::vector<double> probs;

    double at(int head, std::size_t row, std::size_t col) const {
        return probs[(static_cast<std::size_t>(head) * count + row) * count + col];
    }
};

/// Forward-only multi-head self-attention stack with fixed seeded weights.
/// No positional encoding, so the forward pass is exactly permutation
/// equivariant; attention maps are what downstream pruning consumes.
class AttnStack {
public:
    struct LayerWeights {
        std::vector<double> wq, wk, wv, wo;  // each model_dim x model_dim, row-major
    };

    static AttnStack make(const StackConfig& cfg) {
        if (cfg.layers < 1 || cfg.heads < 1 || cfg.model_dim < 1) {
            throw std::invalid_argument("AttnStack: layers, heads, model_dim must be positive");
        }
        if (cfg.model_dim % cfg.heads != 0) {
            throw std::invalid_argument("AttnStack: model_dim not divisible by heads");
        }
        AttnStack stack;
        stack.cfg_ = cfg;
        stack.weights_.resize(cfg.layers);
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.model_dim));
        const SeedSpec base{cfg.seed, {}};
        for (int l = 0; l < cfg.layers; ++l) {
            LayerWeights& w = stack.weights_[l];
            const char* names[4] = {"wq", "wk", "wv", "wo"};
            std::vector<double>* mats[4] = {&w.wq, &w.wk, &w.wv, &w.wo};
            for (int m = 0; m < 4; ++m) {
                Rng rng(base.with("layer", l).with(names[m], 0));
                mats[m]->resize(static_cast<std::size_t>(cfg.model_dim) * cfg.model_dim);
                for (double& v : *mats[m]) v = rng.next_gaussian() * scale;
            }
        }
        return stack;
    }

    int layers() const { return cfg_.layers; }
    int heads() const { return cfg_.heads; }
    int model_dim() const { return cfg_.model_dim; }
    const LayerWeights& layer(int l) const { return weights_.at(l); }

private:
    StackConfig cfg_;
    std::vector<LayerWeights> weights_;
};

struct ForwardResult {
    TokenSeq tokens;
    AttnMap attn;
};

namespace detail {

// C = X * W where X is n x d and W is d x d, row-major.
inline std::vector<double> matmul_square(const std::vector<double>& x, std::size_t n,
                                         const std::vector<double>& w, std::size_t d) {
    std::vector<double> out(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.data() + i * d;
        double* oi = out.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) {
            const double xv = xi[k];
            const double* wk = w.data() + k * d;
            for (std::size_t j = 0; j < d; ++j) oi[j] += xv * wk[j];
        }
    }
    return out;
}

}  // namespace detail

/// One layer of scaled dot-product attention with a residual connection.
/// Returns the updated tokens and the per-head attention map.
inline ForwardResult forward_layer(const AttnStack& stack, int layer, const TokenSeq& tokens) {
    if (layer < 0 || layer >= stack.layers()) {
        throw std::invalid_argument("forward_layer: layer index out of range");
    }
    const std::size_t d = static_cast<std::size_t>(stack.model_dim());
    if (tokens.dim != d) {
        throw std::invalid_argument("forward_layer: token dim does not match stack");
    }
    const std::size_t n = tokens.count();
    const int heads = stack.heads();
    const std::size_t dh = d / heads;
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
    const AttnStack::LayerWeights& w = stack.layer(layer);

    const std::vector<double> q = detail::matmul_square(tokens.features, n, w.wq, d);
    const std::vector<double> k = detail::matmul_square(tokens.features, n, w.wk, d);
    const std::vector<double> v = detail::matmul_square(tokens.features, n, w.wv, d);

    AttnMap attn;
    attn.heads = heads;
    attn.count = n;
    attn.probs.assign(static_cast<std::size_t>(heads) * n * n, 0.0);

    std::vector<double> mixed(n * d, 0.0);  // per-head attention output, concatenated
    std::vector<double> row(n);
    for (int h = 0; h < heads; ++h) {
        const std::size_t off = h * dh;
        double* head_probs = attn.probs.data() + static_cast<std::size_t>(h) * n * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double* qi = q.data() + i * d + off;
            double max_score = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                const double* kj = k.data() + j * d + off;
                double s = 0.0;
                for (std::size_t t = 0; t < dh; ++t) s += qi[t] * kj[t];
                s *= inv_sqrt_dh;
                row[j] = s;
                if (s > max_score) max_score = s;
            }
            double denom = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = std::exp(row[j] - max_score);
                denom += row[j];
            }
            double* pi = head_probs + i * n;
            double* mi = mixed.data() + i * d + off;
            for (std::size_t j = 0; j < n; ++j) {
                const double p = row[j] / denom;
                pi[j] = p;
                const double* vj = v.data() + j * d + off;
                for (std::size_t t = 0; t < dh; ++t) mi[t] += p * vj[t];
            }
        }
    }

    ForwardResult out;
    out.tokens = tokens;
    std::vector<double> projected = detail::matmul_square(mixed, n, w.wo, d);
    for (std::size_t i = 0; i < n * d; ++i) out.tokens.features[i] += projected[i];
    out.attn = std::move(attn);
    return out;
}

/// Composite training loss: base + lambda1 * task + lambda2 * sum(spec).
struct LossTerms {
    double base = 0.0;
    double task = 0.0;
    std::vector<double> spec;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

struct LossGradients {
    double d_base = 1.0;
    double d_task = 0.0;
    std::vector<double> d_spec;
};

inline void validate_finite(const LossTerms& terms) {
    bool ok = std::isfinite(terms.base) && std::isfinite(terms.task) &&
              std::isfinite(terms.lambda1) && std::isfinite(terms.lambda2);
    for (double s : terms.spec) ok = ok && std::isfinite(s);
    if (!ok) throw std::invalid_argument("LossTerms: non-finite input");
}

inline double compose_total_loss(const LossTerms& terms) {
    validate_finite(terms);
    double spec_sum = 0.0;
    for (double s : terms.spec) spec_sum += s;
    return terms.base + terms.lambda1 * terms.task + terms.lambda2 * spec_sum;
}

/// Analytic partials of compose_total_loss with respect to each term.
inline LossGradients loss_gradients(const LossTerms& terms) {
    validate_finite(terms);
    LossGradients g;
    g.d_base = 1.0;
    g.d_task = terms.lambda1;
    g.d_spec.assign(terms.spec.size(), terms.lambda2);
    return g;
}

}  // namespace lrc
