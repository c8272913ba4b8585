#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lrc/attention.hpp"
#include "lrc/core.hpp"

namespace lrc {

/// Two-phase in-model token reduction: Bernoulli(p) keep decisions after each
/// early layer, attention-mass top-k retention after each deep layer. Anchor
/// tokens (the task/query tokens) are never dropped and serve as the scoring
/// queries in the deep phase.
struct DropoutConfig {
    double keep_prob = 1.0;       // p, in (0, 1]
    double deep_keep_ratio = 1.0;  // rho, in (0, 1]
    std::vector<int> early_layers;
    std::vector<int> deep_layers;
    std::vector<std::int64_t> anchor_ids;
};

struct SurvivorSet {
    std::vector<std::vector<std::int64_t>> per_layer;  // ids alive after each layer
    std::vector<std::int64_t> final_ids;
};

struct PruneResult {
    TokenSeq tokens;
    std::vector<std::int64_t> kept_ids;
};

/// Keep each non-anchor token independently with probability p, removing the
/// rest. Decisions come from the seed-derived stream in sequence order.
inline PruneResult uniform_prune(const TokenSeq& tokens, double p, const SeedSpec& seed,
                                 std::span<const std::int64_t> anchors = {}) {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("uniform_prune: keep_prob must be in (0, 1]");
    }
    const std::unordered_set<std::int64_t> anchor_set(anchors.begin(), anchors.end());
    Rng rng(seed);
    PruneResult out;
    out.tokens.dim = tokens.dim;
    for (std::size_t i = 0; i < tokens.count(); ++i) {
        const bool anchored = anchor_set.contains(tokens.ids[i]);
        const bool keep = rng.next_bernoulli(p);  // drawn for every token to keep
                                                  // the stream independent of anchors
        if (anchored || keep) {
            out.tokens.push_token(tokens.feature(i), tokens.sizes[i], tokens.ids[i]);
            out.kept_ids.push_back(tokens.ids[i]);
        }
    }
    return out;
}

/// Score every non-query token by the head-averaged attention mass it receives
/// from the query rows, then keep the ceil(ratio * non_query_count) best plus
/// all query tokens. Ties break toward the lower id; order is preserved.
inline PruneResult attention_select(const TokenSeq& tokens, const AttnMap& attn,
                                    std::span<const std::int64_t> query_ids, double keep_ratio) {
    if (!(keep_ratio > 0.0) || keep_ratio > 1.0) {
        throw std::invalid_argument("attention_select: keep_ratio must be in (0, 1]");
    }
    if (query_ids.empty()) {
        throw std::invalid_argument("attention_select: query set must not be empty");
    }
    if (attn.count != tokens.count()) {
        throw std::invalid_argument("attention_select: attention map size mismatch");
    }
    const std::size_t n = tokens.count();
    std::unordered_map<std::int64_t, std::size_t> pos_of;
    pos_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pos_of.emplace(tokens.ids[i], i);

    std::vector<std::size_t> query_rows;
    query_rows.reserve(query_ids.size());
    for (std::int64_t qid : query_ids) {
        auto it = pos_of.find(qid);
        if (it == pos_of.end()) {
            throw std::invalid_argument("attention_select: query id not in sequence");
        }
        query_rows.push_back(it->second);
    }
    std::vector<bool> is_query(n, false);
    for (std::size_t qr : query_rows) is_query[qr] = true;

    // score(j) = (1/H) * sum over heads, over query rows q of attn[h][q][j]
    std::vector<double> score(n, 0.0);
    for (int h = 0; h < attn.heads; ++h) {
        for (std::size_t qr : query_rows) {
            for (std::size_t j = 0; j < n; ++j) score[j] += attn.at(h, qr, j);
        }
    }
    for (double& s : score) s /= attn.heads;

    std::vector<std::size_t> non_query;
    non_query.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_query[j]) non_query.push_back(j);
    }
    const std::size_t keep_count =
        static_cast<std::size_t>(std::ceil(keep_ratio * static_cast<double>(non_query.size())));

    std::vector<std::size_t> order = non_query;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return tokens.ids[a] < tokens.ids[b];
    });
    order.resize(std::min(keep_count, order.size()));

    std::vector<bool> keep(n, false);
    for (std::size_t qr : query_rows) keep[qr] = true;
    for (std::size_t j : order) keep[j] = true;

    PruneResult out;
    out.tokens.dim = tokens.dim;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        out.tokens.push_token(tokens.feature(i), tokens.sizes[i], tokens.ids[i]);
        out.kept_ids.push_back(tokens.ids[i]);
    }
    return out;
}

struct DropoutRunResult {
    TokenSeq tokens;
    SurvivorSet survivors;
};

/// Run the full stack, pruning after each early layer and selecting after each
/// deep layer. Survivor sets shrink monotonically and always contain the
/// anchors.
inline DropoutRunResult run_with_dropout(const AttnStack& stack, const TokenSeq& tokens,
                                         const DropoutConfig& cfg, const SeedSpec& seed) {
    if (!(cfg.keep_prob > 0.0) || cfg.keep_prob > 1.0) {
        throw std::invalid_argument("run_with_dropout: keep_prob must be in (0, 1]");
    }
    if (!(cfg.deep_keep_ratio > 0.0) || cfg.deep_keep_ratio > 1.0) {
        throw std::invalid_argument("run_with_dropout: deep_keep_ratio must be in (0, 1]");
    }
    const std::unordered_set<std::int64_t> early(cfg.early_layers.begin(), cfg.early_layers.end());
    const std::unordered_set<std::int64_t> deep(cfg.deep_layers.begin(), cfg.deep_layers.end());
    for (int l : cfg.early_layers) {
        if (l < 0 || l >= stack.layers()) {
            throw std::invalid_argument("run_with_dropout: early layer index out of range");
        }
        if (deep.contains(l)) {
            throw std::invalid_argument("run_with_dropout: early and deep layers overlap");
        }
    }
    for (int l : cfg.deep_layers) {
        if (l < 0 || l >= stack.layers()) {
            throw std::invalid_argument("run_with_dropout: deep layer index out of range");
        }
    }
    {
        const std::unordered_set<std::int64_t> present(tokens.ids.begin(), tokens.ids.end());
        for (std::int64_t a : cfg.anchor_ids) {
            if (!present.contains(a)) {
                throw std::invalid_argument("run_with_dropout: anchor id not in sequence");
            }
        }
    }

    DropoutRunResult out;
    out.tokens = tokens;
    for (int l = 0; l < stack.layers(); ++l) {
        ForwardResult fwd = forward_layer(stack, l, out.tokens);
        out.tokens = std::move(fwd.tokens);
        if (early.contains(l)) {
            PruneResult pruned =
                uniform_prune(out.tokens, cfg.keep_prob, seed.with("prune_layer", l),
                              cfg.anchor_ids);
            out.tokens = std::move(pruned.tokens);
        } else if (deep.contains(l)) {
            PruneResult selected =
                attention_select(out.tokens, fwd.attn, cfg.anchor_ids, cfg.deep_keep_ratio);
            out.tokens = std::move(selected.tokens);
        }
        out.survivors.per_layer.push_back(out.tokens.ids);
    }
    out.survivors.final_ids = out.tokens.ids;
    return out;
}

}  // namespace lrc
