#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lrc/core.hpp"

namespace lrc {

struct MergeConfig {
    int target_n = 1;         // output token count per segment
    int max_iterations = 32;  // ceil(log2(M/N)) steps suffice; 32 covers any input
};

/// Provenance of a compression: one cluster of source ids per output token,
/// in output order. Clusters always partition the input ids.
struct MergeTrace {
    std::vector<std::vector<std::int64_t>> clusters;
    int iterations_used = 0;
};

struct MergeResult {
    TokenSeq tokens;
    MergeTrace trace;
};

// Thrown when max_iterations is too small to reach target_n.
struct MergeCapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// One bipartite merge pass over (tokens, clusters). Positions split
// alternately into sources A (even) and destinations B (odd); each source is
// matched to its most similar destination; the r best-matched sources merge
// into their destinations by size-weighted average. Survivors keep their
// original relative order.
//
// Tie rules, all deterministic: equal match similarity prefers the nearer
// destination, then the later one (so runs of identical tokens pair up with
// their right-hand neighbor instead of piling onto the first destination);
// the top-r cut prefers the lower source position.
inline MergeResult merge_step(const TokenSeq& tokens,
                              std::vector<std::vector<std::int64_t>> clusters, int r) {
    const std::size_t n = tokens.count();
    if (r == 0) {
        MergeResult out{tokens, MergeTrace{std::move(clusters), 0}};
        return out;
    }
    if (n < 2) {
        throw std::invalid_argument("bipartite_match_step: need at least 2 tokens");
    }
    if (r < 0 || static_cast<std::size_t>(r) > n / 2) {
        throw std::invalid_argument("bipartite_match_step: r exceeds floor(count/2)");
    }

    struct Candidate {
        std::size_t a_pos;
        std::size_t b_pos;
        double sim;
    };
    std::vector<Candidate> candidates;
    candidates.reserve((n + 1) / 2);

    for (std::size_t a = 0; a < n; a += 2) {
        double best_sim = -2.0;
        std::size_t best_b = 0;
        std::size_t best_dist = n + 1;
        for (std::size_t b = 1; b < n; b += 2) {
            const double sim = cosine_sim(tokens.feature(a), tokens.feature(b));
            const std::size_t dist = a < b ? b - a : a - b;
            if (sim > best_sim || (sim == best_sim && dist <= best_dist)) {
                best_sim = sim;
                best_b = b;
                best_dist = dist;
            }
        }
        if (best_sim > -2.0) {
            candidates.push_back({a, best_b, best_sim});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.sim != y.sim) return x.sim > y.sim;
        return x.a_pos < y.a_pos;
    });
    candidates.resize(static_cast<std::size_t>(r));

    // destination position -> list of merged source positions
    std::vector<std::vector<std::size_t>> merged_into(n);
    std::vector<bool> removed(n, false);
    for (const Candidate& c : candidates) {
        merged_into[c.b_pos].push_back(c.a_pos);
        removed[c.a_pos] = true;
    }

    MergeResult out;
    out.tokens.dim = tokens.dim;
    out.trace.iterations_used = 1;
    std::vector<double> accum(tokens.dim);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (removed[pos]) continue;
        if (merged_into[pos].empty()) {
            out.tokens.push_token(tokens.feature(pos), tokens.sizes[pos], tokens.ids[pos]);
            out.trace.clusters.push_back(std::move(clusters[pos]));
            continue;
        }
        double total = tokens.sizes[pos];
        for (std::size_t d = 0; d < tokens.dim; ++d) {
            accum[d] = tokens.sizes[pos] * tokens.feature(pos)[d];
        }
        std::vector<std::int64_t> cluster = std::move(clusters[pos]);
        for (std::size_t src : merged_into[pos]) {
            total += tokens.sizes[src];
            for (std::size_t d = 0; d < tokens.dim; ++d) {
                accum[d] += tokens.sizes[src] * tokens.feature(src)[d];
            }
            cluster.insert(cluster.end(), clusters[src].begin(), clusters[src].end());
        }
        std::vector<double> feat(tokens.dim);
        for (std::size_t d = 0; d < tokens.dim; ++d) feat[d] = accum[d] / total;
        std::sort(cluster.begin(), cluster.end());
        // merged token takes the smallest source id; clusters partition ids,
        // so minimums stay pairwise distinct
        out.tokens.push_token(feat, total, cluster.front());
        out.trace.clusters.push_back(std::move(cluster));
    }
    return out;
}

inline std::vector<std::vector<std::int64_t>> singleton_clusters(const TokenSeq& tokens) {
    std::vector<std::vector<std::int64_t>> clusters;
    clusters.reserve(tokens.count());
    for (std::int64_t id : tokens.ids) clusters.push_back({id});
    return clusters;
}

}  // namespace detail

/// One merge pass: removes exactly r tokens (r = 0 is the identity).
inline MergeResult bipartite_match_step(const TokenSeq& tokens, int r) {
    return detail::merge_step(tokens, detail::singleton_clusters(tokens), r);
}

/// The token connector: compresses a segment of M tokens down to exactly
/// cfg.target_n by repeated bipartite merge passes, halving at most per pass.
/// The composed trace still partitions the original ids and total size is
/// conserved.
inline MergeResult compress_segment(const TokenSeq& tokens, const MergeConfig& cfg) {
    const std::size_t m = tokens.count();
    if (cfg.target_n < 1) {
        throw std::invalid_argument("compress_segment: target_n must be >= 1");
    }
    if (static_cast<std::size_t>(cfg.target_n) > m) {
        throw std::invalid_argument("compress_segment: target_n exceeds token count");
    }
    if (cfg.max_iterations < 0) {
        throw std::invalid_argument("compress_segment: negative max_iterations");
    }

    MergeResult cur{tokens, MergeTrace{detail::singleton_clusters(tokens), 0}};
    int iterations = 0;
    while (cur.tokens.count() > static_cast<std::size_t>(cfg.target_n)) {
        if (iterations == cfg.max_iterations) {
            throw MergeCapacityError(
                "compress_segment: target not reachable within max_iterations");
        }
        const std::size_t count = cur.tokens.count();
        const int r = static_cast<int>(
            std::min(count / 2, count - static_cast<std::size_t>(cfg.target_n)));
        cur = detail::merge_step(cur.tokens, std::move(cur.trace.clusters), r);
        ++iterations;
    }
    cur.trace.iterations_used = iterations;
    return cur;
}

}  // namespace lrc
