#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "lrc/attention.hpp"
#include "lrc/core.hpp"
#include "lrc/dropout.hpp"
#include "lrc/merger.hpp"

namespace lrc {

struct HaystackParams {
    int tokens_per_frame = 1;
    int frames_per_clip = 8;
    int feature_dim = 16;
    double noise_sigma = 0.02;
};

struct HaystackSpec {
    int total_frames = 64;
    double needle_depth = 0.5;  // fraction in [0, 1]
    HaystackParams params;
    SeedSpec seed;
};

struct Haystack {
    std::vector<TokenSeq> clips;
    std::vector<std::int64_t> needle_ids;
    std::vector<double> signature;
    int needle_frame = 0;
};

namespace detail {

inline void normalize(std::span<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    for (double& x : v) x /= norm;
}

inline std::vector<double> unit_gaussian(Rng& rng, int dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.next_gaussian();
    normalize(v);
    return v;
}

}  // namespace detail

/// The signature vector is keyed by the base seed alone, so it stays fixed
/// across cells and trials of a grid while the haystack varies.
inline std::vector<double> niah_signature(std::uint64_t base_seed, int dim) {
    Rng rng(SeedSpec{base_seed, {}}.with("signature", 0));
    return detail::unit_gaussian(rng, dim);
}

/// Build a synthetic haystack: every frame is a random unit vector except the
/// needle frame, which carries the signature. Each frame expands to
/// tokens_per_frame tokens (frame vector plus N(0, sigma^2) noise,
/// renormalized), and frames group into clips of frames_per_clip.
inline Haystack generate_haystack(const HaystackSpec& spec) {
    const auto& p = spec.params;
    if (spec.total_frames < p.frames_per_clip || p.frames_per_clip < 1) {
        throw std::invalid_argument("generate_haystack: need total_frames >= frames_per_clip >= 1");
    }
    if (p.tokens_per_frame < 1 || p.feature_dim < 1) {
        throw std::invalid_argument("generate_haystack: bad token/feature dims");
    }
    if (p.noise_sigma < 0.0) {
        throw std::invalid_argument("generate_haystack: negative noise_sigma");
    }
    if (spec.needle_depth < 0.0 || spec.needle_depth > 1.0) {
        throw std::invalid_argument("generate_haystack: needle_depth outside [0, 1]");
    }

    Haystack out;
    out.signature = niah_signature(spec.seed.base_seed, p.feature_dim);
    out.needle_frame = static_cast<int>(std::clamp<long>(
        std::lround(spec.needle_depth * (spec.total_frames - 1)), 0, spec.total_frames - 1));

    Rng frame_rng(spec.seed.with("haystack", 0));
    Rng noise_rng(spec.seed.with("noise", 0));

    TokenSeq* clip = nullptr;
    std::vector<double> token(p.feature_dim);
    for (int f = 0; f < spec.total_frames; ++f) {
        if (f % p.frames_per_clip == 0) {
            out.clips.emplace_back();
            clip = &out.clips.back();
            clip->dim = static_cast<std::size_t>(p.feature_dim);
        }
        // the haystack stream advances for every frame so the surrounding
        // distractors do not depend on where the needle lands
        std::vector<double> frame_vec = detail::unit_gaussian(frame_rng, p.feature_dim);
        if (f == out.needle_frame) frame_vec = out.signature;

        for (int t = 0; t < p.tokens_per_frame; ++t) {
            for (int d = 0; d < p.feature_dim; ++d) {
                token[d] = frame_vec[d] + p.noise_sigma * noise_rng.next_gaussian();
            }
            detail::normalize(token);
            const std::int64_t id =
                static_cast<std::int64_t>(f) * p.tokens_per_frame + t;
            clip->push_token(token, 1.0, id);
            if (f == out.needle_frame) out.needle_ids.push_back(id);
        }
    }
    return out;
}

/// One end-to-end trial: per-clip compression, concatenation with the
/// signature appended as the anchor query token, the dropout-instrumented
/// stack, then nearest-cosine retrieval against the signature.
///
/// Retrieval compares connector-output (merged) features, not the
/// stack-transformed ones; the stack only decides which tokens survive.
/// Success requires the retrieved token's provenance cluster to contain a
/// needle token id, never a position heuristic.
inline bool run_trial(const HaystackSpec& spec, const MergeConfig& merge_cfg,
                      const DropoutConfig& drop_cfg, const AttnStack& stack) {
    if (stack.model_dim() != spec.params.feature_dim) {
        throw std::invalid_argument("run_trial: stack dim does not match haystack dim");
    }
    const Haystack hay = generate_haystack(spec);

    TokenSeq combined;
    combined.dim = static_cast<std::size_t>(spec.params.feature_dim);
    std::unordered_map<std::int64_t, std::vector<std::int64_t>> cluster_of;
    std::unordered_map<std::int64_t, std::vector<double>> merged_feature;

    for (const TokenSeq& clip : hay.clips) {
        MergeConfig clip_cfg = merge_cfg;
        // a short trailing clip cannot have more output tokens than inputs
        clip_cfg.target_n = std::min<int>(merge_cfg.target_n, static_cast<int>(clip.count()));
        MergeResult merged = compress_segment(clip, clip_cfg);
        for (std::size_t i = 0; i < merged.tokens.count(); ++i) {
            const std::int64_t id = merged.tokens.ids[i];
            combined.push_token(merged.tokens.feature(i), merged.tokens.sizes[i], id);
            cluster_of.emplace(id, std::move(merged.trace.clusters[i]));
            auto feat = merged.tokens.feature(i);
            merged_feature.emplace(id, std::vector<double>(feat.begin(), feat.end()));
        }
    }

    const std::int64_t signature_id =
        static_cast<std::int64_t>(spec.total_frames) * spec.params.tokens_per_frame;
    combined.push_token(hay.signature, 1.0, signature_id);

    DropoutConfig cfg = drop_cfg;
    cfg.anchor_ids = {signature_id};
    DropoutRunResult run =
        run_with_dropout(stack, combined, cfg, spec.seed.with("dropout", 0));

    double best_sim = -2.0;
    std::int64_t best_id = -1;
    for (std::int64_t id : run.survivors.final_ids) {
        if (id == signature_id) continue;
        const auto& feat = merged_feature.at(id);
        const double sim = cosine_sim(feat, hay.signature);
        if (sim > best_sim || (sim == best_sim && id < best_id)) {
            best_sim = sim;
            best_id = id;
        }
    }
    if (best_id < 0) return false;  // everything but the anchor was dropped

    const auto& cluster = cluster_of.at(best_id);
    for (std::int64_t member : cluster) {
        for (std::int64_t needle : hay.needle_ids) {
            if (member == needle) return true;
        }
    }
    return false;
}

/// Recall over a (context length x needle depth) grid.
struct NiahGrid {
    std::vector<int> context_lengths;  // sorted ascending
    std::vector<double> depths;        // sorted ascending
    int trials = 0;
    std::vector<double> recall;  // lengths-major, lengths.size() x depths.size()

    double& at(std::size_t li, std::size_t di) { return recall[li * depths.size() + di]; }
    double at(std::size_t li, std::size_t di) const { return recall[li * depths.size() + di]; }

    double mean_recall() const {
        double sum = 0.0;
        for (double r : recall) sum += r;
        return recall.empty() ? 0.0 : sum / static_cast<double>(recall.size());
    }

    // largest context length whose row-mean recall meets the threshold; 0 if none
    int memorized_length(double threshold) const {
        int best = 0;
        for (std::size_t li = 0; li < context_lengths.size(); ++li) {
            double row = 0.0;
            for (std::size_t di = 0; di < depths.size(); ++di) row += at(li, di);
            row /= static_cast<double>(depths.size());
            if (row >= threshold) best = std::max(best, context_lengths[li]);
        }
        return best;
    }

    // one row per cell: context_frames,depth_fraction,trials,recall
    std::string to_csv() const {
        std::string out = "context_frames,depth_fraction,trials,recall\n";
        char line[96];
        for (std::size_t li = 0; li < context_lengths.size(); ++li) {
            for (std::size_t di = 0; di < depths.size(); ++di) {
                std::snprintf(line, sizeof(line), "%d,%.4f,%d,%.4f\n", context_lengths[li],
                              depths[di], trials, at(li, di));
                out += line;
            }
        }
        return out;
    }
};

struct NiahConfig {
    HaystackParams haystack;
    MergeConfig merge;       // target_n = tokens per clip after compression
    DropoutConfig dropout;   // anchor_ids are filled per trial
    StackConfig stack;       // stack.seed is derived from base_seed
    std::uint64_t base_seed = 0;
};

/// Evaluate the grid. Cells are independent tasks with per-cell derived
/// seeds, so the result is bit-identical for any worker count.
inline NiahGrid evaluate_grid(std::vector<int> lengths, std::vector<double> depths, int trials,
                              const NiahConfig& cfg, int workers = 1) {
    if (trials < 1) throw std::invalid_argument("evaluate_grid: trials must be >= 1");
    if (lengths.empty() || depths.empty()) {
        throw std::invalid_argument("evaluate_grid: empty grid axis");
    }
    if (cfg.stack.model_dim != cfg.haystack.feature_dim) {
        throw std::invalid_argument("evaluate_grid: stack dim does not match haystack dim");
    }
    std::sort(lengths.begin(), lengths.end());
    std::sort(depths.begin(), depths.end());

    StackConfig stack_cfg = cfg.stack;
    stack_cfg.seed = derive_seed(SeedSpec{cfg.base_seed, {}}.with("stack", 0));
    const AttnStack stack = AttnStack::make(stack_cfg);

    NiahGrid grid;
    grid.context_lengths = lengths;
    grid.depths = depths;
    grid.trials = trials;
    grid.recall.assign(lengths.size() * depths.size(), 0.0);

    const std::size_t cells = grid.recall.size();
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        try {
            for (std::size_t cell = next.fetch_add(1); cell < cells && !stop.load();
                 cell = next.fetch_add(1)) {
                const std::size_t li = cell / depths.size();
                const std::size_t di = cell % depths.size();
                HaystackSpec spec;
                spec.total_frames = lengths[li];
                spec.needle_depth = depths[di];
                spec.params = cfg.haystack;
                int successes = 0;
                for (int t = 0; t < trials; ++t) {
                    spec.seed = SeedSpec{cfg.base_seed, {}}
                                    .with("F", lengths[li])
                                    .with("depth_pm", std::lround(depths[di] * 1000.0))
                                    .with("trial", t);
                    if (run_trial(spec, cfg.merge, cfg.dropout, stack)) ++successes;
                }
                grid.recall[cell] = static_cast<double>(successes) / trials;
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            stop.store(true);
        }
    };

    const int nthreads = std::max(1, workers);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return grid;
}

}  // namespace lrc
