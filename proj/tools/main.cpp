// lrc: long-context toolkit CLI
//
// Subcommands: compress, niah, pack, plan, demo. JSON config in, CSV/JSON out.
// Outputs are written atomically; identical (config, seed) pairs produce
// byte-identical files regardless of --workers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrc/attention.hpp"
#include "lrc/core.hpp"
#include "lrc/dropout.hpp"
#include "lrc/io.hpp"
#include "lrc/log.hpp"
#include "lrc/merger.hpp"
#include "lrc/niah.hpp"
#include "lrc/packer.hpp"
#include "lrc/planner.hpp"
#include "lrc/sampler.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

// Strict schema: every key must be known, so typos fail instead of silently
// falling back to defaults.
void require_known_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

const json& require_field(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    return *it;
}

double get_number(const json& obj, const std::string& where, const char* key) {
    const json& v = require_field(obj, where, key);
    if (!v.is_number()) throw ConfigError("key \"" + std::string(key) + "\" in " + where + " must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key) {
    const json& v = require_field(obj, where, key);
    if (!v.is_number_integer()) {
        throw ConfigError("key \"" + std::string(key) + "\" in " + where + " must be an integer");
    }
    return v.get<int>();
}

int get_int_or(const json& obj, const std::string& where, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    return get_int(obj, where, key);
}

double get_number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, where, key);
}

void check(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

std::vector<int> get_int_list(const json& obj, const std::string& where, const char* key) {
    const json& v = require_field(obj, where, key);
    if (!v.is_array()) throw ConfigError("key \"" + std::string(key) + "\" in " + where + " must be an array");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer()) {
            throw ConfigError("key \"" + std::string(key) + "\" in " + where + " must hold integers");
        }
        out.push_back(e.get<int>());
    }
    return out;
}

// ---------------------------------------------------------------- niah ----

struct NiahJob {
    std::vector<int> lengths;
    std::vector<double> depths;
    int trials = 0;
    lrc::NiahConfig cfg;
};

NiahJob parse_niah_config(const json& j, std::uint64_t seed) {
    require_known_keys(j, "niah config",
                       {"lengths", "depths", "trials", "haystack", "merge", "dropout", "stack"});
    NiahJob job;
    job.cfg.base_seed = seed;

    const json& hay = require_field(j, "niah config", "haystack");
    require_known_keys(hay, "haystack",
                       {"tokens_per_frame", "frames_per_clip", "feature_dim", "noise_sigma"});
    job.cfg.haystack.tokens_per_frame = get_int_or(hay, "haystack", "tokens_per_frame", 1);
    job.cfg.haystack.frames_per_clip = get_int_or(hay, "haystack", "frames_per_clip", 8);
    job.cfg.haystack.feature_dim = get_int_or(hay, "haystack", "feature_dim", 16);
    job.cfg.haystack.noise_sigma = get_number_or(hay, "haystack", "noise_sigma", 0.02);
    check(job.cfg.haystack.tokens_per_frame >= 1, "haystack.tokens_per_frame must be >= 1");
    check(job.cfg.haystack.frames_per_clip >= 1, "haystack.frames_per_clip must be >= 1");
    check(job.cfg.haystack.feature_dim >= 1, "haystack.feature_dim must be >= 1");
    check(job.cfg.haystack.noise_sigma >= 0.0, "haystack.noise_sigma must be >= 0");

    job.lengths = get_int_list(j, "niah config", "lengths");
    check(!job.lengths.empty(), "lengths must not be empty");
    for (int f : job.lengths) {
        check(f >= job.cfg.haystack.frames_per_clip,
              "lengths entries must be >= haystack.frames_per_clip");
    }
    const json& depths = require_field(j, "niah config", "depths");
    check(depths.is_array() && !depths.empty(), "depths must be a non-empty array");
    for (const json& d : depths) {
        check(d.is_number(), "depths must hold numbers");
        const double v = d.get<double>();
        check(v >= 0.0 && v <= 1.0, "depths entries must lie in [0, 1]");
        job.depths.push_back(v);
    }
    job.trials = get_int(j, "niah config", "trials");
    check(job.trials >= 1, "trials must be >= 1");

    const json& merge = require_field(j, "niah config", "merge");
    require_known_keys(merge, "merge", {"target_tokens_per_clip", "max_iterations"});
    job.cfg.merge.target_n = get_int(merge, "merge", "target_tokens_per_clip");
    job.cfg.merge.max_iterations = get_int_or(merge, "merge", "max_iterations", 32);
    const int clip_tokens =
        job.cfg.haystack.tokens_per_frame * job.cfg.haystack.frames_per_clip;
    check(job.cfg.merge.target_n >= 1 && job.cfg.merge.target_n <= clip_tokens,
          "merge.target_tokens_per_clip must lie in [1, tokens_per_frame * frames_per_clip]");
    check(job.cfg.merge.max_iterations >= 1, "merge.max_iterations must be >= 1");

    const json& stack = require_field(j, "niah config", "stack");
    require_known_keys(stack, "stack", {"layers", "heads", "model_dim"});
    job.cfg.stack.layers = get_int_or(stack, "stack", "layers", 2);
    job.cfg.stack.heads = get_int_or(stack, "stack", "heads", 2);
    job.cfg.stack.model_dim = get_int_or(stack, "stack", "model_dim", job.cfg.haystack.feature_dim);
    check(job.cfg.stack.layers >= 1, "stack.layers must be >= 1");
    check(job.cfg.stack.heads >= 1, "stack.heads must be >= 1");
    check(job.cfg.stack.model_dim == job.cfg.haystack.feature_dim,
          "stack.model_dim must equal haystack.feature_dim");
    check(job.cfg.stack.model_dim % job.cfg.stack.heads == 0,
          "stack.model_dim must be divisible by stack.heads");

    const json& drop = require_field(j, "niah config", "dropout");
    require_known_keys(drop, "dropout",
                       {"keep_prob", "deep_keep_ratio", "early_layers", "deep_layers"});
    job.cfg.dropout.keep_prob = get_number_or(drop, "dropout", "keep_prob", 1.0);
    job.cfg.dropout.deep_keep_ratio = get_number_or(drop, "dropout", "deep_keep_ratio", 1.0);
    check(job.cfg.dropout.keep_prob > 0.0 && job.cfg.dropout.keep_prob <= 1.0,
          "dropout.keep_prob must lie in (0, 1]");
    check(job.cfg.dropout.deep_keep_ratio > 0.0 && job.cfg.dropout.deep_keep_ratio <= 1.0,
          "dropout.deep_keep_ratio must lie in (0, 1]");
    if (drop.contains("early_layers")) {
        job.cfg.dropout.early_layers = get_int_list(drop, "dropout", "early_layers");
    }
    if (drop.contains("deep_layers")) {
        job.cfg.dropout.deep_layers = get_int_list(drop, "dropout", "deep_layers");
    }
    for (int l : job.cfg.dropout.early_layers) {
        check(l >= 0 && l < job.cfg.stack.layers, "dropout.early_layers index out of range");
        for (int d : job.cfg.dropout.deep_layers) {
            check(l != d, "dropout.early_layers and deep_layers must be disjoint");
        }
    }
    for (int l : job.cfg.dropout.deep_layers) {
        check(l >= 0 && l < job.cfg.stack.layers, "dropout.deep_layers index out of range");
    }
    return job;
}

int run_niah(const std::string& config_path, std::uint64_t seed, const std::string& out_path,
             int workers) {
    const NiahJob job = parse_niah_config(load_json(config_path), seed);
    lrc::log(lrc::LogLevel::info, "niah: %zu x %zu grid, %d trials, %d workers",
             job.lengths.size(), job.depths.size(), job.trials, workers);
    const lrc::NiahGrid grid =
        lrc::evaluate_grid(job.lengths, job.depths, job.trials, job.cfg, workers);
    lrc::write_file_atomic(out_path, grid.to_csv());
    lrc::log(lrc::LogLevel::info, "niah: mean recall %.4f, memorized length %d", grid.mean_recall(),
             grid.memorized_length(0.95));
    return 0;
}

// ------------------------------------------------------------ compress ----

struct CompressJob {
    bool has_sampling = false;
    lrc::SamplePlan sampling;
    int frames = 0;
    int tokens_per_frame = 0;
    int frames_per_clip = 0;
    int feature_dim = 0;
    double noise_sigma = 0.0;
    lrc::MergeConfig merge;
};

CompressJob parse_compress_config(const json& j) {
    require_known_keys(j, "compress config",
                       {"frames", "duration_s", "sampler", "tokens_per_frame", "frames_per_clip",
                        "feature_dim", "noise_sigma", "target_tokens_per_clip", "max_iterations"});
    CompressJob job;
    const bool has_frames = j.contains("frames");
    const bool has_duration = j.contains("duration_s");
    check(has_frames != has_duration,
          "compress config needs exactly one of \"frames\" or \"duration_s\"");

    if (has_duration) {
        const double duration = get_number(j, "compress config", "duration_s");
        check(duration > 0.0, "duration_s must be positive");
        lrc::SamplerConfig scfg;
        if (j.contains("sampler")) {
            const json& s = j["sampler"];
            require_known_keys(s, "sampler",
                               {"dense_fps", "sparse_fps", "threshold_s", "min_frames", "max_frames"});
            scfg.dense_fps = get_number_or(s, "sampler", "dense_fps", scfg.dense_fps);
            scfg.sparse_fps = get_number_or(s, "sampler", "sparse_fps", scfg.sparse_fps);
            scfg.threshold_s = get_number_or(s, "sampler", "threshold_s", scfg.threshold_s);
            scfg.min_frames = get_int_or(s, "sampler", "min_frames", scfg.min_frames);
            scfg.max_frames = get_int_or(s, "sampler", "max_frames", scfg.max_frames);
        }
        check(scfg.dense_fps > scfg.sparse_fps && scfg.sparse_fps > 0.0,
              "sampler rates must satisfy dense_fps > sparse_fps > 0");
        check(scfg.min_frames >= 1 && scfg.min_frames <= scfg.max_frames,
              "sampler frame clamp must satisfy 1 <= min_frames <= max_frames");
        job.sampling = lrc::plan_sampling(duration, scfg);
        job.has_sampling = true;
        job.frames = job.sampling.final_frame_count;
    } else {
        check(!j.contains("sampler"), "\"sampler\" requires \"duration_s\"");
        job.frames = get_int(j, "compress config", "frames");
        check(job.frames >= 1, "frames must be >= 1");
    }

    job.tokens_per_frame = get_int_or(j, "compress config", "tokens_per_frame", 256);
    job.frames_per_clip = get_int_or(j, "compress config", "frames_per_clip", 8);
    job.feature_dim = get_int_or(j, "compress config", "feature_dim", 16);
    job.noise_sigma = get_number_or(j, "compress config", "noise_sigma", 0.02);
    check(job.tokens_per_frame >= 1, "tokens_per_frame must be >= 1");
    check(job.frames_per_clip >= 1 && job.frames_per_clip <= job.frames,
          "frames_per_clip must lie in [1, frames]");
    check(job.feature_dim >= 1, "feature_dim must be >= 1");
    check(job.noise_sigma >= 0.0, "noise_sigma must be >= 0");

    job.merge.target_n = get_int(j, "compress config", "target_tokens_per_clip");
    job.merge.max_iterations = get_int_or(j, "compress config", "max_iterations", 32);
    const int clip_tokens = job.tokens_per_frame * job.frames_per_clip;
    check(job.merge.target_n >= 1 && job.merge.target_n <= clip_tokens,
          "target_tokens_per_clip must lie in [1, tokens_per_frame * frames_per_clip]");
    check(job.merge.max_iterations >= 1, "max_iterations must be >= 1");
    return job;
}

int run_compress(const std::string& config_path, std::uint64_t seed, const std::string& out_path) {
    const CompressJob job = parse_compress_config(load_json(config_path));

    // synthetic clip tokens: per-frame unit Gaussian plus per-token noise
    lrc::Rng frame_rng(lrc::SeedSpec{seed, {}}.with("frame", 0));
    lrc::Rng noise_rng(lrc::SeedSpec{seed, {}}.with("noise", 0));

    json clips = json::array();
    long long total_in = 0, total_out = 0;
    double size_error = 0.0;
    std::vector<double> token(job.feature_dim);
    for (int f0 = 0; f0 < job.frames; f0 += job.frames_per_clip) {
        const int frames_here = std::min(job.frames_per_clip, job.frames - f0);
        lrc::TokenSeq clip;
        clip.dim = static_cast<std::size_t>(job.feature_dim);
        for (int f = 0; f < frames_here; ++f) {
            std::vector<double> frame(job.feature_dim);
            for (double& x : frame) x = frame_rng.next_gaussian();
            for (int t = 0; t < job.tokens_per_frame; ++t) {
                for (int d = 0; d < job.feature_dim; ++d) {
                    token[d] = frame[d] + job.noise_sigma * noise_rng.next_gaussian();
                }
                clip.push_token(token, 1.0,
                                static_cast<std::int64_t>(f0 + f) * job.tokens_per_frame + t);
            }
        }
        lrc::MergeConfig cfg = job.merge;
        cfg.target_n = std::min<int>(cfg.target_n, static_cast<int>(clip.count()));
        const lrc::MergeResult merged = lrc::compress_segment(clip, cfg);
        double in_size = 0.0, out_size = 0.0;
        for (double s : clip.sizes) in_size += s;
        for (double s : merged.tokens.sizes) out_size += s;
        size_error = std::max(size_error, std::abs(in_size - out_size) / in_size);
        clips.push_back({{"input_tokens", clip.count()},
                         {"output_tokens", merged.tokens.count()},
                         {"iterations", merged.trace.iterations_used}});
        total_in += static_cast<long long>(clip.count());
        total_out += static_cast<long long>(merged.tokens.count());
    }

    json out{{"clips", clips},
             {"total_input_tokens", total_in},
             {"total_output_tokens", total_out},
             {"tokens_per_frame_out", static_cast<double>(total_out) / job.frames},
             {"max_relative_size_error", size_error}};
    if (job.has_sampling) {
        out["sampling"] = {{"rate_fps", job.sampling.rate_fps},
                           {"raw_frame_count", job.sampling.raw_frame_count},
                           {"final_frame_count", job.sampling.final_frame_count}};
    }
    lrc::write_file_atomic(out_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- pack ----

std::vector<int> read_lengths(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    }
    std::vector<int> lengths;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(line, &pos);
        } catch (const std::exception&) {
            throw ConfigError("lengths file: not an integer: \"" + line + "\"");
        }
        if (pos != line.size() || value < 1) {
            throw ConfigError("lengths file: not a positive integer: \"" + line + "\"");
        }
        lengths.push_back(value);
    }
    return lengths;
}

int run_pack(const std::string& lengths_path, int capacity, const std::string& out_path) {
    check(capacity >= 1, "--capacity must be >= 1");
    const std::vector<int> lengths = read_lengths(lengths_path);
    const lrc::PackPlan plan = lrc::pack_sequences(lengths, capacity);
    lrc::log(lrc::LogLevel::info, "pack: %zu sequences into %zu packs, utilization %.4f",
             lengths.size(), plan.packs.size(), plan.utilization);
    lrc::write_file_atomic(out_path, lrc::pack_plan_to_json(plan).dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- plan ----

int run_plan(std::int64_t seq_len, int heads, int nodes, int gpus, double bytes_per_token,
             double inter_bw, double intra_bw, const std::string& mapping,
             const std::string& out_path) {
    check(mapping == "paper" || mapping == "inverted", "--mapping must be \"paper\" or \"inverted\"");
    const lrc::LinkMapping link = mapping == "paper" ? lrc::LinkMapping::a2a_inter_p2p_intra
                                                     : lrc::LinkMapping::a2a_intra_p2p_inter;
    const lrc::ClusterSpec cluster{nodes, gpus, inter_bw, intra_bw};
    const std::vector<lrc::ParallelPlan> plans =
        lrc::enumerate_plans(seq_len, heads, bytes_per_token, cluster, link);
    lrc::write_file_atomic(out_path, lrc::parallel_plans_to_json(plans).dump(2) + "\n");
    if (!plans.empty()) {
        const lrc::ParallelPlan best = lrc::select_plan(plans);
        lrc::log(lrc::LogLevel::info, "plan: best u=%d r=%d, est %.6g s/layer", best.ulysses_degree,
                 best.ring_degree, best.est_comm_time_per_layer);
    }
    return 0;
}

// ---------------------------------------------------------------- demo ----

int run_demo(std::uint64_t seed) {
    std::printf("== sampling ==\n");
    const lrc::SamplerConfig scfg;
    for (double duration : {10.0, 3600.0}) {
        const lrc::SamplePlan plan = lrc::plan_sampling(duration, scfg);
        std::printf("  %7.0f s video -> %2.0f fps, raw %4d frames, final %3d%s\n", duration,
                    plan.rate_fps, plan.raw_frame_count, plan.final_frame_count,
                    plan.final_frame_count != plan.raw_frame_count ? " (clamped, re-spaced)" : "");
    }

    std::printf("== compression ==\n");
    lrc::Rng rng(lrc::SeedSpec{seed, {}}.with("demo", 0));
    lrc::TokenSeq clip;
    clip.dim = 16;
    std::vector<double> feat(16);
    for (int i = 0; i < 2048; ++i) {
        for (double& x : feat) x = rng.next_gaussian();
        clip.push_token(feat, 1.0, i);
    }
    const lrc::MergeResult merged = lrc::compress_segment(clip, {128, 32});
    double size_out = 0.0;
    for (double s : merged.tokens.sizes) size_out += s;
    std::printf("  8-frame clip: 2048 tokens -> %zu in %d iterations, total size %.1f\n",
                merged.tokens.count(), merged.trace.iterations_used, size_out);

    std::printf("== needle in a haystack (64 frames) ==\n");
    lrc::NiahConfig cfg;
    cfg.haystack = {1, 8, 16, 0.02};
    cfg.merge = {8, 32};
    cfg.dropout.keep_prob = 1.0;
    cfg.dropout.deep_keep_ratio = 1.0;
    cfg.dropout.early_layers = {0};
    cfg.dropout.deep_layers = {1};
    cfg.stack = {2, 2, 16, 0};
    cfg.base_seed = seed;
    const std::vector<int> lengths{16, 32, 64};
    const std::vector<double> depths{0.0, 0.5, 1.0};
    lrc::NiahGrid lossless = lrc::evaluate_grid(lengths, depths, 5, cfg, 1);
    std::printf("  lossless: mean recall %.4f, memorized length %d\n", lossless.mean_recall(),
                lossless.memorized_length(0.95));
    cfg.merge.target_n = 2;
    cfg.dropout.keep_prob = 0.8;
    cfg.dropout.deep_keep_ratio = 0.6;
    lrc::NiahGrid lossy = lrc::evaluate_grid(lengths, depths, 5, cfg, 1);
    std::printf("  lossy (2 tokens/clip, p=0.8, rho=0.6): mean recall %.4f, memorized length %d\n",
                lossy.mean_recall(), lossy.memorized_length(0.95));

    std::printf("== packing ==\n");
    lrc::Rng len_rng(lrc::SeedSpec{seed, {}}.with("lengths", 0));
    std::vector<int> lens;
    for (int i = 0; i < 1000; ++i) {
        const double log_len = std::log(16.0) +
                               (std::log(4096.0) - std::log(16.0)) * len_rng.next_double();
        lens.push_back(static_cast<int>(std::exp(log_len)));
    }
    const lrc::PaddingComparison cmp = lrc::compare_padding(lens, 4096);
    std::printf("  1000 sequences at capacity 4096: packed %.4f vs padded %.4f, %.2f seqs/pack\n",
                cmp.pack_util, cmp.pad_util, cmp.iteration_ratio);

    std::printf("== parallelism planning ==\n");
    const lrc::ClusterSpec cluster{2, 8, 25e9, 300e9};
    std::printf("  65536 tokens, 32 heads, 2x8 devices, full-cluster plans:\n");
    for (const lrc::LinkMapping mapping :
         {lrc::LinkMapping::a2a_inter_p2p_intra, lrc::LinkMapping::a2a_intra_p2p_inter}) {
        const auto plans = lrc::enumerate_plans(65536, 32, 4096.0, cluster, mapping);
        std::vector<lrc::ParallelPlan> full;
        for (const lrc::ParallelPlan& p : plans) {
            if (p.total_degree == cluster.nodes * cluster.devices_per_node) full.push_back(p);
        }
        const lrc::ParallelPlan best = lrc::select_plan(full);
        std::printf("    %-20s best u=%-2d r=%-2d est %.6f s/layer\n", lrc::to_string(mapping),
                    best.ulysses_degree, best.ring_degree, best.est_comm_time_per_layer);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-context toolkit: token compression, NIAH evaluation, packing, parallelism planning"};
    app.require_subcommand(1);

    std::string config_path, out_path, lengths_path;
    std::uint64_t seed = 0;
    int workers = 1;
    int capacity = 0;

    std::int64_t seq_len = 0;
    int heads = 0, nodes = 0, gpus = 0;
    double bytes_per_token = 0.0, inter_bw = 0.0, intra_bw = 0.0;
    std::string mapping = "paper";

    CLI::App* c_compress = app.add_subcommand("compress", "compress synthetic clips and report the trace");
    c_compress->add_option("--config", config_path, "JSON config")->required();
    c_compress->add_option("--seed", seed, "base seed");
    c_compress->add_option("--out", out_path, "output JSON path")->required();

    CLI::App* c_niah = app.add_subcommand("niah", "needle-in-a-haystack recall grid");
    c_niah->add_option("--config", config_path, "JSON config")->required();
    c_niah->add_option("--seed", seed, "base seed");
    c_niah->add_option("--out", out_path, "output CSV path")->required();
    c_niah->add_option("--workers", workers, "worker threads over grid cells")
        ->check(CLI::PositiveNumber);

    CLI::App* c_pack = app.add_subcommand("pack", "pack sequence lengths into fixed-capacity batches");
    c_pack->add_option("--lengths", lengths_path, "file with one length per line")->required();
    c_pack->add_option("--capacity", capacity, "pack capacity in tokens")->required();
    c_pack->add_option("--out", out_path, "output JSON path")->required();

    CLI::App* c_plan = app.add_subcommand("plan", "enumerate and cost 2D parallelism plans");
    c_plan->add_option("--seq-len", seq_len, "sequence length in tokens")->required();
    c_plan->add_option("--heads", heads, "attention head count")->required();
    c_plan->add_option("--nodes", nodes, "node count")->required();
    c_plan->add_option("--gpus", gpus, "devices per node")->required();
    c_plan->add_option("--bytes-per-token", bytes_per_token, "per-token payload bytes")->required();
    c_plan->add_option("--inter-bw", inter_bw, "inter-node bandwidth, bytes/s")->required();
    c_plan->add_option("--intra-bw", intra_bw, "intra-node bandwidth, bytes/s")->required();
    c_plan->add_option("--mapping", mapping, "link mapping: paper | inverted");
    c_plan->add_option("--out", out_path, "output JSON path")->required();

    CLI::App* c_demo = app.add_subcommand("demo", "tiny end-to-end pipeline run");
    c_demo->add_option("--seed", seed, "base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad flags are configuration errors
    }

    try {
        if (c_compress->parsed()) return run_compress(config_path, seed, out_path);
        if (c_niah->parsed()) return run_niah(config_path, seed, out_path, workers);
        if (c_pack->parsed()) return run_pack(lengths_path, capacity, out_path);
        if (c_plan->parsed()) {
            return run_plan(seq_len, heads, nodes, gpus, bytes_per_token, inter_bw, intra_bw,
                            mapping, out_path);
        }
        if (c_demo->parsed()) return run_demo(seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::system_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
