#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrc {

/// Duration-adaptive sampling rates with a training-style frame budget.
/// Short videos are sampled densely for motion, long ones sparsely for
/// event coverage; the final count is clamped to [min_frames, max_frames].
struct SamplerConfig {
    double dense_fps = 15.0;
    double sparse_fps = 1.0;
    double threshold_s = 60.0;
    int min_frames = 64;
    int max_frames = 512;
};

struct SamplePlan {
    double duration_s = 0.0;
    double rate_fps = 0.0;
    int raw_frame_count = 0;
    int final_frame_count = 0;
    std::vector<double> timestamps_s;  // strictly increasing, in [0, duration_s)
};

inline SamplePlan plan_sampling(double duration_s, const SamplerConfig& cfg) {
    if (!(duration_s > 0.0)) {
        throw std::invalid_argument("plan_sampling: duration_s must be positive");
    }
    if (!(cfg.dense_fps > cfg.sparse_fps) || !(cfg.sparse_fps > 0.0)) {
        throw std::invalid_argument("plan_sampling: need dense_fps > sparse_fps > 0");
    }
    if (cfg.min_frames > cfg.max_frames || cfg.min_frames < 1) {
        throw std::invalid_argument("plan_sampling: bad frame clamp range");
    }

    SamplePlan plan;
    plan.duration_s = duration_s;
    plan.rate_fps = duration_s < cfg.threshold_s ? cfg.dense_fps : cfg.sparse_fps;
    plan.raw_frame_count = static_cast<int>(std::ceil(duration_s * plan.rate_fps));
    plan.final_frame_count =
        std::clamp(plan.raw_frame_count, cfg.min_frames, cfg.max_frames);

    plan.timestamps_s.reserve(plan.final_frame_count);
    if (plan.final_frame_count == plan.raw_frame_count) {
        // native grid at the chosen rate; ceil() guarantees (raw-1)/rate < duration
        for (int k = 0; k < plan.final_frame_count; ++k) {
            plan.timestamps_s.push_back(static_cast<double>(k) / plan.rate_fps);
        }
    } else {
        // clamped: re-space uniformly over [0, duration) instead of truncating
        for (int k = 0; k < plan.final_frame_count; ++k) {
            plan.timestamps_s.push_back(duration_s * k / plan.final_frame_count);
        }
    }
    return plan;
}

}  // namespace lrc
