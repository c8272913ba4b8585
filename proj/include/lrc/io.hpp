#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "lrc/packer.hpp"
#include "lrc/planner.hpp"

namespace lrc {

/// Write-then-rename so readers never observe a half-written file and a
/// failed run never leaves partial output at the destination.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::path tmp =
        dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::system_error(errno, std::generic_category(),
                                    "cannot open " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignore;
            fs::remove(tmp, ignore);
            throw std::system_error(errno, std::generic_category(),
                                    "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw std::system_error(ec, "rename failed for " + path.string());
    }
}

inline nlohmann::json pack_plan_to_json(const PackPlan& plan) {
    nlohmann::json packs = nlohmann::json::array();
    for (const auto& pack : plan.packs) {
        nlohmann::json entries = nlohmann::json::array();
        for (const PackEntry& e : pack) {
            entries.push_back({{"seq", e.seq}, {"used", e.used}});
        }
        packs.push_back(entries);
    }
    return nlohmann::json{{"capacity", plan.capacity},
                          {"packs", packs},
                          {"clipped", plan.clipped},
                          {"utilization", plan.utilization},
                          {"pad_utilization", plan.pad_utilization},
                          {"iteration_ratio", plan.iteration_ratio}};
}

inline nlohmann::json parallel_plan_to_json(const ParallelPlan& plan) {
    return nlohmann::json{
        {"ulysses_degree", plan.ulysses_degree},
        {"ring_degree", plan.ring_degree},
        {"total_degree", plan.total_degree},
        {"tokens_per_device", plan.tokens_per_device},
        {"heads_per_device", plan.heads_per_device},
        {"a2a_bytes_per_device_per_layer", plan.a2a_bytes_per_device_per_layer},
        {"p2p_bytes_per_device_per_layer", plan.p2p_bytes_per_device_per_layer},
        {"est_comm_time_per_layer", plan.est_comm_time_per_layer},
        {"mapping", to_string(plan.mapping)},
    };
}

inline nlohmann::json parallel_plans_to_json(std::span<const ParallelPlan> plans) {
    nlohmann::json out = nlohmann::json::array();
    for (const ParallelPlan& p : plans) out.push_back(parallel_plan_to_json(p));
    return out;
}

}  // namespace lrc
