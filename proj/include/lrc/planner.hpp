#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrc {

struct ClusterSpec {
    int nodes = 1;
    int devices_per_node = 1;
    double inter_node_bw = 1.0;  // bytes/s
    double intra_node_bw = 1.0;  // bytes/s
};

/// Which device-grid dimension rides the inter-node links. The default puts
/// all-to-all traffic inter-node and ring traffic intra-node; the inverted
/// mapping swaps them for clusters with fast intra-node fabric.
enum class LinkMapping {
    a2a_inter_p2p_intra,  // CLI: "paper"
    a2a_intra_p2p_inter,  // CLI: "inverted"
};

inline const char* to_string(LinkMapping m) {
    return m == LinkMapping::a2a_inter_p2p_intra ? "a2a_inter_p2p_intra"
                                                 : "a2a_intra_p2p_inter";
}

/// One (ulysses_degree, ring_degree) factorization with its per-device,
/// per-layer communication estimate.
struct ParallelPlan {
    int ulysses_degree = 1;  // u, head partitioning via all-to-all
    int ring_degree = 1;     // r, sequence partitioning via ring P2P
    int total_degree = 1;    // P = u * r
    std::int64_t tokens_per_device = 0;  // ceil(S / P)
    int heads_per_device = 0;
    double a2a_bytes_per_device_per_layer = 0.0;
    double p2p_bytes_per_device_per_layer = 0.0;
    double est_comm_time_per_layer = 0.0;
    LinkMapping mapping = LinkMapping::a2a_inter_p2p_intra;
};

/// Analytic per-layer cost of one (u, r) plan.
///
/// A2A redistributes the Q, K, V and O shards across the u head-parallel
/// ranks, each rank exchanging the (u-1)/u fraction it does not keep:
///   a2a = 4 * ceil(S/P) * bytes_per_token * (u-1)/u
/// Ring attention circulates K and V blocks for r-1 steps:
///   p2p = 2 * ceil(S/P) * bytes_per_token * (r-1)
inline ParallelPlan estimate_cost(int u, int r, std::int64_t seq_len, int heads,
                                  double bytes_per_token, const ClusterSpec& cluster,
                                  LinkMapping mapping = LinkMapping::a2a_inter_p2p_intra) {
    if (u < 1 || r < 1) throw std::invalid_argument("estimate_cost: degrees must be >= 1");
    if (heads < 1 || heads % u != 0) {
        throw std::invalid_argument("estimate_cost: ulysses degree must divide head count");
    }
    if (seq_len < 1) throw std::invalid_argument("estimate_cost: seq_len must be >= 1");
    if (!(bytes_per_token > 0.0)) {
        throw std::invalid_argument("estimate_cost: bytes_per_token must be positive");
    }
    if (!(cluster.inter_node_bw > 0.0) || !(cluster.intra_node_bw > 0.0)) {
        throw std::invalid_argument("estimate_cost: bandwidths must be positive");
    }

    ParallelPlan plan;
    plan.ulysses_degree = u;
    plan.ring_degree = r;
    plan.total_degree = u * r;
    plan.tokens_per_device = (seq_len + plan.total_degree - 1) / plan.total_degree;
    plan.heads_per_device = heads / u;
    plan.mapping = mapping;

    const double shard = static_cast<double>(plan.tokens_per_device) * bytes_per_token;
    plan.a2a_bytes_per_device_per_layer = 4.0 * shard * (u - 1) / u;
    plan.p2p_bytes_per_device_per_layer = 2.0 * shard * (r - 1);

    const bool a2a_inter = mapping == LinkMapping::a2a_inter_p2p_intra;
    const double a2a_bw = a2a_inter ? cluster.inter_node_bw : cluster.intra_node_bw;
    const double p2p_bw = a2a_inter ? cluster.intra_node_bw : cluster.inter_node_bw;
    plan.est_comm_time_per_layer = plan.a2a_bytes_per_device_per_layer / a2a_bw +
                                   plan.p2p_bytes_per_device_per_layer / p2p_bw;
    return plan;
}

/// All (u, r) factorizations of every feasible total degree P <= nodes *
/// devices_per_node with u dividing the head count, costed and sorted by
/// estimated communication time (ties: smaller u, then smaller P).
inline std::vector<ParallelPlan> enumerate_plans(std::int64_t seq_len, int heads,
                                                 double bytes_per_token,
                                                 const ClusterSpec& cluster,
                                                 LinkMapping mapping = LinkMapping::a2a_inter_p2p_intra) {
    if (cluster.nodes < 1 || cluster.devices_per_node < 1) {
        throw std::invalid_argument("enumerate_plans: cluster must have >= 1 device");
    }
    const int max_degree = cluster.nodes * cluster.devices_per_node;
    std::vector<ParallelPlan> plans;
    for (int p = 1; p <= max_degree; ++p) {
        for (int u = 1; u <= p; ++u) {
            if (p % u != 0 || heads % u != 0) continue;
            plans.push_back(estimate_cost(u, p / u, seq_len, heads, bytes_per_token,
                                          cluster, mapping));
        }
    }
    std::sort(plans.begin(), plans.end(), [](const ParallelPlan& a, const ParallelPlan& b) {
        if (a.est_comm_time_per_layer != b.est_comm_time_per_layer) {
            return a.est_comm_time_per_layer < b.est_comm_time_per_layer;
        }
        if (a.ulysses_degree != b.ulysses_degree) return a.ulysses_degree < b.ulysses_degree;
        return a.total_degree < b.total_degree;
    });
    return plans;
}

struct NoFeasiblePlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimum-communication plan; ties prefer smaller u, then smaller P.
inline ParallelPlan select_plan(std::span<const ParallelPlan> plans) {
    if (plans.empty()) throw NoFeasiblePlanError("select_plan: no feasible plan");
    const ParallelPlan* best = &plans[0];
    for (const ParallelPlan& p : plans.subspan(1)) {
        if (p.est_comm_time_per_layer < best->est_comm_time_per_layer ||
            (p.est_comm_time_per_layer == best->est_comm_time_per_layer &&
             (p.ulysses_degree < best->ulysses_degree ||
              (p.ulysses_degree == best->ulysses_degree && p.total_degree < best->total_degree)))) {
            best = &p;
        }
    }
    return *best;
}

}  // namespace lrc
