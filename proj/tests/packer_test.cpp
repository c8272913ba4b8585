#include "lrc/packer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrc/core.hpp"

namespace lrc {
namespace {

// Independent oracle: minimum number of contiguous groups with group sums
// bounded by the capacity, by dynamic programming over prefixes.
int oracle_min_contiguous_packs(const std::vector<int>& lengths, int capacity) {
    const std::size_t n = lengths.size();
    std::vector<int> used(n);
    for (std::size_t i = 0; i < n; ++i) used[i] = std::min(lengths[i], capacity);
    const int inf = 1 << 29;
    std::vector<int> dp(n + 1, inf);
    dp[0] = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        long long sum = 0;
        for (std::size_t i = j; i >= 1; --i) {
            sum += used[i - 1];
            if (sum > capacity) break;
            dp[j] = std::min(dp[j], dp[i - 1] + 1);
        }
    }
    return dp[n];
}

TEST(PackSequences, SingleueuePackExample) {
    const std::vector<int> lengths{3, 3, 3};
    const PackPlan plan = pack_sequences(lengths, 10);
    ASSERT_EQ(plan.packs.size(), 1u);
    EXPECT_DOUBLE_EQ(plan.utilization, 0.9);
    EXPECT_TRUE(plan.clipped.empty());
}

TEST(PackSequences, NextFitBoundaries) {
    const std::vector<int> lengths{7, 5, 4, 6};
    const PackPlan plan = pack_sequences(lengths, 10);
    ASSERT_EQ(plan.packs.size(), 3u);
    EXPECT_EQ(plan.packs[0].size(), 1u);  // (7)
    EXPECT_EQ(plan.packs[1].size(), 2u);  // (5, 4)
    EXPECT_EQ(plan.packs[2].size(), 1u);  // (6)
    EXPECT_EQ(oracle_min_contiguous_packs(lengths, 10), 3);
}

TEST(PackSequences, OversizedSequenceClippedAndFlagged) {
    const std::vector<int> lengths{15, 3};
    const PackPlan plan = pack_sequences(lengths, 10);
    ASSERT_EQ(plan.packs.size(), 2u);
    EXPECT_EQ(plan.packs[0][0].used, 10);
    EXPECT_EQ(plan.clipped, std::vector<std::size_t>{0});
}

TEST(PackSequences, EmptyInputGivesEmptyPlan) {
    const PackPlan plan = pack_sequences(std::vector<int>{}, 8);
    EXPECT_TRUE(plan.packs.empty());
    EXPECT_TRUE(plan.clipped.empty());
}

TEST(PackSequences, Errors) {
    EXPECT_THROW(pack_sequences(std::vector<int>{1}, 0), std::invalid_argument);
    EXPECT_THROW(pack_sequences(std::vector<int>{1, 0}, 4), std::invalid_argument);
}

TEST(ComparePadding, TinySequencesGainFourfold) {
    const PaddingComparison cmp = compare_padding(std::vector<int>{1, 1, 1, 1}, 4);
    EXPECT_DOUBLE_EQ(cmp.pad_util, 0.25);
    EXPECT_DOUBLE_EQ(cmp.pack_util, 1.0);
    EXPECT_DOUBLE_EQ(cmp.iteration_ratio, 4.0);
}

TEST(ComparePadding, DegenerateEquality) {
    const PaddingComparison cmp = compare_padding(std::vector<int>{8, 8, 8}, 8);
    EXPECT_DOUBLE_EQ(cmp.pad_util, 1.0);
    EXPECT_DOUBLE_EQ(cmp.pack_util, 1.0);
    EXPECT_DOUBLE_EQ(cmp.iteration_ratio, 1.0);
}

TEST(ComparePadding, PackingDominatesPaddingOnLogUniformWorkload) {
    const int capacity = 4096;
    Rng rng(77);
    std::vector<int> lengths;
    for (int i = 0; i < 1000; ++i) {
        const double log_len =
            std::log(16.0) + (std::log(static_cast<double>(capacity)) - std::log(16.0)) *
                                 rng.next_double();
        lengths.push_back(static_cast<int>(std::exp(log_len)));
    }
    const PaddingComparison cmp = compare_padding(lengths, capacity);
    EXPECT_GE(cmp.pack_util, cmp.pad_util);
    EXPECT_GT(cmp.iteration_ratio, 1.0);
}

TEST(PackSequences, StructuralInvariantsOnRandomWorkloads) {
    Rng rng(13);
    for (int instance = 0; instance < 200; ++instance) {
        const int capacity = 1 + static_cast<int>(rng.next_u64() % 64);
        const std::size_t n = rng.next_u64() % 40;
        std::vector<int> lengths;
        for (std::size_t i = 0; i < n; ++i) {
            lengths.push_back(1 + static_cast<int>(rng.next_u64() % (2 * capacity)));
        }
        const PackPlan plan = pack_sequences(lengths, capacity);

        long long used_total = 0, expected_total = 0;
        std::size_t expected_seq = 0;
        for (const auto& pack : plan.packs) {
            ASSERT_FALSE(pack.empty());
            long long fill = 0;
            for (const PackEntry& e : pack) {
                ASSERT_EQ(e.seq, expected_seq);  // order preserving
                ++expected_seq;
                fill += e.used;
            }
            ASSERT_LE(fill, capacity);  // capacity never exceeded
            used_total += fill;
        }
        ASSERT_EQ(expected_seq, lengths.size());
        for (int len : lengths) expected_total += std::min(len, capacity);
        ASSERT_EQ(used_total, expected_total);  // conservation

        if (!lengths.empty()) {
            ASSERT_GE(plan.utilization, plan.pad_utilization);  // dominance
        }
    }
}

TEST(PackSequences, NextFitMatchesExhaustiveOptimum) {
    Rng rng(1234);
    for (int instance = 0; instance < 500; ++instance) {
        const int capacity = 1 + static_cast<int>(rng.next_u64() % 32);
        const std::size_t n = 1 + rng.next_u64() % 12;
        std::vector<int> lengths;
        for (std::size_t i = 0; i < n; ++i) {
            lengths.push_back(1 + static_cast<int>(rng.next_u64() % capacity));
        }
        const PackPlan plan = pack_sequences(lengths, capacity);
        ASSERT_EQ(static_cast<int>(plan.packs.size()),
                  oracle_min_contiguous_packs(lengths, capacity))
            << "instance " << instance;
    }
}

}  // namespace
}  // namespace lrc
