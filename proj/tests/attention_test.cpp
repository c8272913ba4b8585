#include "lrc/attention.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lrc/core.hpp"

namespace lrc {
namespace {

TokenSeq random_tokens(std::size_t count, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    TokenSeq seq;
    seq.dim = dim;
    std::vector<double> feat(dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (double& x : feat) x = rng.next_gaussian() * 0.3;
        seq.push_token(feat, 1.0, static_cast<std::int64_t>(i));
    }
    return seq;
}

TEST(AttnStack, WeightsDeterminedBySeed) {
    const StackConfig cfg{3, 2, 8, 42};
    const AttnStack a = AttnStack::make(cfg);
    const AttnStack b = AttnStack::make(cfg);
    for (int l = 0; l < 3; ++l) {
        EXPECT_EQ(a.layer(l).wq, b.layer(l).wq);
        EXPECT_EQ(a.layer(l).wo, b.layer(l).wo);
    }
    StackConfig other = cfg;
    other.seed = 43;
    EXPECT_NE(AttnStack::make(other).layer(0).wq, a.layer(0).wq);
}

TEST(AttnStack, RejectsIndivisibleHeads) {
    EXPECT_THROW(AttnStack::make(StackConfig{1, 3, 8, 0}), std::invalid_argument);
    EXPECT_THROW(AttnStack::make(StackConfig{0, 1, 8, 0}), std::invalid_argument);
}

TEST(ForwardLayer, SingleTokenIdentityAttention) {
    const AttnStack stack = AttnStack::make(StackConfig{1, 2, 8, 7});
    const TokenSeq seq = random_tokens(1, 8, 3);
    const ForwardResult out = forward_layer(stack, 0, seq);
    ASSERT_EQ(out.attn.count, 1u);
    for (int h = 0; h < 2; ++h) {
        EXPECT_DOUBLE_EQ(out.attn.at(h, 0, 0), 1.0);
    }
    for (double v : out.tokens.features) {
        EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(ForwardLayer, RowsAreStochastic) {
    const AttnStack stack = AttnStack::make(StackConfig{2, 4, 16, 11});
    for (std::size_t count : {1u, 2u, 3u, 17u, 64u, 256u}) {
        const TokenSeq seq = random_tokens(count, 16, count);
        const ForwardResult out = forward_layer(stack, 1, seq);
        for (int h = 0; h < 4; ++h) {
            for (std::size_t i = 0; i < count; ++i) {
                double row_sum = 0.0;
                for (std::size_t j = 0; j < count; ++j) {
                    const double p = out.attn.at(h, i, j);
                    ASSERT_GE(p, 0.0);
                    row_sum += p;
                }
                ASSERT_NEAR(row_sum, 1.0, 1e-6);
            }
        }
    }
}

// No positional encoding: permuting the inputs permutes outputs and the
// attention map identically (up to float accumulation order).
TEST(ForwardLayer, PermutationEquivariant) {
    const AttnStack stack = AttnStack::make(StackConfig{1, 2, 8, 19});
    const std::size_t n = 12;
    const TokenSeq seq = random_tokens(n, 8, 5);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng(123);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.next_u64() % i]);
    }
    TokenSeq shuffled;
    shuffled.dim = seq.dim;
    for (std::size_t i = 0; i < n; ++i) {
        shuffled.push_token(seq.feature(perm[i]), seq.sizes[perm[i]], seq.ids[perm[i]]);
    }

    const ForwardResult base = forward_layer(stack, 0, seq);
    const ForwardResult moved = forward_layer(stack, 0, shuffled);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < seq.dim; ++d) {
            ASSERT_NEAR(moved.tokens.feature(i)[d], base.tokens.feature(perm[i])[d], 1e-9);
        }
        for (std::size_t j = 0; j < n; ++j) {
            for (int h = 0; h < 2; ++h) {
                ASSERT_NEAR(moved.attn.at(h, i, j), base.attn.at(h, perm[i], perm[j]), 1e-9);
            }
        }
    }
}

TEST(ForwardLayer, ScaleStableOnUnitBall) {
    const AttnStack stack = AttnStack::make(StackConfig{2, 4, 64, 3});
    Rng rng(9);
    TokenSeq seq;
    seq.dim = 64;
    std::vector<double> feat(64);
    for (int i = 0; i < 512; ++i) {
        double norm = 0.0;
        for (double& x : feat) {
            x = rng.next_gaussian();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : feat) x /= norm;  // exactly on the unit sphere
        seq.push_token(feat, 1.0, i);
    }
    TokenSeq cur = seq;
    for (int l = 0; l < 2; ++l) {
        ForwardResult out = forward_layer(stack, l, cur);
        cur = std::move(out.tokens);
    }
    for (double v : cur.features) ASSERT_TRUE(std::isfinite(v));
}

TEST(ForwardLayer, ScaleStableAtEnvelopeCorner) {
    // largest supported shape: 4096 tokens at model_dim 256
    const AttnStack stack = AttnStack::make(StackConfig{1, 4, 256, 17});
    Rng rng(21);
    TokenSeq seq;
    seq.dim = 256;
    std::vector<double> feat(256);
    for (int i = 0; i < 4096; ++i) {
        double norm = 0.0;
        for (double& x : feat) {
            x = rng.next_gaussian();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : feat) x /= norm;
        seq.push_token(feat, 1.0, i);
    }
    const ForwardResult out = forward_layer(stack, 0, seq);
    for (double v : out.tokens.features) ASSERT_TRUE(std::isfinite(v));
}

TEST(ForwardLayer, Errors) {
    const AttnStack stack = AttnStack::make(StackConfig{1, 2, 8, 7});
    EXPECT_THROW(forward_layer(stack, 1, random_tokens(2, 8, 0)), std::invalid_argument);
    EXPECT_THROW(forward_layer(stack, 0, random_tokens(2, 4, 0)), std::invalid_argument);
}

TEST(Loss, BaseOnly) {
    LossTerms terms;
    terms.base = 1.0;
    terms.lambda1 = 0.7;
    terms.lambda2 = 0.3;
    EXPECT_DOUBLE_EQ(compose_total_loss(terms), 1.0);
}

TEST(Loss, DirectArithmetic) {
    LossTerms terms;
    terms.base = 0.5;
    terms.task = 2.0;
    terms.spec = {1.0, 3.0};
    terms.lambda1 = 0.1;
    terms.lambda2 = 0.01;
    EXPECT_NEAR(compose_total_loss(terms), 0.74, 1e-15);
}

TEST(Loss, RejectsNonFinite) {
    LossTerms terms;
    terms.base = std::numeric_limits<double>::infinity();
    EXPECT_THROW(compose_total_loss(terms), std::invalid_argument);
    terms.base = 0.0;
    terms.spec = {std::nan("")};
    EXPECT_THROW(loss_gradients(terms), std::invalid_argument);
}

// central finite differences, the independent route for the gradient check
double central_difference(LossTerms& terms, double* slot, double h) {
    const double x = *slot;
    *slot = x + h;
    const double up = compose_total_loss(terms);
    *slot = x - h;
    const double down = compose_total_loss(terms);
    return (up - down) / (2.0 * h);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
    const double h = 1e-4;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        LossTerms terms;
        terms.base = rng.next_gaussian() * 2.0;
        terms.task = rng.next_gaussian() * 2.0;
        terms.lambda1 = rng.next_double() * 4.0 - 2.0;
        terms.lambda2 = rng.next_double() * 4.0 - 2.0;
        const std::size_t k = rng.next_u64() % 5;
        for (std::size_t i = 0; i < k; ++i) terms.spec.push_back(rng.next_gaussian());

        const LossGradients grads = loss_gradients(terms);
        const auto expect_close = [](double got, double want) {
            EXPECT_NEAR(got, want, 1e-6 * std::max(1.0, std::abs(want)));
        };
        {
            LossTerms t = terms;
            expect_close(central_difference(t, &t.base, h), grads.d_base);
        }
        {
            LossTerms t = terms;
            expect_close(central_difference(t, &t.task, h), grads.d_task);
        }
        for (std::size_t i = 0; i < k; ++i) {
            LossTerms t = terms;
            expect_close(central_difference(t, &t.spec[i], h), grads.d_spec[i]);
        }
    }
}

}  // namespace
}  // namespace lrc
