#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lrc {

// splitmix64 finalizer. Used as the mixing primitive for seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over a byte string.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// A base seed plus a list of (label, value) derivation steps. Every random
/// stream in the library is keyed by one of these, so results never depend on
/// evaluation order or worker count.
struct SeedSpec {
    std::uint64_t base_seed = 0;
    std::vector<std::pair<std::string, std::int64_t>> labels;

    SeedSpec with(std::string label, std::int64_t value) const {
        SeedSpec out = *this;
        out.labels.emplace_back(std::move(label), value);
        return out;
    }
};

/// Collapse a SeedSpec to a 64-bit seed.
///
/// Construction: state starts at mix64(base_seed), then each (label, value)
/// pair folds in fnv1a(label) and the value through the splitmix64 finalizer.
/// Pure integer arithmetic, so identical on every platform.
inline std::uint64_t derive_seed(const SeedSpec& spec) {
    std::uint64_t h = mix64(spec.base_seed);
    for (const auto& [label, value] : spec.labels) {
        h = mix64(h ^ fnv1a(label));
        h = mix64(h ^ static_cast<std::uint64_t>(value));
    }
    return h;
}

/// Deterministic random stream. mt19937_64 is bit-exact across platforms by
/// specification; the floating-point draws below avoid std:: distributions,
/// whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    explicit Rng(const SeedSpec& spec) : engine_(derive_seed(spec)) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    // standard normal via Box-Muller
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// An ordered token sequence: per-token feature vector, merge weight ("size")
/// and source id. Features are stored row-major, count x dim.
struct TokenSeq {
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<double> sizes;
    std::vector<std::int64_t> ids;

    std::size_t count() const { return ids.size(); }

    std::span<const double> feature(std::size_t i) const {
        return {features.data() + i * dim, dim};
    }
    std::span<double> feature(std::size_t i) {
        return {features.data() + i * dim, dim};
    }

    void push_token(std::span<const double> feat, double size, std::int64_t id) {
        if (feat.size() != dim) {
            throw std::invalid_argument("TokenSeq::push_token: feature dim mismatch");
        }
        features.insert(features.end(), feat.begin(), feat.end());
        sizes.push_back(size);
        ids.push_back(id);
    }

    // Checks the structural invariants; throws std::invalid_argument on the
    // first violation.
    void validate() const {
        if (sizes.size() != ids.size() || features.size() != ids.size() * dim) {
            throw std::invalid_argument("TokenSeq: features/sizes/ids length mismatch");
        }
        for (double s : sizes) {
            if (!(s > 0.0)) throw std::invalid_argument("TokenSeq: non-positive size");
        }
        std::vector<std::int64_t> sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] < 0) throw std::invalid_argument("TokenSeq: negative id");
            if (i > 0 && sorted[i] == sorted[i - 1]) {
                throw std::invalid_argument("TokenSeq: duplicate id");
            }
        }
    }
};

/// Cosine similarity. Zero-norm inputs yield 0.0 by definition so degenerate
/// synthetic data never aborts a merge.
inline double cosine_sim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine_sim: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace lrc
