#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace lalab {

/// SplitMix64 finalizer. Bijective, good avalanche; used to spread seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-task seed: independent streams for (grid index,
/// replicate index) pairs. Adding grid points or replicates never
/// reshuffles the seeds of existing tasks.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ mix64(a + 0x517cc1b727220a95ULL));
    s = mix64(s ^ mix64(b + 0x2545f4914f6cdd1dULL));
    return s;
}

/// Seeded random source owned by a single task; never shared across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double normal() { return normal_(eng_); }
    double uniform() { return uniform_(eng_); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(eng_);
    }

    int binomial(int trials, double prob) {
        return std::binomial_distribution<int>(trials, prob)(eng_);
    }

    /// Index drawn with probability proportional to weights (entries >= 0).
    int categorical(const Eigen::VectorXd& weights);

    Eigen::VectorXd gaussian_vector(Eigen::Index n);
    Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace lalab
