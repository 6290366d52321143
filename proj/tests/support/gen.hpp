#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace nafl::testing {

/// Seeded source of the random inputs used by the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Eigen::VectorXd vector(Eigen::Index n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

    Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

    /// r x c matrix of the given rank (rank <= min(r, c)).
    Eigen::MatrixXd matrix_of_rank(Eigen::Index r, Eigen::Index c, Eigen::Index rank) {
        return matrix(r, rank) * matrix(rank, c);
    }

private:
    std::mt19937_64 rng_;
};

} // namespace nafl::testing
