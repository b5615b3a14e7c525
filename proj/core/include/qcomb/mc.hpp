#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qcomb/random.hpp"

namespace qcomb {

/// Monte Carlo estimate with its standard error.
struct MeanEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

namespace detail {

struct ChunkStats {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
};

inline std::vector<std::size_t> chunk_sizes(std::size_t n, int threads) {
    int t = std::max(1, threads);
    std::vector<std::size_t> sz(t, n / t);
    for (std::size_t i = 0; i < n % t; ++i) ++sz[i];
    return sz;
}

}  // namespace detail

/// Chunked Monte Carlo mean of a scalar sampler. Deterministic given
/// (seed, threads): chunk i uses the derived stream i. Single-threaded
/// when threads == 1.
inline MeanEstimate mc_mean(std::size_t n, std::uint64_t seed, int threads,
                            const std::function<double(Rng &)> &sample) {
    if (n == 0) throw std::invalid_argument("mc_mean: n must be >= 1");
    auto sizes = detail::chunk_sizes(n, threads);
    std::vector<detail::ChunkStats> stats(sizes.size());
    auto run = [&](std::size_t c) {
        Rng rng = make_rng(seed, c);
        auto &s = stats[c];
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            double v = sample(rng);
            s.sum += v;
            s.sumsq += v * v;
            ++s.n;
        }
    };
    if (sizes.size() == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t c = 0; c < sizes.size(); ++c) pool.emplace_back(run, c);
        for (auto &t : pool) t.join();
    }
    double sum = 0.0, sumsq = 0.0;
    for (const auto &s : stats) {
        sum += s.sum;
        sumsq += s.sumsq;
    }
    double mean = sum / double(n);
    double var = std::max(0.0, sumsq / double(n) - mean * mean);
    MeanEstimate out;
    out.mean = mean;
    out.stderr_ = (n > 1) ? std::sqrt(var / double(n - 1)) : 0.0;
    out.n = n;
    return out;
}

/// Chunked Monte Carlo mean of a matrix-valued sampler (plain average,
/// equal-weight merge of chunks).
inline Matrix mc_matrix_mean(std::size_t n, std::uint64_t seed, int threads,
                             int rows, int cols,
                             const std::function<Matrix(Rng &)> &sample) {
    if (n == 0) throw std::invalid_argument("mc_matrix_mean: n must be >= 1");
    auto sizes = detail::chunk_sizes(n, threads);
    std::vector<Matrix> acc(sizes.size(), Matrix::Zero(rows, cols));
    auto run = [&](std::size_t c) {
        Rng rng = make_rng(seed, c);
        for (std::size_t i = 0; i < sizes[c]; ++i) acc[c] += sample(rng);
    };
    if (sizes.size() == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t c = 0; c < sizes.size(); ++c) pool.emplace_back(run, c);
        for (auto &t : pool) t.join();
    }
    Matrix total = Matrix::Zero(rows, cols);
    for (const auto &a : acc) total += a;
    return total / double(n);
}

}  // namespace qcomb
