#pragma once

#include <cstdint>
#include <random>

#include "qcomb/tensor.hpp"

namespace qcomb {

using Rng = std::mt19937_64;

/// Seeded generator; stream > 0 derives an independent stream for
/// per-chunk parallel Monte Carlo.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// i.i.d. standard complex Gaussian entries, variance 1.
Matrix ginibre(int d, Rng &rng);

/// Haar-distributed unitary: Ginibre, QR, diagonal-phase correction.
Matrix haar_unitary(int d, Rng &rng);

/// Unit vector distributed as the first column of a Haar unitary.
Vector random_pure_state(int d, Rng &rng);

}  // namespace qcomb
