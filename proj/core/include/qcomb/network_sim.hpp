#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "qcomb/mc.hpp"
#include "qcomb/random.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

/// One simulated run of the measure-and-reprepare network on a pure input.
struct Trajectory {
    Vector psi;      // input, unit norm
    Matrix u;        // true unitary
    Matrix uhat;     // sampled outcome
    Vector joint;    // pre-measurement state on H_2 x H_1' x H_0'
    Vector out;      // unnormalized conditional output, d components
    double density = 0.0;     // p(uhat | u, psi) w.r.t. the Haar measure
    double gain = 0.0;        // |Tr[uhat u^dag]|^2 / d^2
    double fidelity = 0.0;    // |<psi| u^dag out>|^2 / ||out||^2
};

/// y U|psi> + x Tr[Uhat^dag U] Uhat|psi> (unnormalized conditional output).
Vector evolve_pure_closed(const Vector &psi, const Matrix &u,
                          const Matrix &uhat, double x, double y);

/// The same vector through the explicit network: first isometry, then U on
/// the upper wire, then the Bell-measurement Kraus operator of outcome Uhat.
Vector evolve_pure_pipeline(const Vector &psi, const Matrix &u,
                            const Matrix &uhat, double x, double y);

/// Computes both routes, throws if they disagree beyond 1e-10, returns the
/// closed form.
Vector evolve_pure(const Vector &psi, const Matrix &u, const Matrix &uhat,
                   double x, double y);

struct RejectionStats {
    std::size_t proposals = 0;
    std::size_t accepts = 0;

    double acceptance_rate() const {
        return proposals ? double(accepts) / double(proposals) : 0.0;
    }
};

/// Samples Uhat with density ||evolve_pure(psi,u,Uhat)||^2 w.r.t. Haar, by
/// rejection with a Haar proposal and envelope M = (y + xd)^2. Throws if a
/// proposed density ever exceeds the envelope.
std::pair<Matrix, double> sample_outcome(const Vector &psi, const Matrix &u,
                                         double x, double y, Rng &rng,
                                         RejectionStats *stats = nullptr);

/// Full trajectory for a sampled outcome.
Trajectory run_trajectory(const Vector &psi, const Matrix &u, double x,
                          double y, Rng &rng, RejectionStats *stats = nullptr);

/// Trajectory-level estimators of (F, G) by importance weighting over Haar
/// (U, Uhat) pairs with the maximally entangled input.
struct FGEstimate {
    MeanEstimate f;
    MeanEstimate g;
};

FGEstimate estimate_FG_trajectories(double x, double y, int d, std::size_t n,
                                    std::uint64_t seed, int threads = 1);

/// Average conditional fidelity over Haar-random pure inputs (the F' figure),
/// by the same importance weighting.
MeanEstimate mc_pure_input_fidelity(double x, double y, int d, std::size_t n,
                                    std::uint64_t seed, int threads = 1);

/// MC normalization check: mean over Haar Uhat of the outcome density.
MeanEstimate mc_density_normalization(const Vector &psi, const Matrix &u,
                                      double x, double y, std::size_t n,
                                      std::uint64_t seed, int threads = 1);

/// One JSON object (single line, no trailing newline) describing a
/// trajectory: d, x, y, seed, U, Uhat as [re,im] entries, density, gain,
/// conditional fidelity.
std::string trajectory_json_line(const Trajectory &t, double x, double y,
                                 std::uint64_t seed);

}  // namespace qcomb
