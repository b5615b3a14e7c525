#include "qcomb/network_sim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qcomb/realization.hpp"
#include "qcomb/tradeoff.hpp"

namespace qcomb {

namespace {

void check_inputs(const Vector &psi, const Matrix &u, const Matrix &uhat,
                  double x, double y) {
    const Eigen::Index d = psi.size();
    if (u.rows() != d || u.cols() != d || uhat.rows() != d || uhat.cols() != d)
        throw std::invalid_argument("evolve_pure: dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("evolve_pure: input is not a unit vector");
    if (std::abs(constraint_residual(x, y, static_cast<int>(d))) > 1e-9)
        throw std::invalid_argument("evolve_pure: constraint violated");
}

/// A_Uhat = y U + x Tr[Uhat^dag U] Uhat.
Matrix conditional_map(const Matrix &u, const Matrix &uhat, double x,
                       double y) {
    return y * u + (x * (uhat.adjoint() * u).trace()) * uhat;
}

}  // namespace

Vector evolve_pure_closed(const Vector &psi, const Matrix &u,
                          const Matrix &uhat, double x, double y) {
    check_inputs(psi, u, uhat, x, y);
    return conditional_map(u, uhat, x, y) * psi;
}

Vector evolve_pure_pipeline(const Vector &psi, const Matrix &u,
                            const Matrix &uhat, double x, double y) {
    check_inputs(psi, u, uhat, x, y);
    const int d = static_cast<int>(psi.size());
    // First isometry, unrestricted: kron(I_1, C1) undoes the ancilla basis.
    IsometryStage st = v1(x, y, d);
    Matrix expand =
        Matrix::Zero(static_cast<Eigen::Index>(d) * d * d, st.v.rows());
    for (int i = 0; i < d; ++i)
        expand.block(static_cast<Eigen::Index>(i) * d * d, i * st.anc_out_dim,
                     d * d, st.anc_out_dim) = st.anc_out_basis;
    Vector joint = expand * (st.v * psi);
    // U on the upper wire (H_1 -> H_2), identity on the primed pair.
    Matrix u_wire = Matrix::Zero(joint.size(), joint.size());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            u_wire.block(static_cast<Eigen::Index>(i) * d * d,
                         static_cast<Eigen::Index>(j) * d * d, d * d, d * d) =
                u(i, j) * Matrix::Identity(d * d, d * d);
    return kraus_of_outcome(uhat, x, y, d) * (u_wire * joint);
}

Vector evolve_pure(const Vector &psi, const Matrix &u, const Matrix &uhat,
                   double x, double y) {
    Vector a = evolve_pure_closed(psi, u, uhat, x, y);
    Vector b = evolve_pure_pipeline(psi, u, uhat, x, y);
    if ((a - b).norm() > 1e-10)
        throw std::runtime_error(
            "evolve_pure: closed form and network pipeline disagree");
    return a;
}

std::pair<Matrix, double> sample_outcome(const Vector &psi, const Matrix &u,
                                         double x, double y, Rng &rng,
                                         RejectionStats *stats) {
    const int d = static_cast<int>(psi.size());
    const double envelope = (y + x * d) * (y + x * d);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
        Matrix uhat = haar_unitary(d, rng);
        double density =
            (conditional_map(u, uhat, x, y) * psi).squaredNorm();
        if (density > envelope * (1.0 + 1e-12))
            throw std::runtime_error("sample_outcome: envelope violated");
        if (stats) ++stats->proposals;
        if (unif(rng) * envelope <= density) {
            if (stats) ++stats->accepts;
            return {uhat, density};
        }
    }
}

Trajectory run_trajectory(const Vector &psi, const Matrix &u, double x,
                          double y, Rng &rng, RejectionStats *stats) {
    Trajectory t;
    t.psi = psi;
    t.u = u;
    std::tie(t.uhat, t.density) = sample_outcome(psi, u, x, y, rng, stats);
    const int d = static_cast<int>(psi.size());
    t.gain = std::norm((t.uhat * u.adjoint()).trace()) / double(d * d);
    t.out = evolve_pure_closed(psi, u, t.uhat, x, y);
    // Pre-measurement joint state (after the first isometry and U).
    IsometryStage st = v1(x, y, d);
    Matrix expand =
        Matrix::Zero(static_cast<Eigen::Index>(d) * d * d, st.v.rows());
    for (int i = 0; i < d; ++i)
        expand.block(static_cast<Eigen::Index>(i) * d * d, i * st.anc_out_dim,
                     d * d, st.anc_out_dim) = st.anc_out_basis;
    Vector after_v1 = expand * (st.v * psi);
    Vector joint = Vector::Zero(after_v1.size());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            joint.segment(static_cast<Eigen::Index>(i) * d * d, d * d) +=
                u(i, j) * after_v1.segment(static_cast<Eigen::Index>(j) * d * d,
                                           d * d);
    t.joint = joint;
    double n2 = t.out.squaredNorm();
    t.fidelity = (n2 > 0) ? std::norm(psi.dot(u.adjoint() * t.out)) / n2 : 0.0;
    return t;
}

namespace {

/// One importance-weighted (w f, (w f)^2, w g, (w g)^2) draw with the
/// maximally entangled input.
Matrix fg_sample(double x, double y, int d, Rng &rng) {
    Matrix u = haar_unitary(d, rng);
    Matrix uhat = haar_unitary(d, rng);
    Matrix a = conditional_map(u, uhat, x, y);
    double w = (a.adjoint() * a).trace().real() / double(d);
    double tr2 = std::norm((u.adjoint() * a).trace());
    double f = (w > 0) ? tr2 / (double(d) * (a.adjoint() * a).trace().real())
                       : 0.0;
    double g = std::norm((uhat * u.adjoint()).trace()) / double(d * d);
    Matrix out(2, 2);
    out << w * f, (w * f) * (w * f), w * g, (w * g) * (w * g);
    return out;
}

MeanEstimate estimate_from_moments(double m1, double m2, std::size_t n) {
    MeanEstimate e;
    e.mean = m1;
    double var = std::max(0.0, m2 - m1 * m1);
    e.stderr_ = (n > 1) ? std::sqrt(var / double(n - 1)) : 0.0;
    e.n = n;
    return e;
}

}  // namespace

FGEstimate estimate_FG_trajectories(double x, double y, int d, std::size_t n,
                                    std::uint64_t seed, int threads) {
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument(
            "estimate_FG_trajectories: constraint violated");
    Matrix m = mc_matrix_mean(n, seed, threads, 2, 2, [=](Rng &rng) {
        return fg_sample(x, y, d, rng);
    });
    FGEstimate out;
    out.f = estimate_from_moments(m(0, 0).real(), m(0, 1).real(), n);
    out.g = estimate_from_moments(m(1, 0).real(), m(1, 1).real(), n);
    return out;
}

MeanEstimate mc_pure_input_fidelity(double x, double y, int d, std::size_t n,
                                    std::uint64_t seed, int threads) {
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument(
            "mc_pure_input_fidelity: constraint violated");
    return mc_mean(n, seed, threads, [=](Rng &rng) {
        Vector psi = random_pure_state(d, rng);
        Matrix u = haar_unitary(d, rng);
        Matrix uhat = haar_unitary(d, rng);
        Matrix a = conditional_map(u, uhat, x, y);
        Vector out = a * psi;
        // weight * conditional fidelity collapses to a single overlap
        return std::norm(psi.dot(u.adjoint() * out));
    });
}

MeanEstimate mc_density_normalization(const Vector &psi, const Matrix &u,
                                      double x, double y, std::size_t n,
                                      std::uint64_t seed, int threads) {
    const int d = static_cast<int>(psi.size());
    return mc_mean(n, seed, threads, [=](Rng &rng) {
        Matrix uhat = haar_unitary(d, rng);
        return (conditional_map(u, uhat, x, y) * psi).squaredNorm();
    });
}

namespace {

nlohmann::json complex_matrix_json(const Matrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string trajectory_json_line(const Trajectory &t, double x, double y,
                                 std::uint64_t seed) {
    nlohmann::json j;
    j["d"] = static_cast<int>(t.psi.size());
    j["x"] = x;
    j["y"] = y;
    j["seed"] = seed;
    j["U"] = complex_matrix_json(t.u);
    j["Uhat"] = complex_matrix_json(t.uhat);
    j["density"] = t.density;
    j["gain"] = t.gain;
    j["fidelity"] = t.fidelity;
    return j.dump();
}

}  // namespace qcomb
