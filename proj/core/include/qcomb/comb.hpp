#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/random.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

/// Wire label convention for combs: wire i is the factor named
/// std::to_string(i); even wires are inputs, odd wires outputs, and comb
/// operators carry their wires in descending order (2N-1, ..., 0).
std::string wire_label(int i);
SpaceLayout comb_layout(const std::vector<int> &wire_dims);

/// Choi operator of a completely positive map, layout (out, in).
struct ChoiOperator {
    LabeledOperator op;
    std::string out_label;
    std::string in_label;
    bool channel = false;  // Tr_out = I_in within tolerance
};

ChoiOperator choi_of_unitary(const Matrix &u, const std::string &out_label = "1",
                             const std::string &in_label = "0",
                             double tol = 1e-10);

ChoiOperator make_choi(LabeledOperator op, const std::string &out_label,
                       const std::string &in_label, double tol = 1e-10);

/// Link product Tr_J[(A x I_L)(I_K x B^{T_J})]. Result layout: A's free
/// factors in A's order, then B's free factors in B's order.
LabeledOperator link(const LabeledOperator &a, const LabeledOperator &b,
                     const std::set<std::string> &connected);

/// E(rho) = Tr_in[choi (I_out x rho^T)].
LabeledOperator apply_channel(const ChoiOperator &choi, const Matrix &rho,
                              double tol = 1e-10);

/// Result of the normalization-ladder verification of Eq-style
/// Tr_{2k-1}[R^(k)] = I_{2k-2} x R^(k-1), R^(0) = 1.
struct CombCheckReport {
    bool ok = false;
    int failed_level = -1;        // 1..N when a level fails, 0 for PSD failure
    double residual = 0.0;        // Frobenius residual at the failed level
    std::vector<LabeledOperator> ladder;  // ladder[k-1] = R^(k), k = 1..N
    double alpha = 0.0;           // Tr[R^(1)] / d_0
};

CombCheckReport check_deterministic_comb(const LabeledOperator &op, int teeth,
                                         double tol = 1e-10);

/// Deterministic comb on wires 0..2N-1 with its verified ladder.
struct Comb {
    LabeledOperator op;
    int teeth = 0;
    std::vector<LabeledOperator> ladder;
};

/// Builds a Comb, throwing if the ladder verification fails.
Comb make_comb(LabeledOperator op, int teeth, double tol = 1e-10);

/// True iff R - S >= -tol (dominance witness for probabilistic combs).
bool check_dominated(const LabeledOperator &s, const LabeledOperator &r,
                     double tol = 1e-10);

/// Density of outcome Uhat w.r.t. dUhat:
/// Tr[R_Uhat (I_3 x |U*>><<U*|_{2,1} x rho*_0)]. Layout (3,2,1,0).
double outcome_density(const LabeledOperator &r_uhat, const Matrix &u,
                       const Matrix &rho);

/// Monte Carlo group average of a 2-tooth outcome family:
/// (1/N) sum_{V,W} (V_3 x V*_2 x W_1 x W*_0) family(V^dag Uhat W) (.)^dag.
LabeledOperator twirl_comb(
    const std::function<LabeledOperator(const Matrix &)> &family,
    const Matrix &uhat, int d, std::size_t n_samples, Rng &rng);

}  // namespace qcomb
