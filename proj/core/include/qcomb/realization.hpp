#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/comb.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

/// One isometry V^[k] of the staircase dilation, with its ancilla bases.
/// The matrix maps H_{2k-2} x H_{A_{k-1}} to H_{2k-1} x H_{A_k}; ancilla
/// factors are expressed in the eigenbasis columns of anc_*_basis, which
/// live in the primed copies of wires 0..2k-1.
struct IsometryStage {
    int index = 0;  // k, 1-based
    int sys_in_dim = 0, sys_out_dim = 0;
    int anc_in_dim = 1, anc_out_dim = 1;
    Matrix v;              // (sys_out * anc_out) x (sys_in * anc_in)
    Matrix anc_in_basis;   // primed-space x anc_in_dim
    Matrix anc_out_basis;  // primed-space x anc_out_dim
};

/// ||V^dag V - I|| (Frobenius) on the stage's input space.
double isometry_residual(const IsometryStage &stage);

/// Staircase realization of a deterministic comb (one isometry per tooth).
/// Throws if an intermediate support is numerically inconsistent.
std::vector<IsometryStage> realize(const Comb &comb, double tol = 1e-10);

/// Choi operator of the composed stage network with the last ancilla traced
/// out; layout is the canonical descending wire order. Throws on a stage
/// chain whose dimensions do not match.
Comb recompose(const std::vector<IsometryStage> &stages,
               const std::vector<int> &wire_dims, double tol = 1e-8);

/// POVM on the last ancilla implementing an outcome family dominated by
/// r_total: P = (R*)^{-1/2} R_outcome* (R*)^{-1/2} restricted to Supp(R*).
/// The returned operators are expressed in the ancilla eigenbasis.
std::function<Matrix(const Matrix &)> ancilla_povm(
    const std::function<LabeledOperator(const Matrix &)> &family,
    const Comb &r_total, double tol = 1e-10);

/// Projector-free access to the ancilla basis used by ancilla_povm.
Matrix last_ancilla_basis(const Comb &r_total, double tol = 1e-10);

// --- closed forms for the optimal two-tooth network ----------------------

struct ReducedCombOperators {
    LabeledOperator r1;        // R^(1) on wires (1,0)
    LabeledOperator half;      // (R^(1)*)^{+1/2}
    LabeledOperator inv_half;  // (R^(1)*)^{-1/2}, support-restricted
};

/// R^(1) = ((x+dy)^2/d) P + (x^2/d)(I-P) and its +-1/2 powers.
ReducedCombOperators r1_operators(double x, double y, int d);

/// First isometry: V1|psi> = (y/sqrt d)|psi>_1 |I>>_{1'0'} +
/// (x/sqrt d)|I>>_{1,1'}|psi>_{0'}.
IsometryStage v1(double x, double y, int d);

/// Second isometry, built from the closed-form comb per the staircase
/// expression with the (R*)^{1/2} and (I x R^(1)*)^{-1/2} factors.
IsometryStage v2(double x, double y, int d);

/// Kraus operator of the Bell-measurement + feed-forward instrument:
/// K = sqrt(d) (<<Uhat|_{2,1'} x Uhat T_{3<-0'}), acting on
/// H_2 x H_{1'} x H_{0'} (full primed space, not ancilla-restricted).
/// Independent of (x, y); the parameters are validated only.
Matrix kraus_of_outcome(const Matrix &uhat, double x, double y, int d);

/// Same operator derived through the generic pipeline
/// (I_3 x <eta_Uhat|) V^[2] with |eta> = (R*)^{-1/2} |chi*_Uhat>,
/// embedded back into the full primed input space H_2 x H_{1'} x H_{0'}.
Matrix kraus_via_network(const Matrix &uhat, double x, double y, int d);

/// Serializable network: stages plus trade-off metadata.
struct RealizedNetwork {
    int d = 0;
    std::optional<double> x, y;
    std::vector<IsometryStage> stages;
    std::function<Matrix(const Matrix &)> final_measurement;  // may be empty
};

std::string network_to_json(const RealizedNetwork &net);

}  // namespace qcomb
