#pragma once

#include <iosfwd>
#include <optional>
#include <utility>

#include "qcomb/comb.hpp"
#include "qcomb/mc.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

/// Layout of the two-tooth estimation comb: wires (3,2,1,0), dimension d each.
SpaceLayout four_wire_layout(int d);

/// x^2 + y^2 + 2xy/d - 1.
double constraint_residual(double x, double y, int d);

/// Positive constraint root y(x) for x in [0,1].
double y_from_x(double x, int d);

/// Pointwise gain |Tr[Uhat U^dag]|^2 / d^2.
double gain_fidelity_g(const Matrix &uhat, const Matrix &u);

/// |chi_Uhat> = x |Uhat>>_{3,0}|Uhat*>>_{2,1} + y |I>>_{3,2}|I>>_{1,0}.
Vector chi_ket(const Matrix &uhat, double x, double y);
/// The two pairing kets spanning the optimal seeds: a = chi(I; 1, 0),
/// b = chi(I; 0, 1).
Vector pair_ket_a(int d);
Vector pair_ket_b(int d);

/// Rank-one covariant seed Xi = |chi><chi| with <chi|chi> = d^2 and the
/// outcome family R_Uhat it generates by conjugation.
struct CovariantInstrument {
    int d = 0;
    double x = 0, y = 0;
    LabeledOperator xi;

    LabeledOperator r_uhat(const Matrix &uhat) const;
};

/// Throws if (x, y) violates the constraint by more than 1e-6; renormalizes
/// internally when the violation is below that.
CovariantInstrument instrument_from_xy(double x, double y, int d);

/// Closed-form normalization comb R = integral dUhat R_Uhat (two-block form).
LabeledOperator r_total_op(double x, double y, int d);
Comb r_total(double x, double y, int d);

/// The figure-of-merit operators on wires (3,2,1,0).
struct FigureOfMeritOperators {
    LabeledOperator lambda_f;
    LabeledOperator lambda_g;
    LabeledOperator pair_projector;  // P = d^-1 |I>><<I| on one wire pair
};

FigureOfMeritOperators lambda_ops(int d);

/// F = 1 - (d^2-2) x^2 / d^2, G = (2 - y^2) / d^2.
std::pair<double, double> analytic_FG(double x, double y, int d);

/// I = (G - 1/d^2) d^2, D = (1 - F) / (1 - 2/d^2).
std::pair<double, double> info_disturbance(double f, double g, int d);

/// Lower root of d^2 (D - I)^2 = 4 D (1 - I); upper root behind the flag.
double curve_D_of_I(double info, int d, bool upper_branch = false);
double curve_residual(double info, double dist, int d);

/// Weight p for which (x, y) is the optimal seed (stationarity closed form).
double p_of_xy(double x, double y, int d);

/// One point of the trade-off curve with all derived quantities.
struct TradeoffPoint {
    std::optional<double> p;
    double x = 0, y = 0;
    double F = 0, G = 0;
    double I = 0, D = 0;
};

TradeoffPoint point_from_xy(double x, double y, int d);
TradeoffPoint point_from_x(double x, int d);
TradeoffPoint point_from_info(double info, int d);

/// Diagnostics of the full-space eigensolver route.
struct SeedDiagnostics {
    double overlap_sq = 0.0;   // best squared overlap of the top eigenspace
                               // with span{a, b}
    double gap = 0.0;          // top eigenvalue gap
    bool degenerate = false;   // top eigenvalue cluster larger than one
};

/// p -> (x, y) through the reduced 2x2 pencil in the non-orthogonal basis
/// {|a>, |b>} with Gram <a|b> = d.
TradeoffPoint optimal_seed_for_p(double p, int d);

/// Same point through the full d^4 eigensolver; throws if even the best
/// vector of the top eigenvalue cluster lies outside span{a, b}.
TradeoffPoint optimal_seed_for_p_full(double p, int d,
                                      SeedDiagnostics *diag = nullptr);

/// Monte Carlo over Haar U of d^-2 <U|<U*| R |U>|U*> with the closed-form
/// comb at (x, y).
MeanEstimate mc_F(double x, double y, int d, std::size_t n, std::uint64_t seed,
                  int threads = 1);

/// Importance-sampled double Monte Carlo of the gain; the input state is
/// fixed to rho = I/d (any other rho is rejected).
MeanEstimate mc_G(double x, double y, int d, std::size_t n, std::uint64_t seed,
                  int threads = 1,
                  const std::optional<Matrix> &rho = std::nullopt);

/// F' = d F / (d+1) + 1 / (d+1).
double avg_pure_input_fidelity(double f, int d);

/// CSV rows `I,D,x,y,F,G,p`, 15 significant digits, points uniform in I.
void write_curve_csv(std::ostream &os, int d, int points);

}  // namespace qcomb
