#include "qcomb/tradeoff.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace qcomb {

namespace {

void require_unitary(const Matrix &u, const char *who) {
    int d = static_cast<int>(u.rows());
    if (u.rows() != u.cols() ||
        (u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument(std::string(who) + ": input is not unitary");
}

void require_dim(int d) {
    if (d < 2 || d > 6)
        throw std::invalid_argument("dimension must be in [2, 6]");
}

/// P = d^-1 |I>><<I| on a labeled wire pair.
LabeledOperator pair_projector_op(const std::string &hi, const std::string &lo,
                                  int d) {
    Vector ii = max_entangled_ket(d);
    return {ii * ii.adjoint() / double(d), SpaceLayout{{hi, d}, {lo, d}}};
}

}  // namespace

SpaceLayout four_wire_layout(int d) {
    return SpaceLayout{{"3", d}, {"2", d}, {"1", d}, {"0", d}};
}

double constraint_residual(double x, double y, int d) {
    return x * x + y * y + 2.0 * x * y / double(d) - 1.0;
}

double y_from_x(double x, int d) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("y_from_x: x must be in [0, 1]");
    double disc = x * x / double(d * d) + 1.0 - x * x;
    return -x / double(d) + std::sqrt(disc);
}

double gain_fidelity_g(const Matrix &uhat, const Matrix &u) {
    require_unitary(uhat, "gain_fidelity_g");
    require_unitary(u, "gain_fidelity_g");
    int d = static_cast<int>(u.rows());
    Complex t = (uhat * u.adjoint()).trace();
    return std::norm(t) / double(d * d);
}

Vector chi_ket(const Matrix &uhat, double x, double y) {
    int d = static_cast<int>(uhat.rows());
    // Layout (3,2,1,0): index ((n3*d + n2)*d + n1)*d + n0.
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d * d * d);
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q)
                    v[((n * d + p) * d + q) * d + m] +=
                        x * uhat(n, m) * std::conj(uhat(p, q));
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) v[((n * d + n) * d + m) * d + m] += y;
    return v;
}

Vector pair_ket_a(int d) { return chi_ket(Matrix::Identity(d, d), 1.0, 0.0); }
Vector pair_ket_b(int d) { return chi_ket(Matrix::Identity(d, d), 0.0, 1.0); }

LabeledOperator CovariantInstrument::r_uhat(const Matrix &uhat) const {
    require_unitary(uhat, "CovariantInstrument::r_uhat");
    Vector c = chi_ket(uhat, x, y);
    return {c * c.adjoint(), four_wire_layout(d)};
}

CovariantInstrument instrument_from_xy(double x, double y, int d) {
    require_dim(d);
    if (x < 0 || y < 0)
        throw std::invalid_argument("instrument_from_xy: x, y must be nonnegative");
    double res = constraint_residual(x, y, d);
    if (std::abs(res) > 1e-6)
        throw std::invalid_argument(
            "instrument_from_xy: constraint violated by " + std::to_string(res));
    if (std::abs(res) > 1e-9) {
        double s = 1.0 / std::sqrt(1.0 + res);
        x *= s;
        y *= s;
    }
    CovariantInstrument inst;
    inst.d = d;
    inst.x = x;
    inst.y = y;
    Vector c = chi_ket(Matrix::Identity(d, d), x, y);
    inst.xi = LabeledOperator(c * c.adjoint(), four_wire_layout(d));
    return inst;
}

LabeledOperator r_total_op(double x, double y, int d) {
    require_dim(d);
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("r_total_op: constraint violated");
    double dd = d;
    double a = x * x * dd * dd / (dd * dd - 1) + y * y * dd * dd + 2 * x * y * dd;
    double b = x * x / (dd * dd - 1);
    LabeledOperator p32 = pair_projector_op("3", "2", d);
    LabeledOperator p10 = pair_projector_op("1", "0", d);
    LabeledOperator i32 = identity_op(SpaceLayout{{"3", d}, {"2", d}});
    LabeledOperator i10 = identity_op(SpaceLayout{{"1", d}, {"0", d}});
    Matrix m = a * tensor(p32, p10).mat + b * (tensor(i32, i10).mat -
                                               tensor(p32, i10).mat -
                                               tensor(i32, p10).mat);
    return {std::move(m), four_wire_layout(d)};
}

Comb r_total(double x, double y, int d) {
    return make_comb(r_total_op(x, y, d), 2, 1e-10);
}

FigureOfMeritOperators lambda_ops(int d) {
    require_dim(d);
    double dd = d;
    double norm = 1.0 / (dd * dd * (dd * dd - 1));
    LabeledOperator p32 = pair_projector_op("3", "2", d);
    LabeledOperator p10 = pair_projector_op("1", "0", d);
    LabeledOperator p21 = pair_projector_op("2", "1", d);
    LabeledOperator i32 = identity_op(SpaceLayout{{"3", d}, {"2", d}});
    LabeledOperator i10 = identity_op(SpaceLayout{{"1", d}, {"0", d}});
    LabeledOperator i3 = identity_op(SpaceLayout{{"3", d}});
    LabeledOperator i0 = identity_op(SpaceLayout{{"0", d}});
    SpaceLayout lay = four_wire_layout(d);

    Matrix lf = norm * (tensor(i32, i10).mat + dd * dd * tensor(p32, p10).mat -
                        tensor(p32, i10).mat - tensor(i32, p10).mat);
    Matrix lg = norm * ((1.0 - 2.0 / (dd * dd)) * tensor(i32, i10).mat +
                        tensor(tensor(i3, p21), i0).mat);
    FigureOfMeritOperators out;
    out.lambda_f = LabeledOperator(std::move(lf), lay);
    out.lambda_g = LabeledOperator(std::move(lg), lay);
    out.pair_projector = p10;
    return out;
}

std::pair<double, double> analytic_FG(double x, double y, int d) {
    double dd = d;
    return {1.0 - (dd * dd - 2.0) * x * x / (dd * dd),
            (2.0 - y * y) / (dd * dd)};
}

std::pair<double, double> info_disturbance(double f, double g, int d) {
    double dd = d;
    double gmin = 1.0 / (dd * dd), gmax = 2.0 / (dd * dd);
    double fmin = 2.0 / (dd * dd), fmax = 1.0;
    if (g < gmin - 1e-9 || g > gmax + 1e-9 || f < fmin - 1e-9 || f > fmax + 1e-9)
        throw std::invalid_argument("info_disturbance: (F, G) out of range");
    return {(g - gmin) / (gmax - gmin), (fmax - f) / (fmax - fmin)};
}

double curve_D_of_I(double info, int d, bool upper_branch) {
    if (info < 0.0 || info > 1.0)
        throw std::invalid_argument("curve_D_of_I: I must be in [0, 1]");
    double dd = double(d) * double(d);
    double b = 2.0 * dd * info + 4.0 - 4.0 * info;
    double disc = b * b - 4.0 * dd * dd * info * info;
    double root = std::sqrt(std::max(0.0, disc));
    return upper_branch ? (b + root) / (2.0 * dd) : (b - root) / (2.0 * dd);
}

double curve_residual(double info, double dist, int d) {
    double dd = double(d) * double(d);
    return dd * (dist - info) * (dist - info) - 4.0 * dist * (1.0 - info);
}

double p_of_xy(double x, double y, int d) {
    double dd = d;
    double num = (dd * dd - 2.0) * x * (y + x / dd);
    double den = num + y * (x + y / dd);
    return num / den;
}

TradeoffPoint point_from_xy(double x, double y, int d) {
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("point_from_xy: constraint violated");
    TradeoffPoint pt;
    pt.x = x;
    pt.y = y;
    auto [f, g] = analytic_FG(x, y, d);
    pt.F = f;
    pt.G = g;
    std::tie(pt.I, pt.D) = info_disturbance(f, g, d);
    pt.p = p_of_xy(x, y, d);
    return pt;
}

TradeoffPoint point_from_x(double x, int d) {
    return point_from_xy(x, y_from_x(x, d), d);
}

TradeoffPoint point_from_info(double info, int d) {
    double dist = curve_D_of_I(info, d);
    TradeoffPoint pt;
    pt.x = std::sqrt(dist);
    pt.y = std::sqrt(1.0 - info);
    auto [f, g] = analytic_FG(pt.x, pt.y, d);
    pt.F = f;
    pt.G = g;
    pt.I = info;
    pt.D = dist;
    pt.p = p_of_xy(pt.x, pt.y, d);
    return pt;
}

TradeoffPoint optimal_seed_for_p(double p, int d) {
    require_dim(d);
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("optimal_seed_for_p: p must be in [0, 1]");
    FigureOfMeritOperators fom = lambda_ops(d);
    Matrix m = p * fom.lambda_g.mat + (1.0 - p) * fom.lambda_f.mat;
    Vector a = pair_ket_a(d), b = pair_ket_b(d);
    Eigen::Matrix2cd mab, gram;
    mab << a.dot(m * a), a.dot(m * b), b.dot(m * a), b.dot(m * b);
    gram << a.dot(a), a.dot(b), b.dot(a), b.dot(b);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2cd> es(mab, gram);
    Eigen::Vector2cd c = es.eigenvectors().col(1);  // top eigenvalue
    // Global phase: make the dominant coefficient real positive.
    int imax = (std::abs(c[0]) >= std::abs(c[1])) ? 0 : 1;
    c *= std::conj(c[imax]) / std::abs(c[imax]);
    double cx = c[0].real(), cy = c[1].real();
    if (std::abs(c[0].imag()) > 1e-9 || std::abs(c[1].imag()) > 1e-9 ||
        cx < -1e-8 || cy < -1e-8)
        throw std::runtime_error("optimal_seed_for_p: eigenvector is not of the "
                                 "expected nonnegative real form");
    cx = std::max(0.0, cx);
    cy = std::max(0.0, cy);
    // Normalize <chi|chi> = d^2, i.e. the constraint.
    double nrm = std::sqrt(cx * cx + cy * cy + 2.0 * cx * cy / double(d));
    cx /= nrm;
    cy /= nrm;
    TradeoffPoint pt = point_from_xy(cx, cy, d);
    pt.p = p;
    return pt;
}

TradeoffPoint optimal_seed_for_p_full(double p, int d, SeedDiagnostics *diag) {
    require_dim(d);
    FigureOfMeritOperators fom = lambda_ops(d);
    Matrix m = p * fom.lambda_g.mat + (1.0 - p) * fom.lambda_f.mat;
    EigResult e = herm_eig(m, 1e-10);
    const Eigen::Index n = e.values.size();
    double top = e.values[n - 1];
    double scale = std::max(1.0, std::abs(top));
    double cluster_tol = 1e-10 * scale;
    Eigen::Index first = n - 1;
    while (first > 0 && top - e.values[first - 1] <= cluster_tol) --first;
    Matrix cluster = e.vectors.rightCols(n - first);

    // Orthonormal basis of span{a, b}.
    Vector a = pair_ket_a(d), b = pair_ket_b(d);
    Matrix span(a.size(), 2);
    span.col(0) = a;
    span.col(1) = b;
    Eigen::HouseholderQR<Matrix> qr(span);
    Matrix q = qr.householderQ() * Matrix::Identity(a.size(), 2);

    // Best vector of the top eigenspace inside the span: top singular pair.
    Matrix overlap = q.adjoint() * cluster;  // 2 x m
    Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double smax = svd.singularValues()[0];
    Vector best = cluster * svd.matrixV().col(0);

    if (diag) {
        diag->overlap_sq = smax * smax;
        diag->gap = (first > 0) ? top - e.values[first - 1] : 0.0;
        diag->degenerate = (n - first) > 1;
    }
    if (smax * smax < 1.0 - 1e-10)
        throw std::runtime_error(
            "optimal_seed_for_p_full: top eigenvalue cluster lies outside "
            "span{|a>,|b>} (overlap^2 = " + std::to_string(smax * smax) + ")");

    // Coefficients in the non-orthogonal {a, b} basis.
    Eigen::Matrix2cd gram;
    gram << a.dot(a), a.dot(b), b.dot(a), b.dot(b);
    Eigen::Vector2cd rhs(a.dot(best), b.dot(best));
    Eigen::Vector2cd c = gram.fullPivLu().solve(rhs);
    int imax = (std::abs(c[0]) >= std::abs(c[1])) ? 0 : 1;
    c *= std::conj(c[imax]) / std::abs(c[imax]);
    double cx = std::max(0.0, c[0].real()), cy = std::max(0.0, c[1].real());
    double nrm = std::sqrt(cx * cx + cy * cy + 2.0 * cx * cy / double(d));
    TradeoffPoint pt = point_from_xy(cx / nrm, cy / nrm, d);
    pt.p = p;
    return pt;
}

MeanEstimate mc_F(double x, double y, int d, std::size_t n, std::uint64_t seed,
                  int threads) {
    Matrix r = r_total_op(x, y, d).mat;
    double dd = d;
    return mc_mean(n, seed, threads, [&, r](Rng &rng) {
        Matrix u = haar_unitary(d, rng);
        Vector psi = chi_ket(u, 1.0, 0.0);  // |U>>_{3,0} |U*>>_{2,1}
        return (psi.dot(r * psi)).real() / (dd * dd);
    });
}

MeanEstimate mc_G(double x, double y, int d, std::size_t n, std::uint64_t seed,
                  int threads, const std::optional<Matrix> &rho) {
    if (rho) {
        Matrix expect = Matrix::Identity(d, d) / double(d);
        if (rho->rows() != d || rho->cols() != d ||
            (*rho - expect).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("mc_G: only rho = I/d is supported");
    }
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("mc_G: constraint violated");
    double dd = d;
    return mc_mean(n, seed, threads, [=](Rng &rng) {
        Matrix u = haar_unitary(d, rng);
        Matrix uh = haar_unitary(d, rng);
        Complex tr = (uh.adjoint() * u).trace();
        Matrix a = y * u + (x * tr) * uh;
        double weight = (a.adjoint() * a).trace().real() / dd;  // p(Uhat|U, I/d)
        double g = std::norm(tr) / (dd * dd);
        return weight * g;
    });
}

double avg_pure_input_fidelity(double f, int d) {
    if (f < 0.0 || f > 1.0)
        throw std::invalid_argument("avg_pure_input_fidelity: F out of range");
    return double(d) * f / double(d + 1) + 1.0 / double(d + 1);
}

void write_curve_csv(std::ostream &os, int d, int points) {
    if (points < 2)
        throw std::invalid_argument("write_curve_csv: need at least 2 points");
    os << "I,D,x,y,F,G,p\n";
    os << std::setprecision(15);
    for (int i = 0; i < points; ++i) {
        double info = double(i) / double(points - 1);
        TradeoffPoint pt = point_from_info(info, d);
        os << pt.I << ',' << pt.D << ',' << pt.x << ',' << pt.y << ',' << pt.F
           << ',' << pt.G << ',' << *pt.p << '\n';
    }
}

}  // namespace qcomb
