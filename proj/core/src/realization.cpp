#include "qcomb/realization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qcomb/tradeoff.hpp"

namespace qcomb {

namespace {

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

/// V^[k]_full = {I x [(R^(k)*)^{1/2} (I x (R^(k-1)*)^{-1/2})]} Right_k.
/// Maps H_{2k-2} x Hprev' to H_{2k-1} x (full primed space of level k).
Matrix stage_full(const Matrix &rk_conj, const Matrix &rprev_conj, int dout,
                  int din, double tol) {
    const Eigen::Index dprev = rprev_conj.rows();
    const Eigen::Index dk = static_cast<Eigen::Index>(dout) * din * dprev;
    Matrix right = Matrix::Zero(dout * dk, din * dprev);
    for (int j = 0; j < dout; ++j)
        for (int m = 0; m < din; ++m)
            for (Eigen::Index a = 0; a < dprev; ++a)
                right((static_cast<Eigen::Index>(j) * dout + j) * din * dprev +
                          m * dprev + a,
                      m * dprev + a) = 1.0;
    Matrix inner = psd_power(rk_conj, 0.5, tol) *
                   kron(Matrix::Identity(dout * din, dout * din),
                        psd_power(rprev_conj, -0.5, tol));
    return kron(Matrix::Identity(dout, dout), inner) * right;
}

IsometryStage restrict_stage(int k, int dout, int din, const Matrix &v_full,
                             const Matrix &anc_in_basis,
                             const Matrix &anc_out_basis) {
    IsometryStage st;
    st.index = k;
    st.sys_in_dim = din;
    st.sys_out_dim = dout;
    st.anc_in_dim = static_cast<int>(anc_in_basis.cols());
    st.anc_out_dim = static_cast<int>(anc_out_basis.cols());
    st.anc_in_basis = anc_in_basis;
    st.anc_out_basis = anc_out_basis;
    st.v = kron(Matrix::Identity(dout, dout), anc_out_basis).adjoint() *
           v_full * kron(Matrix::Identity(din, din), anc_in_basis);
    return st;
}

std::string anc_label(int k) { return "a" + std::to_string(k); }

}  // namespace

double isometry_residual(const IsometryStage &stage) {
    const Eigen::Index n = stage.v.cols();
    return (stage.v.adjoint() * stage.v - Matrix::Identity(n, n)).norm();
}

std::vector<IsometryStage> realize(const Comb &comb, double tol) {
    const int n = comb.teeth;
    if (static_cast<int>(comb.ladder.size()) != n)
        throw std::invalid_argument("realize: comb ladder is incomplete");
    std::vector<int> dims(2 * n);
    for (int i = 0; i < 2 * n; ++i)
        dims[i] = comb.op.layout.dim_of(wire_label(i));

    std::vector<IsometryStage> stages;
    Matrix c_prev = Matrix::Identity(1, 1);
    Matrix r_prev = Matrix::Identity(1, 1);
    for (int k = 1; k <= n; ++k) {
        int din = dims[2 * k - 2], dout = dims[2 * k - 1];
        Matrix rk = comb.ladder[k - 1].mat.conjugate();
        Matrix v_full = stage_full(rk, r_prev, dout, din, tol);
        Matrix ck = support_basis(rk, tol);
        IsometryStage st = restrict_stage(k, dout, din, v_full, c_prev, ck);
        double res = isometry_residual(st);
        if (res > 1e-8)
            throw std::runtime_error("realize: stage " + std::to_string(k) +
                                     " is not an isometry (residual " +
                                     std::to_string(res) + ")");
        stages.push_back(std::move(st));
        c_prev = std::move(ck);
        r_prev = std::move(rk);
    }
    return stages;
}

Comb recompose(const std::vector<IsometryStage> &stages,
               const std::vector<int> &wire_dims, double tol) {
    const int n = static_cast<int>(stages.size());
    if (n == 0 || static_cast<int>(wire_dims.size()) != 2 * n)
        throw std::invalid_argument("recompose: need 2 wires per stage");
    for (int k = 1; k <= n; ++k) {
        const IsometryStage &st = stages[k - 1];
        if (st.sys_in_dim != wire_dims[2 * k - 2] ||
            st.sys_out_dim != wire_dims[2 * k - 1])
            throw std::invalid_argument("recompose: wire dimension mismatch at "
                                        "stage " + std::to_string(k));
        if (k > 1 && st.anc_in_dim != stages[k - 2].anc_out_dim)
            throw std::invalid_argument(
                "recompose: ancilla chain broken between stages " +
                std::to_string(k - 1) + " and " + std::to_string(k));
        if (st.v.rows() != static_cast<Eigen::Index>(st.sys_out_dim) * st.anc_out_dim ||
            st.v.cols() != static_cast<Eigen::Index>(st.sys_in_dim) * st.anc_in_dim)
            throw std::invalid_argument("recompose: stage matrix shape mismatch");
    }

    LabeledOperator acc;
    for (int k = 1; k <= n; ++k) {
        const IsometryStage &st = stages[k - 1];
        LabeledMap vk(st.v,
                      SpaceLayout{{wire_label(2 * k - 1), st.sys_out_dim},
                                  {anc_label(k), st.anc_out_dim}},
                      SpaceLayout{{wire_label(2 * k - 2), st.sys_in_dim},
                                  {anc_label(k - 1), st.anc_in_dim}});
        LabeledOperator choi = choi_state(vk);
        if (k == 1)
            acc = partial_trace(choi, {anc_label(0)});
        else
            acc = link(acc, choi, {anc_label(k - 1)});
    }
    acc = partial_trace(acc, {anc_label(n)});
    std::vector<std::string> order;
    for (int i = 2 * n; i-- > 0;) order.push_back(wire_label(i));
    return make_comb(permute_factors(acc, order), n, tol);
}

std::function<Matrix(const Matrix &)> ancilla_povm(
    const std::function<LabeledOperator(const Matrix &)> &family,
    const Comb &r_total, double tol) {
    Matrix rc = r_total.op.mat.conjugate();
    Matrix inv_half = psd_power(rc, -0.5, tol);
    Matrix basis = support_basis(rc, tol);
    std::vector<std::string> order = r_total.op.layout.labels();
    return [family, inv_half, basis, order](const Matrix &uhat) {
        LabeledOperator r_uhat = family(uhat);
        LabeledOperator aligned = permute_factors(r_uhat, order);
        return Matrix(basis.adjoint() * inv_half * aligned.mat.conjugate() *
                      inv_half * basis);
    };
}

Matrix last_ancilla_basis(const Comb &r_total, double tol) {
    return support_basis(r_total.op.mat.conjugate(), tol);
}

ReducedCombOperators r1_operators(double x, double y, int d) {
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("r1_operators: constraint violated");
    Vector ii = max_entangled_ket(d);
    Matrix p = ii * ii.adjoint() / double(d);
    Matrix id = Matrix::Identity(d * d, d * d);
    double dd = d;
    SpaceLayout lay{{"1", d}, {"0", d}};
    Matrix r1 = ((x + dd * y) * (x + dd * y) / dd) * p + (x * x / dd) * (id - p);
    ReducedCombOperators out;
    out.r1 = LabeledOperator(r1, lay);
    // R^(1) is real, so the conjugate powers coincide with the plain ones.
    out.half = LabeledOperator(psd_power(r1, 0.5), lay);
    out.inv_half = LabeledOperator(psd_power(r1, -0.5), lay);
    return out;
}

namespace {

Matrix v1_full(double x, double y, int d) {
    double s = 1.0 / std::sqrt(double(d));
    Matrix v = Matrix::Zero(static_cast<Eigen::Index>(d) * d * d, d);
    for (int m = 0; m < d; ++m)
        for (int j = 0; j < d; ++j) {
            v((m * d + j) * d + j, m) += y * s;
            v((j * d + j) * d + m, m) += x * s;
        }
    return v;
}

Matrix v2_full(double x, double y, int d, double tol) {
    Matrix r = r_total_op(x, y, d).mat;  // real
    Matrix r1 = r1_operators(x, y, d).r1.mat;
    return stage_full(r, r1, d, d, tol);
}

}  // namespace

IsometryStage v1(double x, double y, int d) {
    ReducedCombOperators ops = r1_operators(x, y, d);
    Matrix c1 = support_basis(ops.r1.mat);
    IsometryStage st = restrict_stage(1, d, d, v1_full(x, y, d),
                                      Matrix::Identity(1, 1), c1);
    if (isometry_residual(st) > 1e-8)
        throw std::runtime_error("v1: closed form failed the isometry check");
    return st;
}

IsometryStage v2(double x, double y, int d) {
    Matrix r = r_total_op(x, y, d).mat;
    Matrix c1 = support_basis(r1_operators(x, y, d).r1.mat);
    Matrix c2 = support_basis(r);
    IsometryStage st =
        restrict_stage(2, d, d, v2_full(x, y, d, 1e-10), c1, c2);
    if (isometry_residual(st) > 1e-8)
        throw std::runtime_error("v2: staircase stage failed the isometry check");
    return st;
}

Matrix kraus_of_outcome(const Matrix &uhat, double x, double y, int d) {
    if (uhat.rows() != d || uhat.cols() != d)
        throw std::invalid_argument("kraus_of_outcome: dimension mismatch");
    if ((uhat.adjoint() * uhat - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() >
        1e-10)
        throw std::invalid_argument("kraus_of_outcome: input is not unitary");
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("kraus_of_outcome: constraint violated");
    double s = std::sqrt(double(d));
    Matrix k = Matrix::Zero(d, static_cast<Eigen::Index>(d) * d * d);
    for (int i = 0; i < d; ++i)
        for (int n = 0; n < d; ++n)
            for (int p = 0; p < d; ++p)
                for (int l = 0; l < d; ++l)
                    k(i, (n * d + p) * d + l) =
                        s * std::conj(uhat(n, p)) * uhat(i, l);
    return k;
}

Matrix kraus_via_network(const Matrix &uhat, double x, double y, int d) {
    if (std::abs(constraint_residual(x, y, d)) > 1e-9)
        throw std::invalid_argument("kraus_via_network: constraint violated");
    Matrix r = r_total_op(x, y, d).mat;
    Vector eta = psd_power(Matrix(r.conjugate()), -0.5) *
                 chi_ket(uhat, x, y).conjugate();
    Matrix bra = eta.adjoint();  // 1 x d^4
    return kron(Matrix::Identity(d, d), bra) * v2_full(x, y, d, 1e-10);
}

namespace {

nlohmann::json matrix_json(const Matrix &m) {
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

std::string network_to_json(const RealizedNetwork &net) {
    nlohmann::json j;
    j["d"] = net.d;
    if (net.x) j["x"] = *net.x;
    if (net.y) j["y"] = *net.y;
    j["stages"] = nlohmann::json::array();
    for (const IsometryStage &st : net.stages) {
        nlohmann::json s;
        s["index"] = st.index;
        s["sys_in_dim"] = st.sys_in_dim;
        s["sys_out_dim"] = st.sys_out_dim;
        s["anc_in_dim"] = st.anc_in_dim;
        s["anc_out_dim"] = st.anc_out_dim;
        s["v"] = matrix_json(st.v);
        s["anc_in_basis"] = matrix_json(st.anc_in_basis);
        s["anc_out_basis"] = matrix_json(st.anc_out_basis);
        s["isometry_residual"] = isometry_residual(st);
        j["stages"].push_back(std::move(s));
    }
    j["has_final_measurement"] = static_cast<bool>(net.final_measurement);
    return j.dump(2);
}

}  // namespace qcomb
