#include "qcomb/comb.hpp"

#include <cmath>
#include <stdexcept>

namespace qcomb {

std::string wire_label(int i) { return std::to_string(i); }

SpaceLayout comb_layout(const std::vector<int> &wire_dims) {
    std::vector<Factor> fs;
    for (int i = static_cast<int>(wire_dims.size()); i-- > 0;)
        fs.push_back({wire_label(i), wire_dims[i]});
    return SpaceLayout{std::move(fs)};
}

ChoiOperator make_choi(LabeledOperator op, const std::string &out_label,
                       const std::string &in_label, double tol) {
    if (!op.layout.has(out_label) || !op.layout.has(in_label))
        throw std::invalid_argument("make_choi: layout lacks out/in label");
    EigResult e = herm_eig(op.mat, std::max(tol, 1e-10));
    if (e.values.minCoeff() < -tol)
        throw std::invalid_argument("make_choi: operator is not PSD");
    LabeledOperator tr_out = partial_trace(op, {out_label});
    bool channel =
        (tr_out.mat - Matrix::Identity(tr_out.dim(), tr_out.dim())).norm() <= tol;
    return {std::move(op), out_label, in_label, channel};
}

ChoiOperator choi_of_unitary(const Matrix &u, const std::string &out_label,
                             const std::string &in_label, double tol) {
    if (u.rows() != u.cols())
        throw std::invalid_argument("choi_of_unitary: non-square input");
    int d = static_cast<int>(u.rows());
    if ((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("choi_of_unitary: input is not unitary");
    Vector k = vectorize(u);
    LabeledOperator op(k * k.adjoint(),
                       SpaceLayout{{out_label, d}, {in_label, d}});
    return make_choi(std::move(op), out_label, in_label, tol);
}

LabeledOperator link(const LabeledOperator &a, const LabeledOperator &b,
                     const std::set<std::string> &connected) {
    for (const auto &l : connected) {
        if (!a.layout.has(l) || !b.layout.has(l))
            throw std::invalid_argument("link: connected label '" + l +
                                        "' missing from an operand");
        if (a.layout.dim_of(l) != b.layout.dim_of(l))
            throw std::invalid_argument("link: dimension mismatch on '" + l + "'");
    }
    std::vector<Factor> a_free, b_free, conn;
    for (const auto &f : a.layout.factors()) {
        if (connected.count(f.label))
            conn.push_back(f);
        else
            a_free.push_back(f);
    }
    for (const auto &f : b.layout.factors()) {
        if (!connected.count(f.label)) {
            if (a.layout.has(f.label))
                throw std::invalid_argument("link: non-connected label '" + f.label +
                                            "' present in both operands");
            b_free.push_back(f);
        }
    }
    // Union layout: A free, connected (A's order), B free.
    std::vector<Factor> ufs = a_free;
    for (const auto &f : conn) ufs.push_back(f);
    for (const auto &f : b_free) ufs.push_back(f);
    SpaceLayout ulay{ufs};

    auto embed = [&](const LabeledOperator &m) {
        std::vector<Factor> missing;
        for (const auto &f : ufs)
            if (!m.layout.has(f.label)) missing.push_back(f);
        LabeledOperator big = m;
        if (!missing.empty())
            big = tensor(m, identity_op(SpaceLayout{missing}));
        return permute_factors(big, ulay.labels());
    };

    LabeledOperator bt = partial_transpose(b, connected);
    LabeledOperator ea = embed(a);
    LabeledOperator eb = embed(bt);
    LabeledOperator prod(ea.mat * eb.mat, ulay);
    return partial_trace(prod, connected);
}

LabeledOperator apply_channel(const ChoiOperator &choi, const Matrix &rho,
                              double tol) {
    int din = choi.op.layout.dim_of(choi.in_label);
    if (rho.rows() != rho.cols() || rho.rows() != din)
        throw std::invalid_argument("apply_channel: state dimension mismatch");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8 ||
        std::abs(rho.trace().real() - 1.0) > std::max(tol, 1e-10) * 10)
        throw std::invalid_argument("apply_channel: rho must be a density operator");
    LabeledOperator state(rho.transpose(), SpaceLayout{{choi.in_label, din}});
    LabeledOperator aligned = permute_factors(
        choi.op, std::vector<std::string>{choi.out_label, choi.in_label});
    int dout = choi.op.layout.dim_of(choi.out_label);
    LabeledOperator e =
        tensor(identity_op(SpaceLayout{{choi.out_label, dout}}), state);
    LabeledOperator prod(aligned.mat * e.mat, aligned.layout);
    return partial_trace(prod, {choi.in_label});
}

CombCheckReport check_deterministic_comb(const LabeledOperator &op, int teeth,
                                         double tol) {
    CombCheckReport rep;
    if (teeth < 1) throw std::invalid_argument("check_deterministic_comb: teeth < 1");
    if (static_cast<int>(op.layout.size()) != 2 * teeth)
        throw std::invalid_argument(
            "check_deterministic_comb: layout must have 2N wires");
    // PSD gate.
    EigResult e = herm_eig(op.mat, std::max(tol, 1e-8));
    double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    if (e.values.minCoeff() < -tol * scale) {
        rep.failed_level = 0;
        rep.residual = -e.values.minCoeff();
        return rep;
    }
    // Canonical wire order 2N-1 ... 0.
    std::vector<std::string> order;
    for (int i = 2 * teeth; i-- > 0;) order.push_back(wire_label(i));
    LabeledOperator cur = permute_factors(op, order);

    rep.ladder.assign(teeth, LabeledOperator{});
    rep.ladder[teeth - 1] = cur;
    for (int k = teeth; k >= 1; --k) {
        const LabeledOperator &rk = rep.ladder[k - 1];
        LabeledOperator t = partial_trace(rk, {wire_label(2 * k - 1)});
        int d_in = t.layout.dim_of(wire_label(2 * k - 2));
        LabeledOperator r_prev = partial_trace(t, {wire_label(2 * k - 2)});
        r_prev.mat /= double(d_in);
        LabeledOperator expect =
            tensor(identity_op(SpaceLayout{{wire_label(2 * k - 2), d_in}}), r_prev);
        double res = (t.mat - expect.mat).norm();
        if (k == 1) {
            // R^(0) must be the scalar 1.
            res = std::hypot(res, std::abs(r_prev.mat(0, 0).real() - 1.0) +
                                      std::abs(r_prev.mat(0, 0).imag()));
            rep.alpha = partial_trace(rk, {wire_label(1)}).mat.trace().real() /
                        double(d_in);
        }
        if (res > tol * scale) {
            rep.failed_level = k;
            rep.residual = res;
            return rep;
        }
        if (k > 1) rep.ladder[k - 2] = r_prev;
    }
    rep.ok = true;
    return rep;
}

Comb make_comb(LabeledOperator op, int teeth, double tol) {
    CombCheckReport rep = check_deterministic_comb(op, teeth, tol);
    if (!rep.ok)
        throw std::invalid_argument(
            "make_comb: normalization ladder failed at level " +
            std::to_string(rep.failed_level) + " (residual " +
            std::to_string(rep.residual) + ")");
    Comb c;
    c.op = rep.ladder[teeth - 1];
    c.teeth = teeth;
    c.ladder = std::move(rep.ladder);
    return c;
}

bool check_dominated(const LabeledOperator &s, const LabeledOperator &r,
                     double tol) {
    LabeledOperator sa = permute_factors(s, r.layout.labels());
    if (!(sa.layout == r.layout))
        throw std::invalid_argument("check_dominated: layout mismatch");
    EigResult e = herm_eig(Matrix(r.mat - sa.mat), 1e-8);
    return e.values.minCoeff() >= -tol;
}

double outcome_density(const LabeledOperator &r_uhat, const Matrix &u,
                       const Matrix &rho) {
    int d = static_cast<int>(u.rows());
    if (r_uhat.layout.total_dim() != d * d * d * d || rho.rows() != d)
        throw std::invalid_argument("outcome_density: dimension mismatch");
    Vector uc = vectorize(u.conjugate());
    LabeledOperator e = tensor(
        tensor(identity_op(SpaceLayout{{"3", d}}),
               LabeledOperator(uc * uc.adjoint(), SpaceLayout{{"2", d}, {"1", d}})),
        LabeledOperator(rho.conjugate(), SpaceLayout{{"0", d}}));
    return trace_product(r_uhat, e).real();
}

LabeledOperator twirl_comb(
    const std::function<LabeledOperator(const Matrix &)> &family,
    const Matrix &uhat, int d, std::size_t n_samples, Rng &rng) {
    SpaceLayout lay{{"3", d}, {"2", d}, {"1", d}, {"0", d}};
    const int D = lay.total_dim();
    Matrix acc = Matrix::Zero(D, D);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Matrix v = haar_unitary(d, rng);
        Matrix w = haar_unitary(d, rng);
        LabeledOperator m = family(v.adjoint() * uhat * w);
        LabeledOperator aligned = permute_factors(m, lay.labels());
        LabeledOperator g =
            tensor(tensor(LabeledOperator(v, SpaceLayout{{"3", d}}),
                          LabeledOperator(v.conjugate(), SpaceLayout{{"2", d}})),
                   tensor(LabeledOperator(w, SpaceLayout{{"1", d}}),
                          LabeledOperator(w.conjugate(), SpaceLayout{{"0", d}})));
        acc += g.mat * aligned.mat * g.mat.adjoint();
    }
    return {acc / double(n_samples), lay};
}

}  // namespace qcomb
