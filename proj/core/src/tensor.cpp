#include "qcomb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace qcomb {

SpaceLayout::SpaceLayout(std::initializer_list<Factor> factors)
    : factors_(factors) {
    validate();
}

SpaceLayout::SpaceLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
    validate();
}

void SpaceLayout::validate() {
    std::unordered_set<std::string> seen;
    long long total = 1;
    for (const auto &f : factors_) {
        if (f.dim <= 0)
            throw std::invalid_argument("SpaceLayout: nonpositive dimension for '" +
                                        f.label + "'");
        if (!seen.insert(f.label).second)
            throw std::invalid_argument("SpaceLayout: duplicate label '" + f.label +
                                        "'");
        total *= f.dim;
        if (total > kMaxTotalDim)
            throw std::invalid_argument(
                "SpaceLayout: total dimension exceeds dense limit " +
                std::to_string(kMaxTotalDim));
    }
    total_dim_ = static_cast<int>(total);
}

bool SpaceLayout::has(const std::string &label) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [&](const Factor &f) { return f.label == label; });
}

std::size_t SpaceLayout::index_of(const std::string &label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label == label) return i;
    throw std::invalid_argument("SpaceLayout: unknown label '" + label + "'");
}

int SpaceLayout::dim_of(const std::string &label) const {
    return factors_[index_of(label)].dim;
}

std::vector<std::string> SpaceLayout::labels() const {
    std::vector<std::string> out;
    out.reserve(factors_.size());
    for (const auto &f : factors_) out.push_back(f.label);
    return out;
}

bool SpaceLayout::operator==(const SpaceLayout &other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != other.factors_[i].label ||
            factors_[i].dim != other.factors_[i].dim)
            return false;
    return true;
}

LabeledOperator::LabeledOperator(Matrix m, SpaceLayout l)
    : mat(std::move(m)), layout(std::move(l)) {
    if (mat.rows() != mat.cols())
        throw std::invalid_argument("LabeledOperator: matrix must be square");
    if (mat.rows() != layout.total_dim())
        throw std::invalid_argument(
            "LabeledOperator: matrix side does not match layout dimension");
}

LabeledMap::LabeledMap(Matrix m, SpaceLayout o, SpaceLayout i)
    : mat(std::move(m)), out(std::move(o)), in(std::move(i)) {
    if (mat.rows() != out.total_dim() || mat.cols() != in.total_dim())
        throw std::invalid_argument("LabeledMap: matrix shape does not match layouts");
}

// --- vectorization -------------------------------------------------------

Vector vectorize(const Matrix &a) {
    Vector v(a.rows() * a.cols());
    for (Eigen::Index n = 0; n < a.rows(); ++n)
        for (Eigen::Index m = 0; m < a.cols(); ++m) v[n * a.cols() + m] = a(n, m);
    return v;
}

Matrix devectorize(const Vector &v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("devectorize: size mismatch");
    Matrix a(rows, cols);
    for (int n = 0; n < rows; ++n)
        for (int m = 0; m < cols; ++m) a(n, m) = v[n * cols + m];
    return a;
}

Matrix devectorize(const Vector &v) {
    int d = static_cast<int>(std::llround(std::sqrt(double(v.size()))));
    if (static_cast<Eigen::Index>(d) * d != v.size())
        throw std::invalid_argument("devectorize: length is not a perfect square");
    return devectorize(v, d, d);
}

Vector max_entangled_ket(int d) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    for (int k = 0; k < d; ++k) v[k * d + k] = 1.0;
    return v;
}

// --- labeled algebra -----------------------------------------------------

namespace detail {
std::vector<int> strides(const SpaceLayout &layout) {
    std::vector<int> s(layout.size());
    int acc = 1;
    for (std::size_t i = layout.size(); i-- > 0;) {
        s[i] = acc;
        acc *= layout.factor(i).dim;
    }
    return s;
}
}  // namespace detail

LabeledOperator tensor(const LabeledOperator &a, const LabeledOperator &b) {
    std::vector<Factor> fs = a.layout.factors();
    for (const auto &f : b.layout.factors()) fs.push_back(f);
    SpaceLayout layout(std::move(fs));
    Matrix m(layout.total_dim(), layout.total_dim());
    const Eigen::Index db = b.mat.rows();
    for (Eigen::Index i = 0; i < a.mat.rows(); ++i)
        for (Eigen::Index j = 0; j < a.mat.cols(); ++j)
            m.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
    return {std::move(m), std::move(layout)};
}

LabeledOperator identity_op(const SpaceLayout &layout) {
    return {Matrix::Identity(layout.total_dim(), layout.total_dim()), layout};
}

LabeledOperator conj(const LabeledOperator &a) {
    return {a.mat.conjugate(), a.layout};
}

LabeledOperator adjoint(const LabeledOperator &a) {
    return {a.mat.adjoint(), a.layout};
}

namespace {

void check_known(const SpaceLayout &layout, const std::set<std::string> &labels) {
    for (const auto &l : labels)
        if (!layout.has(l))
            throw std::invalid_argument("unknown label '" + l + "'");
}

// Decompose a flat index into per-factor digits.
void digits_of(int idx, const std::vector<int> &dims, std::vector<int> &out) {
    for (std::size_t i = dims.size(); i-- > 0;) {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
}

}  // namespace

LabeledOperator partial_trace(const LabeledOperator &op,
                              const std::set<std::string> &labels) {
    check_known(op.layout, labels);
    const auto &fs = op.layout.factors();
    std::vector<Factor> kept;
    std::vector<int> dims;
    std::vector<bool> traced(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        dims.push_back(fs[i].dim);
        traced[i] = labels.count(fs[i].label) > 0;
        if (!traced[i]) kept.push_back(fs[i]);
    }
    SpaceLayout out_layout{std::vector<Factor>(kept)};
    const int D = op.layout.total_dim();
    // For each full index, its kept-part flat index and traced-part flat index.
    std::vector<int> kept_of(D), tr_of(D), dg(fs.size());
    for (int f = 0; f < D; ++f) {
        digits_of(f, dims, dg);
        int k = 0, t = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (traced[i])
                t = t * dims[i] + dg[i];
            else
                k = k * dims[i] + dg[i];
        }
        kept_of[f] = k;
        tr_of[f] = t;
    }
    Matrix m = Matrix::Zero(out_layout.total_dim(), out_layout.total_dim());
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
            if (tr_of[r] == tr_of[c]) m(kept_of[r], kept_of[c]) += op.mat(r, c);
    return {std::move(m), std::move(out_layout)};
}

LabeledOperator partial_transpose(const LabeledOperator &op,
                                  const std::set<std::string> &labels) {
    check_known(op.layout, labels);
    const auto &fs = op.layout.factors();
    std::vector<int> dims;
    std::vector<bool> tp(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        dims.push_back(fs[i].dim);
        tp[i] = labels.count(fs[i].label) > 0;
    }
    const int D = op.layout.total_dim();
    Matrix m(D, D);
    std::vector<int> rd(fs.size()), cd(fs.size());
    for (int r = 0; r < D; ++r) {
        digits_of(r, dims, rd);
        for (int c = 0; c < D; ++c) {
            digits_of(c, dims, cd);
            int rr = 0, cc = 0;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                rr = rr * dims[i] + (tp[i] ? cd[i] : rd[i]);
                cc = cc * dims[i] + (tp[i] ? rd[i] : cd[i]);
            }
            m(rr, cc) = op.mat(r, c);
        }
    }
    return {std::move(m), op.layout};
}

LabeledOperator permute_factors(const LabeledOperator &op,
                                const std::vector<std::string> &new_order) {
    const auto &fs = op.layout.factors();
    if (new_order.size() != fs.size())
        throw std::invalid_argument("permute_factors: order size mismatch");
    std::vector<std::size_t> perm;  // perm[i] = old position of new factor i
    std::vector<bool> used(fs.size(), false);
    std::vector<Factor> new_fs;
    for (const auto &l : new_order) {
        std::size_t p = op.layout.index_of(l);
        if (used[p]) throw std::invalid_argument("permute_factors: repeated label");
        used[p] = true;
        perm.push_back(p);
        new_fs.push_back(fs[p]);
    }
    SpaceLayout out_layout{std::move(new_fs)};
    std::vector<int> dims;
    for (const auto &f : fs) dims.push_back(f.dim);
    const int D = op.layout.total_dim();
    std::vector<int> map(D), dg(fs.size());
    std::vector<int> new_dims(fs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) new_dims[i] = dims[perm[i]];
    for (int f = 0; f < D; ++f) {
        digits_of(f, dims, dg);
        int n = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) n = n * new_dims[i] + dg[perm[i]];
        map[f] = n;
    }
    Matrix m(D, D);
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) m(map[r], map[c]) = op.mat(r, c);
    return {std::move(m), std::move(out_layout)};
}

Complex trace_product(const LabeledOperator &a, const LabeledOperator &b) {
    LabeledOperator bb = (a.layout == b.layout)
                             ? b
                             : permute_factors(b, a.layout.labels());
    if (!(bb.layout == a.layout))
        throw std::invalid_argument("trace_product: incompatible layouts");
    return (a.mat.transpose().cwiseProduct(bb.mat)).sum();
}

// --- spectral ------------------------------------------------------------

EigResult herm_eig(const Matrix &a, double herm_tol) {
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (dev > herm_tol * scale)
        throw std::invalid_argument("herm_eig: matrix is not Hermitian (dev=" +
                                    std::to_string(dev) + ")");
    Eigen::SelfAdjointEigenSolver<Matrix> es((a + Matrix(a.adjoint())) / 2.0);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("herm_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

EigResult herm_eig(const LabeledOperator &a, double herm_tol) {
    return herm_eig(a.mat, herm_tol);
}

Matrix psd_power(const Matrix &a, double exponent, double tol) {
    EigResult e = herm_eig(a, std::max(tol, 1e-10));
    const double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
    if (lmax < 0)
        throw std::invalid_argument("psd_power: negative definite input");
    const double cut = tol * std::max(lmax, 0.0);
    if (e.values.minCoeff() < -100.0 * std::max(cut, tol))
        throw std::invalid_argument("psd_power: significantly negative eigenvalue " +
                                    std::to_string(e.values.minCoeff()));
    Matrix out = Matrix::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        double l = e.values[i];
        if (l <= cut) continue;  // support restriction
        out += std::pow(l, exponent) * (e.vectors.col(i) * e.vectors.col(i).adjoint());
    }
    return out;
}

LabeledOperator psd_power(const LabeledOperator &a, double exponent, double tol) {
    return {psd_power(a.mat, exponent, tol), a.layout};
}

Matrix support_basis(const Matrix &a, double tol) {
    EigResult e = herm_eig(a, std::max(tol, 1e-10));
    const double cut = tol * std::max(e.values.maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        if (e.values[i] > cut) keep.push_back(i);
    Matrix b(a.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) b.col(i) = e.vectors.col(keep[i]);
    return b;
}

// --- labeled maps --------------------------------------------------------

LabeledMap teleportation_op(const std::string &from_label,
                            const std::string &to_label, int d) {
    if (d <= 0) throw std::invalid_argument("teleportation_op: bad dimension");
    return {Matrix::Identity(d, d), SpaceLayout{{to_label, d}},
            SpaceLayout{{from_label, d}}};
}

LabeledMap tensor(const LabeledMap &a, const LabeledMap &b) {
    std::vector<Factor> of = a.out.factors(), inf = a.in.factors();
    for (const auto &f : b.out.factors()) of.push_back(f);
    for (const auto &f : b.in.factors()) inf.push_back(f);
    SpaceLayout out(std::move(of)), in(std::move(inf));
    Matrix m(out.total_dim(), in.total_dim());
    const Eigen::Index rb = b.mat.rows(), cb = b.mat.cols();
    for (Eigen::Index i = 0; i < a.mat.rows(); ++i)
        for (Eigen::Index j = 0; j < a.mat.cols(); ++j)
            m.block(i * rb, j * cb, rb, cb) = a.mat(i, j) * b.mat;
    return {std::move(m), std::move(out), std::move(in)};
}

LabeledOperator choi_state(const LabeledMap &v) {
    Vector k = vectorize(v.mat);
    std::vector<Factor> fs = v.out.factors();
    for (const auto &f : v.in.factors()) fs.push_back(f);
    return {k * k.adjoint(), SpaceLayout{std::move(fs)}};
}

}  // namespace qcomb
