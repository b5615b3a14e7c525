#pragma once

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <string>
#include <vector>

namespace qcomb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// One named tensor factor of a composite Hilbert space.
struct Factor {
    std::string label;
    int dim = 0;
};

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant index (kron order). Labels must be unique; the total
/// dimension is capped so that everything stays dense and fast.
class SpaceLayout {
  public:
    static constexpr int kMaxTotalDim = 1296;  // d^4 at d = 6

    SpaceLayout() = default;
    SpaceLayout(std::initializer_list<Factor> factors);
    explicit SpaceLayout(std::vector<Factor> factors);

    int total_dim() const { return total_dim_; }
    std::size_t size() const { return factors_.size(); }
    const Factor &factor(std::size_t i) const { return factors_[i]; }
    const std::vector<Factor> &factors() const { return factors_; }

    bool has(const std::string &label) const;
    /// Position of a factor; throws std::invalid_argument on unknown label.
    std::size_t index_of(const std::string &label) const;
    int dim_of(const std::string &label) const;
    std::vector<std::string> labels() const;

    bool operator==(const SpaceLayout &other) const;

  private:
    void validate();
    std::vector<Factor> factors_;
    int total_dim_ = 1;
};

/// Dense complex square matrix together with the layout of its factors.
struct LabeledOperator {
    Matrix mat;
    SpaceLayout layout;

    LabeledOperator() = default;
    LabeledOperator(Matrix m, SpaceLayout l);

    int dim() const { return static_cast<int>(mat.rows()); }
};

/// Rectangular map between two labeled spaces (isometries, teleportation).
struct LabeledMap {
    Matrix mat;
    SpaceLayout out;
    SpaceLayout in;

    LabeledMap() = default;
    LabeledMap(Matrix m, SpaceLayout o, SpaceLayout i);
};

// --- vectorization -------------------------------------------------------

/// |A>> = sum_nm <n|A|m> |n>|m> in the fixed computational basis.
/// Works for rectangular A; the row index is the more significant one.
Vector vectorize(const Matrix &a);
Matrix devectorize(const Vector &v, int rows, int cols);
/// Square devectorize; the length must be a perfect square.
Matrix devectorize(const Vector &v);

/// Unnormalized maximally entangled ket |I>> in C^{d^2}.
Vector max_entangled_ket(int d);

// --- labeled algebra -----------------------------------------------------

LabeledOperator tensor(const LabeledOperator &a, const LabeledOperator &b);
LabeledOperator identity_op(const SpaceLayout &layout);
LabeledOperator conj(const LabeledOperator &a);
LabeledOperator adjoint(const LabeledOperator &a);

LabeledOperator partial_trace(const LabeledOperator &op,
                              const std::set<std::string> &labels);
LabeledOperator partial_transpose(const LabeledOperator &op,
                                  const std::set<std::string> &labels);
LabeledOperator permute_factors(const LabeledOperator &op,
                                const std::vector<std::string> &new_order);

/// Tr[A B] with B's factors aligned to A's layout by permutation.
Complex trace_product(const LabeledOperator &a, const LabeledOperator &b);

// --- spectral ------------------------------------------------------------

struct EigResult {
    RealVector values;  // ascending
    Matrix vectors;     // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix; throws if ||A - A^dag||_inf
/// exceeds herm_tol (relative to the largest entry, with absolute floor).
EigResult herm_eig(const Matrix &a, double herm_tol = 1e-10);
EigResult herm_eig(const LabeledOperator &a, double herm_tol = 1e-10);

/// A^exponent for PSD A, restricted to the support: eigenvalues with
/// lambda <= tol * lambda_max are treated as exact zeros (mapped to zero
/// also for negative exponents). Throws on significantly negative spectrum.
Matrix psd_power(const Matrix &a, double exponent, double tol = 1e-10);
LabeledOperator psd_power(const LabeledOperator &a, double exponent,
                          double tol = 1e-10);

/// Orthonormal basis (columns) of Supp(A) for PSD A, same cutoff as psd_power.
Matrix support_basis(const Matrix &a, double tol = 1e-10);

// --- labeled maps --------------------------------------------------------

/// T_{to<-from} = sum_k |k>_to <k|_from, the relabeling isometry.
LabeledMap teleportation_op(const std::string &from_label,
                            const std::string &to_label, int d);
LabeledMap tensor(const LabeledMap &a, const LabeledMap &b);
/// Choi state |V>><<V| of a map, layout = out factors then in factors.
LabeledOperator choi_state(const LabeledMap &v);

// --- multi-index helpers (shared with comb/realization internals) --------

namespace detail {
/// Strides for mixed-radix decomposition of a layout index (factor 0 most
/// significant).
std::vector<int> strides(const SpaceLayout &layout);
}  // namespace detail

}  // namespace qcomb
