#include "qcomb/random.hpp"

#include <stdexcept>

namespace qcomb {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

Matrix ginibre(int d, Rng &rng) {
    if (d < 1) throw std::invalid_argument("ginibre: d must be >= 1");
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(n(rng), n(rng));
    return g;
}

Matrix haar_unitary(int d, Rng &rng) {
    Matrix g = ginibre(d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase correction: without it the QR output is not Haar distributed.
    for (int j = 0; j < d; ++j) {
        Complex rjj = r(j, j);
        double a = std::abs(rjj);
        q.col(j) *= (a > 0) ? rjj / a : Complex(1.0, 0.0);
    }
    return q;
}

Vector random_pure_state(int d, Rng &rng) {
    if (d < 1) throw std::invalid_argument("random_pure_state: d must be >= 1");
    std::normal_distribution<double> n(0.0, 1.0);
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = Complex(n(rng), n(rng));
    double norm = v.norm();
    if (norm == 0) return random_pure_state(d, rng);
    return v / norm;
}

}  // namespace qcomb
