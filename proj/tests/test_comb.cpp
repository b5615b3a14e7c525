#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcomb/comb.hpp"
#include "qcomb/tradeoff.hpp"
#include "test_util.hpp"

using namespace qcomb;
using namespace qcomb::testing;

namespace {

LabeledOperator pair_state(const std::string &hi, const std::string &lo,
                           int d) {
    Vector ii = max_entangled_ket(d);
    return {ii * ii.adjoint(), SpaceLayout{{hi, d}, {lo, d}}};
}

}  // namespace

TEST_CASE("choi of a unitary is a channel") {
    int d = 2;
    ChoiOperator c = choi_of_unitary(Matrix::Identity(d, d));
    Vector ii = max_entangled_ket(d);
    CHECK((c.op.mat - ii * ii.adjoint()).norm() <= 1e-14);
    CHECK(c.channel);
    Rng rng = make_rng(21, 0);
    CHECK_THROWS_AS(choi_of_unitary(random_matrix(2, 2, rng)),
                    std::invalid_argument);
}

TEST_CASE("apply_channel conjugates by the unitary") {
    Rng rng = make_rng(22, 0);
    for (int i = 0; i < 50; ++i) {
        int d = 2 + (i % 2);
        Matrix u = haar_unitary(d, rng);
        Matrix rho = random_psd(d, d, rng);
        rho /= rho.trace().real();
        LabeledOperator out = apply_channel(choi_of_unitary(u), rho);
        CHECK((out.mat - u * rho * u.adjoint()).norm() <= 1e-12);
        CHECK(std::abs(out.mat.trace().real() - 1.0) <= 1e-10);
        // spectrum preserved
        EigResult e1 = herm_eig(rho), e2 = herm_eig(out.mat);
        CHECK((e1.values - e2.values).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK_THROWS_AS(
        apply_channel(choi_of_unitary(Matrix::Identity(2, 2)),
                      Matrix(2.0 * Matrix::Identity(2, 2))),
        std::invalid_argument);
}

TEST_CASE("link composes unitary channels") {
    Rng rng = make_rng(23, 0);
    int d = 2;
    for (int i = 0; i < 10; ++i) {
        Matrix e = haar_unitary(d, rng), f = haar_unitary(d, rng);
        LabeledOperator ce = choi_of_unitary(e, "1", "0").op;
        LabeledOperator cf = choi_of_unitary(f, "2", "1").op;
        LabeledOperator comp = link(cf, ce, {"1"});
        LabeledOperator direct = choi_of_unitary(f * e, "2", "0").op;
        LabeledOperator aligned = permute_factors(comp, {"2", "0"});
        CHECK((aligned.mat - direct.mat).norm() <= 1e-12);
    }
}

TEST_CASE("link applied to a state acts as the channel") {
    Rng rng = make_rng(24, 0);
    int d = 2;
    Matrix u = haar_unitary(d, rng);
    Matrix rho = random_psd(d, d, rng);
    rho /= rho.trace().real();
    LabeledOperator c = choi_of_unitary(u, "1", "0").op;
    // A state is a zero-tooth comb on the input wire.
    LabeledOperator s(rho, SpaceLayout{{"0", d}});
    LabeledOperator out = link(c, s, {"0"});
    CHECK((out.mat - u * rho * u.adjoint()).norm() <= 1e-12);
}

TEST_CASE("link with empty connection is the tensor product") {
    Rng rng = make_rng(25, 0);
    LabeledOperator a(random_matrix(2, 2, rng), SpaceLayout{{"a", 2}});
    LabeledOperator b(random_matrix(3, 3, rng), SpaceLayout{{"b", 3}});
    LabeledOperator l = link(a, b, {});
    CHECK((l.mat - tensor(a, b).mat).norm() == 0.0);
}

TEST_CASE("link errors") {
    Rng rng = make_rng(26, 0);
    LabeledOperator a(random_matrix(2, 2, rng), SpaceLayout{{"j", 2}});
    LabeledOperator b(random_matrix(3, 3, rng), SpaceLayout{{"j", 3}});
    CHECK_THROWS_AS(link(a, b, {"j"}), std::invalid_argument);
    LabeledOperator c(random_matrix(2, 2, rng), SpaceLayout{{"j", 2}});
    CHECK_THROWS_AS(link(a, c, {}), std::invalid_argument);
}

TEST_CASE("link is commutative up to permutation and associative") {
    Rng rng = make_rng(27, 0);
    int d = 2;
    LabeledOperator a(random_matrix(d * d, d * d, rng),
                      SpaceLayout{{"0", d}, {"1", d}});
    LabeledOperator b(random_matrix(d * d, d * d, rng),
                      SpaceLayout{{"1", d}, {"2", d}});
    LabeledOperator c(random_matrix(d * d, d * d, rng),
                      SpaceLayout{{"2", d}, {"3", d}});
    LabeledOperator ab = link(a, b, {"1"});
    LabeledOperator ba = link(b, a, {"1"});
    LabeledOperator ba_aligned = permute_factors(ba, ab.layout.labels());
    CHECK((ab.mat - ba_aligned.mat).norm() <= 1e-10);
    LabeledOperator left = link(link(a, b, {"1"}), c, {"2"});
    LabeledOperator right = link(a, link(b, c, {"2"}), {"1"});
    LabeledOperator right_aligned = permute_factors(right, left.layout.labels());
    CHECK((left.mat - right_aligned.mat).norm() <= 1e-10);
}

TEST_CASE("deterministic comb checker accepts valid ladders") {
    int d = 2;
    LabeledOperator two_pairs = tensor(pair_state("3", "2", d),
                                       pair_state("1", "0", d));
    CombCheckReport rep = check_deterministic_comb(two_pairs, 2);
    CHECK(rep.ok);
    CHECK(rep.alpha == doctest::Approx(1.0));

    Rng rng = make_rng(28, 0);
    Matrix u = haar_unitary(d, rng);
    CHECK(check_deterministic_comb(choi_of_unitary(u).op, 1).ok);

    double x = 1.0 / std::sqrt(3.0);
    CombCheckReport rep2 =
        check_deterministic_comb(r_total_op(x, x, d), 2);
    CHECK(rep2.ok);
    // trace of the full comb is d^2
    CHECK(r_total_op(x, x, d).mat.trace().real() ==
          doctest::Approx(d * d).epsilon(1e-10));
}

TEST_CASE("comb checker reports failures") {
    int d = 2;
    // non-PSD
    LabeledOperator bad(-Matrix::Identity(16, 16), comb_layout({d, d, d, d}));
    CombCheckReport rep = check_deterministic_comb(bad, 2);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failed_level == 0);
    // PSD but wrong normalization
    LabeledOperator wrong(Matrix::Identity(16, 16), comb_layout({d, d, d, d}));
    CombCheckReport rep2 = check_deterministic_comb(wrong, 2);
    CHECK_FALSE(rep2.ok);
    CHECK(rep2.failed_level >= 1);
    CHECK(rep2.residual > 0);
    CHECK_THROWS_AS(make_comb(wrong, 2), std::invalid_argument);
}

TEST_CASE("dominance witness") {
    int d = 2;
    double x = 1.0 / std::sqrt(3.0);
    LabeledOperator r = r_total_op(x, x, d);
    LabeledOperator half(r.mat / 2.0, r.layout);
    LabeledOperator twice(2.0 * r.mat, r.layout);
    CHECK(check_dominated(half, r));
    CHECK_FALSE(check_dominated(twice, r));

    Rng rng = make_rng(29, 0);
    CovariantInstrument inst = instrument_from_xy(x, x, d);
    for (int i = 0; i < 10; ++i) {
        Matrix uh = haar_unitary(d, rng);
        // outcome operators carry measure weight; scaled members are dominated
        LabeledOperator ru = inst.r_uhat(uh);
        LabeledOperator scaled(ru.mat / (d * d * (d * d - 1.0)), ru.layout);
        CHECK(check_dominated(scaled, r, 1e-8));
    }
}

TEST_CASE("outcome density closed forms") {
    int d = 2;
    Rng rng = make_rng(30, 0);
    Matrix rho = Matrix::Identity(d, d) / double(d);
    CovariantInstrument id_inst = instrument_from_xy(0.0, 1.0, d);
    CovariantInstrument est_inst = instrument_from_xy(1.0, 0.0, d);
    for (int i = 0; i < 10; ++i) {
        Matrix u = haar_unitary(d, rng), uh = haar_unitary(d, rng);
        CHECK(outcome_density(id_inst.r_uhat(uh), u, rho) ==
              doctest::Approx(1.0).epsilon(1e-10));
        double expect = std::norm((uh * u.adjoint()).trace());
        CHECK(outcome_density(est_inst.r_uhat(uh), u, rho) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("outcome density integrates to one over outcomes") {
    int d = 2;
    double x = 1.0 / std::sqrt(3.0);
    CovariantInstrument inst = instrument_from_xy(x, x, d);
    Rng rng = make_rng(31, 0);
    Matrix u = haar_unitary(d, rng);
    Matrix rho = Matrix::Identity(d, d) / double(d);
    MeanEstimate e = mc_mean(100000, 31, 4, [&](Rng &r) {
        return outcome_density(inst.r_uhat(haar_unitary(d, r)), u, rho);
    });
    CHECK(std::abs(e.mean - 1.0) <= std::max(3.0 * e.stderr_, 5e-3));
    // dominance implies nonnegative densities
    CHECK(e.mean > 0);
}

TEST_CASE("twirl fixes covariant families and produces covariant output") {
    int d = 2;
    double x = 1.0 / std::sqrt(3.0);
    CovariantInstrument inst = instrument_from_xy(x, x, d);
    Rng rng = make_rng(32, 0);
    Matrix uh = haar_unitary(d, rng);
    auto family = [&](const Matrix &v) { return inst.r_uhat(v); };
    const std::size_t n = 3000;
    LabeledOperator tw = twirl_comb(family, uh, d, n, rng);
    LabeledOperator direct = inst.r_uhat(uh);
    LabeledOperator aligned = permute_factors(direct, tw.layout.labels());
    double scale = aligned.mat.norm();
    CHECK((tw.mat - aligned.mat).norm() / scale <= 6.0 / std::sqrt(double(n)));

    // twirled output of a random rank-one family commutes with V x V* x V x V*
    Matrix seed_v = random_matrix(d * d * d * d, 1, rng);
    LabeledOperator seed(seed_v * seed_v.adjoint(),
                         comb_layout({d, d, d, d}));
    auto rank1 = [&](const Matrix &) { return seed; };
    LabeledOperator tw2 = twirl_comb(rank1, Matrix::Identity(d, d), d, n, rng);
    Matrix v = haar_unitary(d, rng);
    LabeledOperator g =
        tensor(tensor(LabeledOperator(v, SpaceLayout{{"3", d}}),
                      LabeledOperator(v.conjugate(), SpaceLayout{{"2", d}})),
               tensor(LabeledOperator(v, SpaceLayout{{"1", d}}),
                      LabeledOperator(v.conjugate(), SpaceLayout{{"0", d}})));
    Matrix comm = g.mat * tw2.mat - tw2.mat * g.mat;
    CHECK(comm.norm() / tw2.mat.norm() <= 20.0 / std::sqrt(double(n)));
}
