#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "qrotor/phase_poly.hpp"
#include "qrotor/rng.hpp"

using namespace qrotor;

namespace {

PhasePoly monomial_of(int m, const Mono& e) {
    PhasePoly out = PhasePoly::constant(m, GaussianRational(1));
    for (int v = 0; v < 2 * m; ++v) {
        PhasePoly var = v < m ? PhasePoly::position(m, v + 1) : PhasePoly::momentum(m, v - m + 1);
        for (int r = 0; r < e[v]; ++r) out = out * var;
    }
    return out;
}

PhasePoly random_symbol(int m, int max_degree, rng::Stream& rs) {
    detail::TermMap t;
    int n_terms = 1 + int(rs.uniform() * 4);
    for (int i = 0; i < n_terms; ++i) {
        Mono e(2 * m, 0);
        int deg = int(rs.uniform() * (max_degree + 1));
        for (int d = 0; d < deg; ++d) e[int(rs.uniform() * 2 * m)] += 1;
        std::int64_t num = std::int64_t(rs.uniform() * 7) - 3;
        detail::add_term(t, e, GaussianRational(Rational(num, 2)));
    }
    PhasePoly out(m);
    for (const auto& [e, c] : t) out = out + c * monomial_of(m, e);
    return out;
}

}  // namespace

TEST_CASE("star product basics") {
    int m = 2;
    PhasePoly x1 = PhasePoly::position(m, 1);
    PhasePoly x2 = PhasePoly::position(m, 2);
    PhasePoly p1 = PhasePoly::momentum(m, 1);

    // x_1 * p_1 = x_1 p_1 + i hbar/2
    PhasePoly expect = x1 * p1 +
        PhasePoly::constant(m, GaussianRational(Rational(0), Rational(1, 2)));
    CHECK(star(x1, p1) == expect);

    // momentum-free symbols commute
    CHECK(star(x1, x2) == x1 * x2);

    // star commutator of conjugate pair is i hbar
    PhasePoly comm = star(x1, p1) - star(p1, x1);
    CHECK(comm == PhasePoly::constant(m, GaussianRational::i()));
}

TEST_CASE("angular momentum star square carries the -hbar^2/2 constant") {
    for (int k : {2, 3}) {
        PhasePoly ang = PhasePoly::position(k, 1) * PhasePoly::momentum(k, 2) -
                        PhasePoly::position(k, 2) * PhasePoly::momentum(k, 1);
        PhasePoly sq = star(ang, ang);
        PhasePoly expect = ang * ang -
            PhasePoly::constant(k, GaussianRational(Rational(1, 2)));
        CHECK(sq == expect);
    }
    // and with a non-unit hbar the constant scales as hbar^2
    Rational h(3, 2);
    PhasePoly ang2 = PhasePoly::position(2, 1, h) * PhasePoly::momentum(2, 2, h) -
                     PhasePoly::position(2, 2, h) * PhasePoly::momentum(2, 1, h);
    CHECK(star(ang2, ang2) ==
          ang2 * ang2 - PhasePoly::constant(2, GaussianRational(h * h * Rational(1, 2)), h));
}

TEST_CASE("kinetic Weyl symbol structure") {
    for (int k : {2, 3, 5}) {
        PhasePoly sym = kinetic_weyl_symbol(k);
        // constant term is -binom(k,2) hbar^2/2 = -k(k-1)/4 at hbar = 1
        CHECK(sym.constant_term() ==
              GaussianRational(Rational(-std::int64_t(k) * (k - 1), 4)));
        // subtracting the constant leaves exactly the classical squares
        PhasePoly classical(k);
        for (int i = 1; i <= k; ++i)
            for (int j = i + 1; j <= k; ++j) {
                PhasePoly ang = PhasePoly::position(k, i) * PhasePoly::momentum(k, j) -
                                PhasePoly::position(k, j) * PhasePoly::momentum(k, i);
                classical = classical + ang * ang;
            }
        CHECK(sym - PhasePoly::constant(k, sym.constant_term()) == classical);
    }
    CHECK_THROWS_AS(kinetic_weyl_symbol(1), std::invalid_argument);
}

TEST_CASE("star commutator equals i hbar Poisson bracket at degree <= 2") {
    rng::Stream rs(23, 0);
    for (int trial = 0; trial < 25; ++trial) {
        int m = 1 + trial % 2;
        PhasePoly f = random_symbol(m, 2, rs);
        PhasePoly g = random_symbol(m, 2, rs);
        PhasePoly lhs = star(f, g) - star(g, f);
        PhasePoly rhs = GaussianRational::i() * poisson_bracket(f, g);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("star is associative on random degree <= 3 symbols") {
    rng::Stream rs(29, 0);
    for (int trial = 0; trial < 15; ++trial) {
        int m = 1 + trial % 2;
        PhasePoly f = random_symbol(m, 3, rs);
        PhasePoly g = random_symbol(m, 3, rs);
        PhasePoly h = random_symbol(m, 3, rs);
        CHECK(star(star(f, g), h) == star(f, star(g, h)));
    }
}

TEST_CASE("star rejects mismatched operands") {
    CHECK_THROWS_AS(star(PhasePoly::position(1, 1), PhasePoly::position(2, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(star(PhasePoly::position(1, 1), PhasePoly::position(1, 1, Rational(2))),
                    std::invalid_argument);
}

TEST_CASE("wick expectation on closed-form cases") {
    int m = 1;
    PhasePoly x = PhasePoly::position(m, 1);
    double sigma2 = 0.7;
    MomentSpec spec{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    spec.covariance(0, 0) = sigma2;
    spec.covariance(1, 1) = 1.0;

    CHECK(wick_expectation(x * x, spec) == doctest::Approx(sigma2).epsilon(1e-14));
    CHECK(wick_expectation(x * x * x * x, spec) ==
          doctest::Approx(3 * sigma2 * sigma2).epsilon(1e-14));

    // nonzero mean: E[x^2] = sigma^2 + mu^2
    spec.mean(0) = 1.5;
    CHECK(wick_expectation(x * x, spec) ==
          doctest::Approx(sigma2 + 1.5 * 1.5).epsilon(1e-14));
}

TEST_CASE("degree-4 Isserlis cross moment") {
    // E[x_1 p_2 x_2 p_1] = cov(x1,p2)cov(x2,p1) + cov(x1,x2)cov(p2,p1)
    //                      + cov(x1,p1)cov(x2,p2)
    int m = 2;
    Eigen::MatrixXd c(4, 4);
    c << 1.0, 0.3, 0.2, 0.1,
         0.3, 1.1, 0.4, 0.5,
         0.2, 0.4, 1.2, 0.6,
         0.1, 0.5, 0.6, 1.3;
    MomentSpec spec{Eigen::VectorXd::Zero(4), c};
    PhasePoly f = PhasePoly::position(m, 1) * PhasePoly::momentum(m, 2) *
                  PhasePoly::position(m, 2) * PhasePoly::momentum(m, 1);
    // variables: x1=0, x2=1, p1=2, p2=3
    double expect = c(0, 3) * c(1, 2) + c(0, 1) * c(3, 2) + c(0, 2) * c(1, 3);
    CHECK(wick_expectation(f, spec) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("wick expectation is linear in the symbol") {
    rng::Stream rs(31, 0);
    int m = 2;
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(4, 4) * 0.8;
    c(0, 2) = c(2, 0) = 0.25;
    MomentSpec spec{Eigen::VectorXd::Zero(4), c};
    for (int trial = 0; trial < 10; ++trial) {
        PhasePoly f = random_symbol(m, 4, rs);
        PhasePoly g = random_symbol(m, 4, rs);
        double lhs = wick_expectation(f + g, spec);
        double rhs = wick_expectation(f, spec) + wick_expectation(g, spec);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("wick agrees with Monte Carlo sampling within 4 standard errors") {
    rng::Stream gen(37, 0);
    int m = 2;
    Eigen::MatrixXd c(4, 4);
    c << 1.0, 0.2, 0.1, 0.0,
         0.2, 0.9, 0.0, 0.3,
         0.1, 0.0, 1.1, 0.2,
         0.0, 0.3, 0.2, 0.8;
    Eigen::VectorXd mu(4);
    mu << 0.4, -0.2, 0.1, 0.3;
    MomentSpec spec{mu, c};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    Eigen::MatrixXd root =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    for (int trial = 0; trial < 4; ++trial) {
        PhasePoly f = random_symbol(m, 4, gen);
        double exact = wick_expectation(f, spec);
        rng::Welford acc;
        rng::Stream rs(101 + trial, 5);
        Eigen::VectorXd z(4);
        for (int s = 0; s < 200000; ++s) {
            for (int i = 0; i < 4; ++i) z[i] = rs.normal();
            Eigen::VectorXd pt = mu + root * z;
            acc.add(eval(f, pt).real());
        }
        double err = std::max(acc.std_err(), 1e-12);
        CHECK(std::abs(acc.mean - exact) < 4 * err + 1e-9);
    }
}

TEST_CASE("moment spec validation") {
    MomentSpec bad{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    bad.covariance << 1.0, 2.0, 2.0, 1.0;  // indefinite
    PhasePoly x = PhasePoly::position(1, 1);
    CHECK_THROWS_AS(wick_expectation(x, bad), std::invalid_argument);

    MomentSpec wrong{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
    CHECK_THROWS_AS(wick_expectation(x, wrong), std::invalid_argument);

    // slightly negative eigenvalue within tolerance passes
    MomentSpec ok{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    ok.covariance(0, 0) = -0.5e-10;
    CHECK_NOTHROW(wick_expectation(x, ok));
}
