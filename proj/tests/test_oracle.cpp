#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qrotor/oracle.hpp"
#include "qrotor/relax.hpp"

using namespace qrotor;

namespace {

RotorInstance edge_k2(double a, double b, double c_pot = 2.0) {
    RotorInstance inst;
    inst.n = 2;
    inst.k = 2;
    inst.a = a;
    inst.b = b;
    inst.c_pot = c_pot;
    inst.edges.push_back({0, 1, 1.0});
    return inst;
}

}  // namespace

TEST_CASE("kinetic-only Hamiltonian is diagonal with ground energy zero") {
    RotorInstance inst;
    inst.n = 1;
    inst.k = 2;
    inst.a = 1.0;
    inst.b = 0.0;
    TruncatedHamiltonian h = hamiltonian_k2(inst, 6);
    CHECK(h.dim == 13);
    // diagonal {m^2}: ground is the min entry
    Eigen::MatrixXd dense(h.matrix);
    CHECK(dense.cwiseAbs().sum() == doctest::Approx(dense.diagonal().cwiseAbs().sum()));
    ExtremalEigen ee = ground_state(h);
    CHECK(ee.e0 == doctest::Approx(0.0));
    CHECK(ee.e1 == doctest::Approx(1.0));  // m = +-1 modes
}

TEST_CASE("two-by-two closed form") {
    // directly exercise the eigensolvers on a tiny matrix
    Eigen::SparseMatrix<double> m(2, 2);
    m.insert(0, 0) = 1.0;
    m.insert(1, 1) = 3.0;
    m.insert(0, 1) = 0.5;
    m.insert(1, 0) = 0.5;
    m.makeCompressed();
    double expect = 2.0 - std::sqrt(1.0 + 0.25);  // (a+b)/2 - sqrt(((a-b)/2)^2 + c^2)
    CHECK(dense_smallest(m).e0 == doctest::Approx(expect).epsilon(1e-14));
    CHECK(lanczos_smallest(m).e0 == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("potential-only edge converges to the classical minimum 1") {
    RotorInstance inst = edge_k2(0.0, 1.0);
    double prev = 10.0;
    for (int cut : {4, 8, 12}) {
        double e0 = ground_state(hamiltonian_k2(inst, cut)).e0;
        CHECK(e0 > 1.0);
        CHECK(e0 < prev);
        prev = e0;
    }
    CHECK(prev < 1.01);  // 2 + cos has minimum 1; truncation gap is O(M^-2)
}

TEST_CASE("interacting edge: bracketing, convergence, dense vs lanczos") {
    RotorInstance inst = edge_k2(1.0, 1.0);
    TruncatedHamiltonian h8 = hamiltonian_k2(inst, 8);

    ExtremalEigen dense = dense_smallest(h8.matrix);
    ExtremalEigen lan = lanczos_smallest(h8.matrix);
    CHECK(std::abs(dense.e0 - lan.e0) < 1e-9);
    CHECK(lan.residual < 1e-8);

    OracleResult res = ground_energy(hamiltonian_k2(inst, 16));
    // ground of the sum dominates the sum of grounds: E0 >= 0 + 1
    CHECK(res.ground_energy > 1.0);
    // constant product wavefunction gives energy c_pot = 2
    CHECK(res.ground_energy < 2.0);
    CHECK(res.spectral_gap > 0.0);
    CHECK(res.convergence_delta < 1e-8);
}

TEST_CASE("truncation deltas decrease on the interacting edge") {
    RotorInstance inst = edge_k2(1.0, 1.0);
    std::vector<double> e0;
    for (int cut : {2, 3, 4, 5, 6, 8}) e0.push_back(ground_state(hamiltonian_k2(inst, cut)).e0);
    for (std::size_t i = 2; i < e0.size(); ++i) {
        double prev_delta = std::abs(e0[i - 1] - e0[i - 2]);
        double delta = std::abs(e0[i] - e0[i - 1]);
        CHECK(delta <= prev_delta + 1e-12);  // noise floor once converged
    }
}

TEST_CASE("variational property on random vectors") {
    RotorInstance inst = edge_k2(1.0, 1.0);
    TruncatedHamiltonian h = hamiltonian_k2(inst, 6);
    double e0 = ground_state(h).e0;
    rng::Stream rs(83, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v(h.dim);
        for (Eigen::Index i = 0; i < h.dim; ++i) v[i] = rs.normal();
        v.normalize();
        CHECK(v.dot(h.matrix * v) >= e0 - 1e-9);
    }
}

TEST_CASE("dimension overflow and wrong k are rejected") {
    RotorInstance inst = edge_k2(1.0, 1.0);
    CHECK_THROWS_AS(hamiltonian_k2(inst, 1000), std::length_error);
    RotorInstance k3 = inst;
    k3.k = 3;
    CHECK_THROWS_AS(hamiltonian_k2(k3, 4), std::invalid_argument);
}

TEST_CASE("product state optimizer on decoupled limits") {
    // b = 0: constant wavefunctions, zero energy
    ProductStateResult b0 = product_state_k2(edge_k2(1.0, 0.0), 8, 4, 1);
    CHECK(b0.energy == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(b0.converged);

    // a = 0: antipodal means, value c_pot - 1 = 1 up to truncation
    ProductStateResult a0 = product_state_k2(edge_k2(0.0, 1.0), 16, 8, 2);
    CHECK(a0.energy > 0.99);
    CHECK(a0.energy < 1.01);
    // means align antipodally
    double dot = (std::conj(a0.site_means[0]) * a0.site_means[1]).real();
    CHECK(dot < -0.9);
}

TEST_CASE("product state dominates the true ground energy") {
    RotorInstance inst = edge_k2(1.0, 1.0);
    OracleResult res = ground_energy(hamiltonian_k2(inst, 12));
    ProductStateResult prod = product_state_k2(inst, 12, 16, 3);
    CHECK(prod.converged);
    CHECK(prod.energy >= res.ground_energy - 1e-9);
    // the paper's subject: a strictly positive product-state gap
    CHECK(prod.energy - res.ground_energy > 1e-3);
    // and the SDP relaxation sits below both
    SdpSolution sdp = solve(build_reduced(inst));
    REQUIRE(sdp.status == SdpStatus::Optimal);
    CHECK(sdp.primal_value <= res.ground_energy + 1e-5);
}

TEST_CASE("wavefunction moments: closed-form states") {
    // constant state: delta = 0, mu = 0
    WavefunctionMoments flat = moments_from_coefficients({{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}});
    CHECK(flat.delta == doctest::Approx(0.0));
    CHECK(flat.mu.norm() == doctest::Approx(0.0));
    CHECK(flat.spherical.x1_sq == doctest::Approx(0.5));

    // single mode m = 1: delta = 1, mu = 0
    WavefunctionMoments one = moments_from_coefficients({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    CHECK(one.delta == doctest::Approx(1.0));
    CHECK(one.mu.norm() == doctest::Approx(0.0));

    // two-mode mixture c_0, c_1: mu = conj(c_1) c_0, delta = |c_1|^2
    std::complex<double> c0(0.8, 0.0), c1(0.0, 0.6);
    WavefunctionMoments mix = moments_from_coefficients({{0.0, 0.0}, c0, c1});
    CHECK(mix.delta == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(mix.mu.norm() == doctest::Approx(0.48).epsilon(1e-12));
    // erb inequality, strict here
    CHECK(mix.delta >= erb_rhs(mix.mu.norm(), 2));
    // certificate structure holds exactly
    UncertaintyCertificate cert = spherical_certificate(mix.spherical);
    CHECK(cert.ok);
}

TEST_CASE("erb inequality and certificates on random truncated states") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        WavefunctionMoments wm = random_wavefunction_moments(2 + int(seed % 7), seed);
        INFO("seed=", seed);
        CHECK(wm.delta >= erb_rhs(wm.spherical.t, 2) - 1e-9);
        UncertaintyCertificate cert = spherical_certificate(wm.spherical);
        CHECK(cert.ok);
        CHECK(wm.delta >= cert.implied_bound - 1e-9);
    }
}
