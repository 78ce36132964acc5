#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qrotor/rounding.hpp"

using namespace qrotor;

namespace {

RotorInstance edge_instance(int k, double a, double b) {
    RotorInstance inst;
    inst.n = 2;
    inst.k = k;
    inst.a = a;
    inst.b = b;
    inst.edges.push_back({0, 1, 1.0});
    return inst;
}

ReducedMoment minimal_single_site(int k) {
    ReducedMoment rm;
    rm.n = 1;
    rm.k = k;
    rm.kxq = {0.0};
    rm.lqq = {0.25 * (k - 1.0) * (k - 1.0) / k};
    return rm;
}

}  // namespace

TEST_CASE("minimal single-site solution saturates validity (pure state)") {
    for (int k : {2, 3, 5}) {
        GaussianCovariance gc = build_gaussian(minimal_single_site(k));
        INFO("k=", k);
        CHECK(std::abs(gc.validity_margin()) < 1e-12);
        // per-coordinate variances
        CHECK(gc.sigma(gc.x_index(0, 0), gc.x_index(0, 0)) ==
              doctest::Approx(1.0 / (k - 1)).epsilon(1e-12));
        CHECK(gc.sigma(gc.p_index(0, 0), gc.p_index(0, 0)) ==
              doctest::Approx(double(k) / (k - 1) * 0.25 * (k - 1.0) * (k - 1.0) / k)
                  .epsilon(1e-12));
    }
}

TEST_CASE("adding diagonal keeps validity strict; corrupt moments rejected") {
    ReducedMoment rm = minimal_single_site(3);
    rm.lqq[0] += 1.0;
    GaussianCovariance gc = build_gaussian(rm);
    CHECK(gc.validity_margin() > 1e-3);

    ReducedMoment bad = minimal_single_site(3);
    bad.lqq[0] *= 0.5;  // below the uncertainty floor
    CHECK_THROWS_AS(build_gaussian(bad), ValidityViolation);
    try {
        build_gaussian(bad);
    } catch (const ValidityViolation& e) {
        CHECK(e.min_eigenvalue < -1e-3);
    }
}

TEST_CASE("rescaling factor at k = 2 equals 2") {
    ReducedMoment rm = minimal_single_site(2);
    GaussianCovariance gc = build_gaussian(rm);
    // x variance 1/(k-1) = 1 = 2 * (1/k)
    CHECK(gc.sigma(gc.x_index(0, 0), gc.x_index(0, 0)) == doctest::Approx(1.0));
    // fixed symplectic part: Im of the rescaled cross moment is 1/2,
    // sitting inside sigma + (i/2) Omega rather than sigma itself
    CHECK(gc.sigma(gc.x_index(0, 0), gc.p_index(0, 0)) == doctest::Approx(0.0));
}

TEST_CASE("x correlation extraction and potential edge values") {
    RotorInstance inst = edge_instance(3, 1.0, 1.0);
    ReducedMoment rm;
    rm.n = 2;
    rm.k = 3;
    rm.kxq = {0.0, 0.0};
    rm.lqq = {2.0, 2.0};

    SUBCASE("independent sites") {
        GaussianCovariance gc = build_gaussian(rm);
        CHECK(x_correlation(gc, 0, 1) == doctest::Approx(0.0));
        RoundedTerm rt = rounded_potential_edge(gc, 0, 1, 1.0, 2.0, {40000, 3});
        CHECK(std::abs(rt.value - 2.0) < 4 * rt.std_err + 1e-12);  // h(k, 0) = 0
    }
    SUBCASE("perfect x correlation is not quantum-feasible") {
        // t = 1 would force x_0 - x_1 -> 0 while the fixed imaginary x-q
        // moments persist, so M' cannot stay PSD; build_gaussian rejects it
        Eigen::Matrix2d blk = Eigen::Matrix2d::Zero();
        blk(0, 0) = 1.0 / 3.0;  // would mean t = k * B_xx = 1
        rm.cross[{0, 1}] = blk;
        CHECK_THROWS_AS(build_gaussian(rm), ValidityViolation);
    }
    SUBCASE("strong correlation") {
        Eigen::Matrix2d blk = Eigen::Matrix2d::Zero();
        blk(0, 0) = 0.3;   // t = k * B_xx = 0.9
        blk(1, 1) = -1.4;  // q-sector anticorrelation keeps M' psd
        rm.cross[{0, 1}] = blk;
        GaussianCovariance gc = build_gaussian(rm);
        CHECK(x_correlation(gc, 0, 1) == doctest::Approx(0.9).epsilon(1e-12));
        RoundedTerm rt = rounded_potential_edge(gc, 0, 1, 1.5, 2.0, {50000, 3});
        double href = h(3, 0.9, {400000, 29}).mean;
        CHECK(std::abs(rt.value - 1.5 * (2.0 + href)) < 4 * (rt.std_err + 1.5e-3));
    }
    SUBCASE("correlation equals k * B_xx and survives the rescaling") {
        Eigen::Matrix2d blk = Eigen::Matrix2d::Zero();
        blk(0, 0) = -0.1;
        rm.cross[{0, 1}] = blk;
        GaussianCovariance gc = build_gaussian(rm);
        CHECK(x_correlation(gc, 0, 1) == doctest::Approx(3.0 * -0.1).epsilon(1e-12));
        // recompute directly from the unscaled M' entries
        MatrixXcd mp = rm.assemble();
        double direct = mp(0, 2).real() / std::sqrt(mp(0, 0).real() * mp(2, 2).real());
        CHECK(x_correlation(gc, 0, 1) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("kinetic modes agree and obey the exact k/(k-1) identity") {
    for (int k : {2, 3, 4}) {
        ReducedMoment rm = minimal_single_site(k);
        rm.lqq[0] = 0.25 * (k - 1.0) * (k - 1.0) / k + 0.37;
        GaussianCovariance gc = build_gaussian(rm);

        double sdp_term = -0.25 * (k - 1.0) * (k - 1.0) + k * rm.lqq[0];
        RoundedTerm closed = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::closed_form);
        RoundedTerm wick = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::wick);
        INFO("k=", k);
        // ratio identity: rounded = (k/(k-1)) * sdp term, exactly
        CHECK(closed.value ==
              doctest::Approx(double(k) / (k - 1) * sdp_term).epsilon(1e-12));
        CHECK(std::abs(wick.value - closed.value) < 1e-10);

        RoundedTerm mcv = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::mc, {60000, 5});
        CHECK(std::abs(mcv.value - wick.value) < 4 * mcv.std_err + 1e-9);
    }
}

TEST_CASE("minimal L gives zero rounded kinetic energy") {
    for (int k : {2, 3}) {
        GaussianCovariance gc = build_gaussian(minimal_single_site(k));
        RoundedTerm rt = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::closed_form);
        CHECK(rt.value == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("wick mode handles nonzero K_v (time-reversal flag off)") {
    int k = 3;
    ReducedMoment rm = minimal_single_site(k);
    rm.lqq[0] += 0.8;
    rm.kxq[0] = 0.15;
    GaussianCovariance gc = build_gaussian(rm);
    RoundedTerm wick = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::wick);
    RoundedTerm mcv = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::mc, {80000, 7});
    CHECK(std::abs(wick.value - mcv.value) < 4 * mcv.std_err + 1e-9);
    // closed form assumes a diagonal marginal, so wick is the reference:
    // the x-p cross moment feeds the pairing sum through cov(x_i, p_i)
    RoundedTerm closed = rounded_kinetic_vertex(gc, 0, 1.0, KineticMode::closed_form);
    CHECK(std::abs(wick.value - closed.value) > 1e-3);
}

TEST_CASE("full rounding report on a solved instance") {
    RotorInstance inst = edge_instance(2, 1.0, 1.0);
    SdpSolution sol = solve(build_reduced(inst));
    REQUIRE(sol.status == SdpStatus::Optimal);
    ReducedMoment rm = extract_reduced(inst, sol.x);
    RoundReport report = rounded_value(inst, rm, {200000, 11});

    CHECK(report.validity_margin > -1e-9);
    CHECK(report.k_ratio == doctest::Approx(2.0));
    CHECK(report.sdp_value == doctest::Approx(sol.primal_value).epsilon(1e-6));
    // rounded state is genuine: its energy dominates the relaxation value
    CHECK(report.rounded_value > report.sdp_value - 4 * report.rounded_std_err - 1e-6);
    // kinetic terms are exactly proportional
    for (const auto& vr : report.vertices) CHECK(std::abs(vr.proportionality_defect) < 1e-10);
    // per-term potential sandwich: rounded <= alpha_bov * sdp + error
    AlphaBov ab = alpha_bov(2, 81, 2.0, {60000, 13});
    for (const auto& er : report.edges) {
        CHECK(er.rounded <= ab.alpha * er.sdp_term + 4 * er.std_err + 1e-6);
        CHECK(er.rounded >= er.sdp_term - 4 * er.std_err - 1e-6);  // h(k,t) >= t
    }
}

TEST_CASE("alpha report") {
    AlphaReport a10 = alpha(10, {20000, 3}, 41);
    CHECK(a10.k_ratio == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
    CHECK(a10.alpha_k >= a10.alpha_bov_k);
    CHECK(a10.alpha_k >= a10.k_ratio);
    CHECK(a10.alpha_k == doctest::Approx(std::max(a10.alpha_bov_k, a10.k_ratio)));
}
