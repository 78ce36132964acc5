#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "qrotor/rng.hpp"
#include "qrotor/sdp.hpp"

using namespace qrotor;

namespace {

MatrixXcd random_hermitian(int n, rng::Stream& rs) {
    MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
        m(r, r) = rs.normal();
        for (int c = r + 1; c < n; ++c) {
            m(r, c) = std::complex<double>(rs.normal(), rs.normal());
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("scalar problem: minimize x with x = 2") {
    SdpProblem p;
    p.dimension = 1;
    p.objective = MatrixXcd::Identity(1, 1);
    p.constraints.push_back({MatrixXcd::Identity(1, 1), 2.0});
    SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s.residuals.constraint_inf_norm < 1e-7);
}

TEST_CASE("2x2 correlation boundary: max t with [[1,t],[t,1]] psd") {
    SdpProblem p;
    p.dimension = 2;
    p.objective = -re_atom(2, 0, 1);  // minimize -Re X01
    p.constraints.push_back({re_atom(2, 0, 0), 1.0});
    p.constraints.push_back({re_atom(2, 1, 1), 1.0});
    SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(-s.primal_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.x(0, 1).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("complex Hermitian problem: minimize Im X01 on the psd boundary") {
    SdpProblem p;
    p.dimension = 2;
    p.objective = im_atom(2, 0, 1);
    p.constraints.push_back({re_atom(2, 0, 0), 1.0});
    p.constraints.push_back({re_atom(2, 1, 1), 1.0});
    SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("triangle regression against the exchangeable 1-D oracle") {
    // minimize sum_edges (2 + X_vw) over 3x3 correlation matrices.
    // Oracle: exchangeable solutions X = (1-t) I + t J are psd iff
    // 1 + 2t >= 0, so scan t to get the optimum independently.
    double best = 1e300;
    double best_t = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        double t = -1.0 + 2.0 * i / 20000.0;
        if (1.0 + 2.0 * t < 0.0 || 1.0 - t < 0.0) continue;
        double v = 6.0 + 3.0 * t;
        if (v < best) { best = v; best_t = t; }
    }
    CHECK(best == doctest::Approx(4.5).epsilon(1e-4));
    CHECK(best_t == doctest::Approx(-0.5).epsilon(1e-3));

    SdpProblem p;
    p.dimension = 3;
    p.objective = MatrixXcd::Zero(3, 3);
    for (int v = 0; v < 3; ++v)
        for (int w = v + 1; w < 3; ++w) p.objective += re_atom(3, v, w);
    p.objective_offset = 6.0;
    for (int v = 0; v < 3; ++v) p.constraints.push_back({re_atom(3, v, v), 1.0});
    SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(4.5).epsilon(1e-5));
    double off_sum = (s.x(0, 1) + s.x(0, 2) + s.x(1, 2)).real();
    CHECK(off_sum == doctest::Approx(-1.5).epsilon(1e-4));
}

TEST_CASE("weak duality holds on every solve") {
    rng::Stream rs(41, 0);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 2 + trial % 3;
        MatrixXcd x0 = random_hermitian(n, rs);
        x0 = x0 * x0.adjoint() + MatrixXcd::Identity(n, n);  // strictly feasible
        SdpProblem p;
        p.dimension = n;
        MatrixXcd c = random_hermitian(n, rs);
        p.objective = c * c.adjoint() + MatrixXcd::Identity(n, n);  // bounded below
        for (int i = 0; i < n; ++i) {
            MatrixXcd a = random_hermitian(n, rs);
            p.constraints.push_back({a, herm_inner(a, x0)});
        }
        SdpSolution s = solve(p);
        REQUIRE(s.status == SdpStatus::Optimal);
        CHECK(s.dual_value <= s.primal_value + 1e-5);
        CHECK(s.residuals.min_eigenvalue >= -1e-7);
        CHECK(s.residuals.constraint_inf_norm <= 1e-7);
    }
}

TEST_CASE("optimal value invariant under permutation of the problem") {
    rng::Stream rs(43, 1);
    int n = 4;
    MatrixXcd x0 = random_hermitian(n, rs);
    x0 = x0 * x0.adjoint() + MatrixXcd::Identity(n, n);
    SdpProblem p;
    p.dimension = n;
    MatrixXcd c = random_hermitian(n, rs);
    p.objective = c * c.adjoint() + MatrixXcd::Identity(n, n);
    for (int i = 0; i < 5; ++i) {
        MatrixXcd a = random_hermitian(n, rs);
        p.constraints.push_back({a, herm_inner(a, x0)});
    }
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.setIdentity();
    std::swap(perm.indices()[0], perm.indices()[2]);
    std::swap(perm.indices()[1], perm.indices()[3]);
    SdpProblem q = p;
    q.objective = perm.transpose() * p.objective * perm;
    for (auto& c : q.constraints) c.a = perm.transpose() * c.a * perm;

    SdpSolution sp = solve(p);
    SdpSolution sq = solve(q);
    REQUIRE(sp.status == SdpStatus::Optimal);
    REQUIRE(sq.status == SdpStatus::Optimal);
    CHECK(sp.primal_value == doctest::Approx(sq.primal_value).epsilon(1e-6));
}

TEST_CASE("real embedding") {
    MatrixXcd h(2, 2);
    h << 0.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 0.0;
    MatrixXd e = real_embedding(h);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(e);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[2] == doctest::Approx(1.0));
    CHECK(es.eigenvalues()[3] == doctest::Approx(1.0));

    // real input embeds to two copies on the block diagonal
    MatrixXcd r = MatrixXcd::Zero(2, 2);
    r.real() << 2.0, 0.5, 0.5, 1.0;
    MatrixXd er = real_embedding(r);
    CHECK(er.topLeftCorner(2, 2).isApprox(r.real()));
    CHECK(er.bottomRightCorner(2, 2).isApprox(r.real()));
    CHECK(er.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

    CHECK(real_embedding(MatrixXcd::Identity(3, 3)).isApprox(MatrixXd::Identity(6, 6)));

    // psd-ness is preserved both ways on random Hermitian samples
    rng::Stream rs(47, 0);
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXcd m = random_hermitian(3, rs);
        CHECK(min_eig(real_embedding(m)) == doctest::Approx(min_eig(m)).epsilon(1e-10));
    }

    MatrixXcd bad(2, 2);
    bad << 1.0, 2.0, 3.0, 1.0;
    CHECK_THROWS_AS(real_embedding(bad), std::invalid_argument);
}

TEST_CASE("min_eig and cholesky_psd") {
    MatrixXd ident = MatrixXd::Identity(3, 3);
    CHECK(min_eig(ident) == doctest::Approx(1.0));

    Eigen::VectorXd v(3);
    v << 1.0, -2.0, 0.5;
    MatrixXd rank1 = v * v.transpose();
    MatrixXd f = cholesky_psd(rank1);
    CHECK((f * f.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-10);
    double sign = f.col(0)[0] * v[0] > 0 ? 1.0 : -1.0;
    CHECK((f.col(0) - sign * v).cwiseAbs().maxCoeff() < 1e-10);

    rng::Stream rs(53, 0);
    MatrixXd a(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = rs.normal();
    MatrixXd spd = a * a.transpose() + MatrixXd::Identity(4, 4);
    MatrixXd g = cholesky_psd(spd);
    CHECK((g * g.transpose() - spd).cwiseAbs().maxCoeff() < 1e-10);

    MatrixXd indef = MatrixXd::Identity(2, 2);
    indef(1, 1) = -0.5;
    CHECK_THROWS_AS(cholesky_psd(indef, 1e-12), std::domain_error);
}

TEST_CASE("failure statuses carry residuals") {
    SdpProblem p;
    p.dimension = 1;
    p.objective = MatrixXcd::Identity(1, 1);
    p.constraints.push_back({MatrixXcd::Identity(1, 1), 2.0});
    SolveOptions opt;
    opt.max_iter = 1;
    SdpSolution s = solve(p, opt);
    CHECK(s.status == SdpStatus::NotConverged);
    CHECK(s.residuals.duality_gap > 0.0);

    // x >= 0 with x = -1 is infeasible; must not report Optimal
    SdpProblem inf;
    inf.dimension = 1;
    inf.objective = MatrixXcd::Identity(1, 1);
    inf.constraints.push_back({MatrixXcd::Identity(1, 1), -1.0});
    SolveOptions opt2;
    opt2.max_iter = 2000;
    SdpSolution s2 = solve(inf, opt2);
    CHECK(s2.status != SdpStatus::Optimal);
}

TEST_CASE("problem validation") {
    SdpProblem p;
    p.dimension = 2;
    p.objective = MatrixXcd::Zero(2, 2);
    p.objective(0, 1) = 1.0;  // not Hermitian
    CHECK_THROWS_AS(solve(p), std::invalid_argument);

    SdpProblem q;
    q.dimension = 2;
    q.objective = MatrixXcd::Identity(2, 2);
    q.constraints.push_back({MatrixXcd::Identity(3, 3), 1.0});  // wrong size
    CHECK_THROWS_AS(solve(q), std::invalid_argument);
}

TEST_CASE("problem and solution text round trip") {
    rng::Stream rs(59, 0);
    SdpProblem p;
    p.dimension = 2;
    p.objective = random_hermitian(2, rs);
    p.objective_offset = 1.25;
    for (int i = 0; i < 2; ++i)
        p.constraints.push_back({random_hermitian(2, rs), rs.normal()});

    std::stringstream ss;
    write_problem(ss, p);
    SdpProblem q = read_problem(ss);
    CHECK(q.dimension == p.dimension);
    CHECK(q.objective_offset == p.objective_offset);
    CHECK((q.objective - p.objective).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(q.constraints.size() == p.constraints.size());
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        CHECK(q.constraints[i].b == p.constraints[i].b);
        CHECK((q.constraints[i].a - p.constraints[i].a).cwiseAbs().maxCoeff() == 0.0);
    }

    SdpProblem feasible;
    feasible.dimension = 1;
    feasible.objective = MatrixXcd::Identity(1, 1);
    feasible.constraints.push_back({MatrixXcd::Identity(1, 1), 1.0});
    std::stringstream so;
    write_solution(so, solve(feasible));
    CHECK(so.str().find("status optimal") != std::string::npos);
    CHECK(so.str().find("primal 0.99999999999") != std::string::npos);
}
