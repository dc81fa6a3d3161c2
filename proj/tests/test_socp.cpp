// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <random>

#include "risshare/socp.hpp"

using namespace risshare;
using namespace risshare::socp;

namespace {

Cone ball(Index n, double radius) {
    Cone k;
    k.A = RMat::Identity(n, n);
    k.b = RVec::Zero(n);
    k.g = RVec::Zero(n);
    k.d = radius;
    return k;
}

Problem with_no_equalities(Index n) {
    Problem p;
    p.c = RVec::Zero(n);
    p.F.resize(0, n);
    p.h.resize(0);
    return p;
}

bool feasible(const Problem& p, const RVec& x, double tol = 0.0) {
    for (const Cone& k : p.cones)
        if (cone_violation(k, x) > tol) return false;
    return true;
}

// Random-sampling plus shrinking pattern search; only uses feasibility tests
// and objective values, independent of the interior-point machinery.
double search_oracle(const Problem& p, std::mt19937_64& rng, double radius) {
    const Index n = p.dim();
    std::uniform_real_distribution<double> u(-radius, radius);
    std::normal_distribution<double> g(0.0, 1.0);
    RVec best;
    double best_obj = INFINITY;
    for (int s = 0; s < 200000; ++s) {
        RVec x(n);
        for (Index k = 0; k < n; ++k) x(k) = u(rng);
        if (!feasible(p, x)) continue;
        const double f = p.c.dot(x);
        if (f < best_obj) {
            best_obj = f;
            best = x;
        }
    }
    REQUIRE(best.size() == n);
    double step = radius * 0.05;
    while (step > 1e-9) {
        bool improved = false;
        for (int d = 0; d < 400; ++d) {
            RVec dir(n);
            for (Index k = 0; k < n; ++k) dir(k) = g(rng);
            dir.normalize();
            const RVec x = best + step * dir;
            if (!feasible(p, x)) continue;
            const double f = p.c.dot(x);
            if (f < best_obj) {
                best_obj = f;
                best = x;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best_obj;
}

}  // namespace

TEST_CASE("unit ball extreme point") {
    Problem p = with_no_equalities(3);
    p.c << 1.0, 0.0, 0.0;
    p.cones.push_back(ball(3, 1.0));
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.x(0) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(std::abs(s.x(1)) < 1e-7);
    CHECK(std::abs(s.x(2)) < 1e-7);
    CHECK(s.obj == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(s.kkt_residual <= 1e-8);
}

TEST_CASE("fixed coordinate on a circle") {
    Problem p = with_no_equalities(2);
    p.c << 1.0, 1.0;
    p.cones.push_back(ball(2, 1.0));
    p.F = RMat(1, 2);
    p.F << 1.0, 0.0;
    p.h = RVec::Constant(1, 0.5);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.x(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s.x(1) == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-7));
    CHECK(s.obj == doctest::Approx(0.5 - 0.8660254).epsilon(1e-7));
}

TEST_CASE("general equality block is eliminated") {
    Problem p = with_no_equalities(3);
    p.c << 0.0, 0.0, 1.0;
    p.cones.push_back(ball(3, 2.0));
    p.F = RMat(1, 3);
    p.F << 1.0, 1.0, 0.0;
    p.h = RVec::Constant(1, 1.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    // x1 + x2 = 1 with the smallest norm at x1 = x2 = 0.5; x3 = -sqrt(4 - 0.5).
    CHECK(s.x(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(s.x(2) == doctest::Approx(-std::sqrt(3.5)).epsilon(1e-7));
}

TEST_CASE("random instances against a sampling oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int inst = 0; inst < 10; ++inst) {
        const Index n = 2 + inst % 5;
        Problem p = with_no_equalities(n);
        for (Index k = 0; k < n; ++k) p.c(k) = g(rng);
        p.cones.push_back(ball(n, 1.0));
        for (int c = 0; c < 2; ++c) {
            Cone k;
            const Index r = 1 + (inst + c) % 3;
            k.A = RMat(r, n);
            for (Index i = 0; i < r; ++i)
                for (Index j = 0; j < n; ++j) k.A(i, j) = g(rng);
            k.b = RVec(r);
            for (Index i = 0; i < r; ++i) k.b(i) = 0.3 * g(rng);
            k.g = RVec(n);
            for (Index j = 0; j < n; ++j) k.g(j) = 0.5 * g(rng);
            // Origin strictly inside: d > ||b||.
            k.d = k.b.norm() + 0.5 + std::abs(g(rng));
            p.cones.push_back(k);
        }
        const Solution s = solve(p);
        REQUIRE(s.status == Status::optimal);
        const KktReport rep = check_kkt(p, s.x, s.cone_duals, s.eq_duals);
        CHECK(rep.max() <= 1e-8);
        const double oracle = search_oracle(p, rng, 1.0);
        CHECK(s.obj <= oracle + 1e-9);
        CHECK(std::abs(s.obj - oracle) <= 1e-3 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("scaling the objective keeps the minimizer") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    Problem p = with_no_equalities(4);
    for (Index k = 0; k < 4; ++k) p.c(k) = g(rng);
    p.cones.push_back(ball(4, 1.5));
    Cone k;
    k.A = RMat::Random(2, 4);
    k.b = RVec::Zero(2);
    k.g = RVec::Zero(4);
    k.d = 0.8;
    p.cones.push_back(k);
    const Solution base = solve(p);
    REQUIRE(base.status == Status::optimal);
    for (double alpha : {1e-3, 0.5, 7.0, 1e4}) {
        Problem q = p;
        q.c *= alpha;
        const Solution s = solve(q);
        REQUIRE(s.status == Status::optimal);
        CHECK((s.x - base.x).cwiseAbs().maxCoeff() <= 1e-9 * 100);
    }
}

TEST_CASE("infeasible problem yields a certificate") {
    Problem p = with_no_equalities(2);
    p.c << 1.0, 0.0;
    p.cones.push_back(ball(2, 1.0));
    Cone k;  // x1 >= 2
    k.A.resize(0, 2);
    k.b.resize(0);
    k.g = RVec::Zero(2);
    k.g(0) = 1.0;
    k.d = -2.0;
    p.cones.push_back(k);
    const Solution s = solve(p);
    CHECK(s.status == Status::infeasible);
    CHECK(s.certificate.size() > 0);
}

TEST_CASE("single feasible point is returned, not infeasible") {
    // |a^H v| <= 0 with M = 1 leaves v = 0 as the only point of the unit ball.
    Problem p = with_no_equalities(2);
    p.c << -1.0, 0.0;
    p.cones.push_back(ball(2, 1.0));
    Cone k;
    k.A = RMat::Identity(2, 2) * 0.7;
    k.b = RVec::Zero(2);
    k.g = RVec::Zero(2);
    k.d = 0.0;
    p.cones.push_back(k);
    const Solution s = solve(p);
    CHECK(s.status != Status::infeasible);
    CHECK(s.x.norm() <= 1e-6);
}

TEST_CASE("complex embedding") {
    ComplexEmbedding e1(1);
    CVec v(1);
    v << cdouble(1.0, 2.0);
    const RVec x = e1.embed(v);
    CHECK(x(0) == 1.0);
    CHECK(x(1) == 2.0);
    CVec a(1);
    a << cdouble(0.0, 1.0);
    CVec one(1);
    one << 1.0;
    CHECK((e1.conj_dot_rows(a) * e1.embed(one)).norm() == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Index m = 1 + t % 6;
        ComplexEmbedding e(m);
        CVec aa(m), vv(m);
        for (Index k = 0; k < m; ++k) {
            aa(k) = cdouble(g(rng), g(rng));
            vv(k) = cdouble(g(rng), g(rng));
        }
        CHECK((e.lift(e.embed(vv)) - vv).norm() == 0.0);
        const double via = (e.conj_dot_rows(aa) * e.embed(vv)).norm();
        worst = std::max(worst, std::abs(via - std::abs(aa.dot(vv))));
        CMat B = CMat::Random(3, m);
        const CVec bv = B * vv;
        CHECK((e.linear_map(B) * e.embed(vv) - ComplexEmbedding(3).embed(bv)).norm() <= 1e-13);
    }
    CHECK(worst <= 1e-15 * 10);
}

TEST_CASE("rotated cone for quadratic bounds") {
    const RMat B = RMat::Identity(2, 2);
    const Cone k = quad_leq_linear_cone(B, 0, 2, 3);
    RVec x(3);
    x << 0.6, 0.0, 0.36;
    const RVec lhs = k.A * x + k.b;
    CHECK(lhs.norm() == doctest::Approx(1.36));
    CHECK(k.g.dot(x) + k.d == doctest::Approx(1.36));
    CHECK(cone_violation(k, RVec::Zero(3)) == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        RMat Bt(2, 3);
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 3; ++j) Bt(i, j) = g(rng);
        const Cone kt = quad_leq_linear_cone(Bt, 1, 0, 4);
        RVec y(4);
        for (Index j = 0; j < 4; ++j) y(j) = g(rng);
        y(0) = std::abs(y(0)) * 3.0;
        const double quad = (Bt * y.segment(1, 3)).squaredNorm();
        if (std::abs(quad - y(0)) < 1e-9) continue;
        const bool inside = cone_violation(kt, y) == 0.0;
        CHECK(inside == (quad <= y(0)));
    }
}

TEST_CASE("psd factor") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    CMat H(2, 5);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 5; ++j) H(i, j) = cdouble(g(rng), g(rng));
    const CMat phi = H.adjoint() * H;
    const CMat B = factor_psd(phi);
    CHECK(B.rows() == 2);
    CHECK((B.adjoint() * B - phi).norm() <= 1e-12 * phi.norm());
    CMat bad = CMat::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(factor_psd(bad), std::domain_error);
}

TEST_CASE("dimension mismatch is a structural error") {
    Problem p = with_no_equalities(2);
    p.cones.push_back(ball(3, 1.0));
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
}
