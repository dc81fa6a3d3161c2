// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "risshare/beamform.hpp"

using namespace risshare;
using namespace testing;

namespace {

// Maximizes Re(a^H u) over ||u|| <= 1, |b^H u|^2 <= r2 for M = 2. With
// u = x a/|a| + z e, e orthonormal to a, the best z for a given x leaves
// max(0, x |b^H a/|a|| - sqrt(1 - x^2) |b^H e|) on the limit, which is
// increasing in x, so the optimum is |a| times the largest feasible x.
double reduced_oracle(const CVec& a, const CVec& b, double r2) {
    const CVec ah = a / a.norm();
    CVec e(2);
    e << -std::conj(ah(1)), std::conj(ah(0));
    const double b1 = std::abs(b.dot(ah)), b2 = std::abs(b.dot(e));
    auto ok = [&](double x) { return x * b1 - std::sqrt(1.0 - x * x) * b2 <= std::sqrt(r2); };
    double lo = 0.0, hi = 1.0;
    if (ok(hi)) return a.norm();
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return a.norm() * lo;
}

// Best value over uniformly sampled feasible points of the unit ball.
double sampled_value(const CVec& a, const CVec& b, double r2, std::mt19937_64& rng, int samples) {
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
        CVec u = random_cvec(2, rng);
        u *= std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 0.25) / u.norm();
        if (std::norm(b.dot(u)) <= r2) best = std::max(best, a.dot(u).real());
    }
    return best;
}

void check_invariants(const ProblemData& pd, const ReflectVector& th, const BeamformResult& r, double p,
                      const std::vector<double>& gb) {
    CHECK(r.v.v.squaredNorm() <= p * (1.0 + 1e-9));
    const std::vector<double> g = pn_interference(pd, th, r.v);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(within_threshold(g[j], gb[j]));
    const cdouble s = th.lifted().dot(pd.H_hat_s * r.v.v);
    CHECK(std::abs(s.imag()) <= 1e-8 * (1.0 + std::abs(r.objective)));
    CHECK(s.real() >= 0.0);
}

}  // namespace

TEST_CASE("no interference limits gives maximum-ratio transmission") {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Index n = 1 + t % 8, m = 1 + t % 4, j = 1 + t % 3;
        const ProblemData pd = assemble_problem(std::vector<double>(std::size_t(j), 1.0), random_channels(n, m, j, rng));
        const ReflectVector th = random_reflect(n, rng);
        const double p = 0.1 + t * 0.3;
        const BeamformResult r = solve_beamformer(pd, th, p, std::vector<double>(std::size_t(j), INFINITY));
        REQUIRE(r.status == socp::Status::optimal);
        const CVec a = pd.H_hat_s.adjoint() * th.lifted();
        const CVec mrt = std::sqrt(p) * a / a.norm();
        worst = std::max(worst, (r.v.v - mrt).cwiseAbs().maxCoeff());
        CHECK(r.objective == doctest::Approx(std::sqrt(p) * a.norm()).epsilon(1e-9));
        CHECK(r.power_active);
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("zero threshold with a single antenna forces a silent transmitter") {
    std::mt19937_64 rng(4);
    const ProblemData pd = assemble_problem(std::vector<double>{1.0}, random_channels(2, 1, 1, rng));
    const ReflectVector th = random_reflect(2, rng);
    const BeamformResult r = solve_beamformer(pd, th, 1.0, {0.0});
    CHECK(r.v.v.norm() <= 1e-6);
    CHECK(std::abs(r.objective) <= 1e-6);
    CHECK(pn_interference(pd, th, r.v)[0] == 0.0);
}

TEST_CASE("vanishing effective channel is reported as degenerate") {
    ChannelSet ch = unit_channels(1, 2, 1);
    ch.h_s.setZero();
    const ProblemData pd = assemble_problem(std::vector<double>{1.0}, ch);
    const BeamformResult r = solve_beamformer(pd, ReflectVector::off(1), 1.0, {1.0});
    CHECK(r.degenerate);
    CHECK(r.v.v.norm() == 0.0);
    CHECK(r.objective == 0.0);
}

TEST_CASE("two antennas, one PN, against a reduced oracle and sampling") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        const ProblemData pd = assemble_problem(std::vector<double>{1.0}, random_channels(3, 2, 1, rng));
        const ReflectVector th = random_reflect(3, rng);
        const double p = 2.0;
        const CVec a = pd.H_hat_s.adjoint() * th.lifted();
        const CVec b = pd.H_hat_sj[0].adjoint() * th.lifted();
        // Thresholds that bind: a fraction of the interference under MRT.
        const double mrt_leak = p * std::norm(b.dot(a / a.norm()));
        const double gb = (0.05 + 0.1 * t) * mrt_leak;
        const BeamformResult r = solve_beamformer(pd, th, p, {gb});
        REQUIRE(r.status == socp::Status::optimal);
        check_invariants(pd, th, r, p, {gb});
        const double oracle = std::sqrt(p) * reduced_oracle(a, b, gb / p);
        CHECK(rel_err(r.objective, oracle) <= 1e-7);
        CHECK(std::sqrt(p) * sampled_value(a, b, gb / p, rng, 100000) <= r.objective * (1.0 + 1e-9));
        CHECK(r.kkt_residual <= 1e-8);
    }
}

TEST_CASE("SIR equals the squared objective over the denominator") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 30; ++t) {
        const Index n = 2 + t % 6, m = 2 + t % 3, j = 1 + t % 3;
        const ProblemData pd = assemble_problem(std::vector<double>(std::size_t(j), 1.5), random_channels(n, m, j, rng));
        const ReflectVector th = random_reflect(n, rng);
        std::vector<double> gb(static_cast<std::size_t>(j));
        for (auto& g : gb) g = 0.05 + std::abs(cgauss(rng).real());
        const BeamformResult r = solve_beamformer(pd, th, 1.0, gb);
        REQUIRE(r.status == socp::Status::optimal);
        check_invariants(pd, th, r, 1.0, gb);
        const double den = th.lifted().dot(pd.phi_sum * th.lifted()).real();
        CHECK(rel_err(su_sir(pd, th, r.v).sir, r.objective * r.objective / den) <= 1e-8);

        const socp::Problem prob = beamform_problem(pd, th, 1.0, gb);
        const socp::Solution s = socp::solve(prob);
        CHECK(socp::check_kkt(prob, s.x, s.cone_duals, s.eq_duals).max() <= 1e-8);
    }
}

TEST_CASE("objective is non-decreasing in the power budget") {
    std::mt19937_64 rng(90);
    for (int t = 0; t < 10; ++t) {
        const ProblemData pd = assemble_problem(std::vector<double>{1.0, 1.0}, random_channels(4, 3, 2, rng));
        const ReflectVector th = random_reflect(4, rng);
        const std::vector<double> gb{0.3, 0.2};
        double prev = 0.0;
        for (double p = 0.05; p < 20.0; p *= 1.8) {
            const BeamformResult r = solve_beamformer(pd, th, p, gb);
            check_invariants(pd, th, r, p, gb);
            CHECK(r.objective >= prev * (1.0 - 1e-8));
            prev = r.objective;
        }
    }
}

TEST_CASE("physical-scale channels stay feasible") {
    Scenario s;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ChannelSet ch = generate_channels(s, seed);
        const ProblemData pd = assemble_problem(s, ch);
        std::mt19937_64 rng(seed);
        const ReflectVector th = random_reflect(s.n_elements, rng);
        const BeamformResult r = solve_beamformer(pd, th, s.p_max_w(), s.gamma_bar_w());
        REQUIRE(r.status == socp::Status::optimal);
        check_invariants(pd, th, r, s.p_max_w(), s.gamma_bar_w());
        CHECK(r.objective > 0.0);
    }
}
