// SPDX-License-Identifier: Apache-2.0
#include "risshare/npsp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace risshare::npsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

void check_theta_bar(const CVec& theta_bar, const ProblemData& pd) {
    if (theta_bar.size() != pd.n()) throw std::invalid_argument("npsp: theta_bar has wrong length");
    for (Index n = 0; n < theta_bar.size(); ++n) {
        const double a = std::abs(theta_bar(n));
        if (!std::isfinite(a) || a > 1.0 + ReflectVector::kModulusTol)
            throw std::invalid_argument("npsp: theta_bar modulus exceeds 1");
    }
}

double distance2(const CVec& a, const CVec& b) { return (a - b).squaredNorm(); }

}  // namespace

PhaseCodebook PhaseCodebook::uniform(int l) {
    if (l < 2) throw std::invalid_argument("PhaseCodebook: at least 2 levels are required");
    PhaseCodebook c;
    for (int k = 0; k < l; ++k) c.levels.push_back(kTwoPi * k / l);
    return c;
}

void PhaseCodebook::validate() const {
    if (levels.size() < 2) throw std::invalid_argument("PhaseCodebook: at least 2 levels are required");
    for (std::size_t a = 0; a < levels.size(); ++a) {
        if (!std::isfinite(levels[a])) throw std::invalid_argument("PhaseCodebook: non-finite level");
        for (std::size_t b = 0; b < a; ++b)
            if (circular_distance(levels[a], levels[b]) < 1e-12)
                throw std::invalid_argument("PhaseCodebook: levels must be distinct modulo 2 pi");
    }
}

int PhaseCodebook::nearest(double physical_angle) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < size(); ++k) {
        const double d = circular_distance(levels[std::size_t(k)], physical_angle);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

cdouble PhaseCodebook::lifted(double amplitude, int index) const {
    return std::polar(amplitude, -levels.at(std::size_t(index)));
}

double circular_distance(double a, double b) {
    const double d = wrap(a - b);
    return std::min(d, kTwoPi - d);
}

void Config::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("npsp: mu must be positive");
    if (n_itr < 1) throw std::invalid_argument("npsp: n_itr must be at least 1");
    if (!(varsigma >= 0.0)) throw std::invalid_argument("npsp: varsigma must be nonnegative");
}

double Constraints::value(Index j, const CVec& theta) const {
    const auto ju = std::size_t(j);
    return std::norm(theta.dot(g[ju]) + d[ju]);
}

Constraints interference_constraints(const ProblemData& pd, const BeamVector& v,
                                     const std::vector<double>& gamma_bar_w, bool normalize) {
    if (gamma_bar_w.size() != std::size_t(pd.j()))
        throw std::invalid_argument("npsp: one threshold per PN is required");
    if (v.v.size() != pd.m()) throw std::invalid_argument("npsp: beam vector has wrong length");
    const Index n = pd.n();
    Constraints k;
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        const CVec hv = pd.H_hat_sj[j] * v.v;
        const double gb = gamma_bar_w[j];
        const double scale = (normalize && gb > 0.0 && std::isfinite(gb)) ? 1.0 / std::sqrt(gb) : 1.0;
        k.g.push_back(scale * hv.head(n));
        k.d.push_back(scale * hv(n));
        k.limit.push_back(scale == 1.0 ? gb : 1.0);
    }
    return k;
}

State initial_state(const CVec& theta_bar, Index j) {
    State s;
    s.b = theta_bar;
    s.theta_d = theta_bar;
    s.lambda = CVec::Zero(theta_bar.size());
    s.w.assign(std::size_t(j), 0.0);
    s.f_obj = std::numeric_limits<double>::infinity();
    return s;
}

CVec theta_step(const State& s, const CVec& theta_bar, const PhaseCodebook& codebook,
                const Config& cfg) {
    CVec out(theta_bar.size());
    for (Index n = 0; n < theta_bar.size(); ++n) {
        const cdouble target = s.b(n) + s.lambda(n) / cfg.mu;
        // Lifted phase arg(target) realizes physical phase -arg(target).
        const int idx = codebook.nearest(-std::arg(target));
        out(n) = codebook.lifted(std::abs(theta_bar(n)), idx);
    }
    return out;
}

CVec b_step(const State& s, const CVec& theta_bar, const Constraints& k, const Config& cfg) {
    const Index n = theta_bar.size();
    const double diag = 2.0 + cfg.mu;
    if (cfg.lagrangian_consistent)
        return (2.0 * theta_bar + cfg.mu * s.theta_d - s.lambda) / diag;
    const CVec rhs = 2.0 * theta_bar + cfg.mu * s.theta_d + s.lambda;
    bool any = false;
    for (double w : s.w) any = any || w > 0.0;
    if (!any) return rhs / diag;
    CMat y = CMat::Identity(n, n) * diag;
    for (std::size_t j = 0; j < s.w.size(); ++j)
        if (s.w[j] > 0.0) y.selfadjointView<Eigen::Lower>().rankUpdate(k.g[j], 2.0 * s.w[j]);
    return y.selfadjointView<Eigen::Lower>().llt().solve(rhs);
}

void dual_step(State& s, const Constraints& k, const Config& cfg) {
    s.lambda += cfg.mu * (s.b - s.theta_d);
    for (std::size_t j = 0; j < s.w.size(); ++j) {
        if (!std::isfinite(k.limit[j])) continue;
        s.w[j] += cfg.mu * std::max(0.0, k.value(Index(j), s.theta_d) - k.limit[j]);
    }
}

bool feasible(const CVec& theta, const ProblemData& pd, const BeamVector& v,
              const std::vector<double>& gamma_bar_w) {
    const std::vector<double> gam = pn_interference(pd, ReflectVector::from_elements(theta), v);
    for (std::size_t j = 0; j < gam.size(); ++j)
        if (!within_threshold(gam[j], gamma_bar_w[j])) return false;
    return true;
}

Result solve(const CVec& theta_bar, const ProblemData& pd, const BeamVector& v,
             const PhaseCodebook& codebook, const std::vector<double>& gamma_bar_w,
             const Config& cfg) {
    cfg.validate();
    codebook.validate();
    check_theta_bar(theta_bar, pd);
    const Constraints k = interference_constraints(pd, v, gamma_bar_w, cfg.normalize_interference);
    State s = initial_state(theta_bar, pd.j());
    while (s.f_obj > cfg.varsigma && s.iteration < cfg.n_itr) {
        s.theta_d = theta_step(s, theta_bar, codebook, cfg);
        s.b = b_step(s, theta_bar, k, cfg);
        if (feasible(s.theta_d, pd, v, gamma_bar_w)) {
            const double f = distance2(theta_bar, s.theta_d);
            if (f < s.f_obj) {
                s.f_obj = f;
                s.theta_o = s.theta_d;
            }
        }
        dual_step(s, k, cfg);
        ++s.iteration;
    }
    Result r;
    r.iterations = s.iteration;
    r.found = std::isfinite(s.f_obj);
    r.f_obj = s.f_obj;
    if (r.found) r.theta_o = s.theta_o;
    return r;
}

Result exhaustive_quantize(const CVec& theta_bar, const ProblemData& pd, const BeamVector& v,
                           const PhaseCodebook& codebook, const std::vector<double>& gamma_bar_w) {
    codebook.validate();
    check_theta_bar(theta_bar, pd);
    const Index n = theta_bar.size();
    const auto l = std::uint64_t(codebook.size());
    std::uint64_t total = 1;
    for (Index k = 0; k < n; ++k) {
        if (total > kExhaustiveBudget / l)
            throw std::length_error("exhaustive_quantize: codebook size ^ N exceeds the budget");
        total *= l;
    }
    CVec cand(n);
    Result best;
    best.f_obj = std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t rem = c;
        for (Index k = 0; k < n; ++k) {
            cand(k) = codebook.lifted(std::abs(theta_bar(k)), int(rem % l));
            rem /= l;
        }
        const double f = distance2(theta_bar, cand);
        if (f >= best.f_obj) continue;
        if (!feasible(cand, pd, v, gamma_bar_w)) continue;
        best.f_obj = f;
        best.theta_o = cand;
        best.found = true;
    }
    best.iterations = int(total);
    return best;
}

}  // namespace risshare::npsp
