// SPDX-License-Identifier: Apache-2.0
#include "risshare/gld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risshare::gld {

namespace {

double quad_phi(const ProblemData& pd, const CVec& theta_hat) {
    return (pd.phi_factor * theta_hat).squaredNorm();
}

void check_t(double t) {
    if (!(t > 0.0)) throw std::domain_error("gld: t must be positive");
}

bool strictly_interior(const ProblemData& pd, const BeamVector& v, const CVec& th, double t,
                       const std::vector<double>& gamma_bar_w, double margin) {
    const Index n = pd.n();
    for (Index k = 0; k < n; ++k)
        if (1.0 - std::abs(th(k)) <= margin) return false;
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        if (std::isinf(gamma_bar_w[j])) continue;
        const double g = std::norm(th.dot(pd.H_hat_sj[j] * v.v));
        if (gamma_bar_w[j] - g <= margin * gamma_bar_w[j]) return false;
    }
    return t - quad_phi(pd, th) > margin * t;
}

}  // namespace

void Config::validate() const {
    if (k_bar < 1) throw std::invalid_argument("gld: k_bar must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("gld: epsilon must be in (0, 1)");
    if (!(descent_tol >= 0.0)) throw std::invalid_argument("gld: descent_tol must be >= 0");
    if (!(boundary_margin >= 0.0)) throw std::invalid_argument("gld: boundary_margin must be >= 0");
    if (!(init_t_slack >= 0.0)) throw std::invalid_argument("gld: init_t_slack must be >= 0");
}

const char* to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::iteration_cap: return "iteration_cap";
        case Status::stationary: return "stationary";
        case Status::inner_failure: return "inner_failure";
    }
    return "unknown";
}

RVec Gradient::real_embedding() const {
    const Index n1 = theta_block.size();
    RVec out(2 * n1 + 1);
    for (Index k = 0; k < n1; ++k) {
        out(2 * k) = 2.0 * theta_block(k).real();
        out(2 * k + 1) = 2.0 * theta_block(k).imag();
    }
    out(2 * n1) = t_component;
    return out;
}

double q_eval(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t) {
    check_t(t);
    const CVec c = pd.H_hat_s * v.v;
    return -std::norm(c.dot(theta_hat)) / t;
}

Gradient q_gradient(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t) {
    check_t(t);
    const CVec c = pd.H_hat_s * v.v;
    const cdouble s = c.dot(theta_hat);
    Gradient g;
    g.theta_block = -c * s / t;
    g.t_component = std::norm(s) / (t * t);
    return g;
}

socp::Problem linearize(const ProblemData& pd, const BeamVector& v, const CVec& theta_hat, double t,
                        const std::vector<double>& gamma_bar_w, double t_ref) {
    check_t(t_ref);
    const Index n = pd.n();
    const Index n1 = n + 1;
    const Index dim = 2 * n1 + 1;
    const Index t_col = 2 * n1;
    const socp::ComplexEmbedding emb(n1);

    socp::Problem p;
    p.c = q_gradient(pd, v, theta_hat, t).real_embedding();
    p.c(t_col) *= t_ref;

    for (Index k = 0; k < n; ++k) {
        socp::Cone cone;
        cone.A = RMat::Zero(2, dim);
        cone.A(0, 2 * k) = 1.0;
        cone.A(1, 2 * k + 1) = 1.0;
        cone.b = RVec::Zero(2);
        cone.g = RVec::Zero(dim);
        cone.d = 1.0;
        p.cones.push_back(std::move(cone));
    }

    std::vector<RMat> eq_blocks;
    {
        RMat fix = RMat::Zero(2, dim);
        fix(0, 2 * n) = 1.0;
        fix(1, 2 * n + 1) = 1.0;
        eq_blocks.push_back(fix);
    }
    std::vector<double> eq_rhs{1.0, 0.0};

    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        const double gb = gamma_bar_w[j];
        if (std::isinf(gb)) continue;
        const CVec cj = pd.H_hat_sj[j] * v.v;
        const double cn = cj.norm();
        if (cn == 0.0) continue;
        const CVec cu = cj / cn;
        RMat rows = RMat::Zero(2, dim);
        rows.leftCols(2 * n1) = emb.conj_dot_rows(cu);
        if (gb == 0.0) {
            eq_blocks.push_back(rows);
            eq_rhs.push_back(0.0);
            eq_rhs.push_back(0.0);
            continue;
        }
        const double radius = std::sqrt(gb) / cn;
        // |cu^H theta_hat| <= sum |cu_k| over the box, so larger radii never bind.
        if (radius > cu.cwiseAbs().sum()) continue;
        socp::Cone cone;
        cone.A = rows;
        cone.b = RVec::Zero(2);
        cone.g = RVec::Zero(dim);
        cone.d = radius;
        p.cones.push_back(std::move(cone));
    }

    const RMat B = emb.linear_map(pd.phi_factor) / std::sqrt(t_ref);
    p.cones.push_back(socp::quad_leq_linear_cone(B, 0, t_col, dim));

    Index n_eq = 0;
    for (const RMat& r : eq_blocks) n_eq += r.rows();
    p.F.resize(n_eq, dim);
    Index row = 0;
    for (const RMat& r : eq_blocks) {
        p.F.middleRows(row, r.rows()) = r;
        row += r.rows();
    }
    p.h = Eigen::Map<const RVec>(eq_rhs.data(), Index(eq_rhs.size()));
    return p;
}

double domain_residual(const ProblemData& pd, const BeamVector& v, const CVec& th, double t,
                       const std::vector<double>& gamma_bar_w) {
    const Index n = pd.n();
    double worst = std::abs(th(n) - 1.0);
    for (Index k = 0; k < n; ++k) worst = std::max(worst, std::abs(th(k)) - 1.0);
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        if (std::isinf(gamma_bar_w[j])) continue;
        const double g = std::norm(th.dot(pd.H_hat_sj[j] * v.v));
        const double excess = g - gamma_bar_w[j];
        worst = std::max(worst, gamma_bar_w[j] > 0.0 ? excess / gamma_bar_w[j] : excess);
    }
    if (!(t > 0.0)) return std::max(worst, 1.0 - t);
    worst = std::max(worst, (quad_phi(pd, th) - t) / t);
    return std::max(worst, 0.0);
}

ReflectVector interior_start(const ProblemData& pd, const BeamVector& v,
                             const std::vector<double>& gamma_bar_w, std::mt19937_64& rng,
                             double delta) {
    const Index n = pd.n();
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CVec u(n);
    for (Index k = 0; k < n; ++k) u(k) = std::polar(1.0, phase(rng));
    CVec th(n + 1);
    th(n) = 1.0;
    for (int attempt = 0; attempt < 60; ++attempt, delta *= 0.5) {
        th.head(n) = delta * u;
        bool ok = true;
        for (std::size_t j = 0; j < gamma_bar_w.size() && ok; ++j) {
            if (std::isinf(gamma_bar_w[j])) continue;
            ok = std::norm(th.dot(pd.H_hat_sj[j] * v.v)) < gamma_bar_w[j] * (1.0 - 1e-6);
        }
        if (ok) return ReflectVector::from_lifted(th);
    }
    return ReflectVector::off(n);
}

State solve(const ProblemData& pd, const BeamVector& v, const ReflectVector& init,
            const std::vector<double>& gamma_bar_w, const Config& cfg, const socp::Settings& settings) {
    cfg.validate();
    if (gamma_bar_w.size() != std::size_t(pd.j()))
        throw std::invalid_argument("gld: one threshold per PN is required");
    if (init.n() != pd.n() || v.v.size() != pd.m()) throw std::invalid_argument("gld: dimension mismatch");

    const Index n = pd.n();
    const Index n1 = n + 1;
    State st;
    st.theta_hat = init.lifted();
    st.t = (1.0 + cfg.init_t_slack) * quad_phi(pd, st.theta_hat);
    if (!(st.t > 0.0)) throw std::invalid_argument("gld: start point has no interference, t is undefined");
    const double init_res = domain_residual(pd, v, st.theta_hat, st.t, gamma_bar_w);
    if (init_res > kFeasibilityTol)
        throw std::invalid_argument("gld: start point violates the interference limits");
    st.q_value = q_eval(pd, v, st.theta_hat, st.t);
    st.trace.push_back(st.q_value);
    st.rows.push_back({0, st.q_value, st.t, init_res});

    const CVec c = pd.H_hat_s * v.v;
    if (c.norm() == 0.0 || c.dot(st.theta_hat) == cdouble(0.0)) {
        st.iteration = 1;
        st.status = Status::stationary;
        return st;
    }

    const socp::ComplexEmbedding emb(n1);
    st.status = Status::iteration_cap;
    while (st.iteration < cfg.k_bar) {
        const socp::Problem prob = linearize(pd, v, st.theta_hat, st.t, gamma_bar_w, st.t);
        const socp::Solution sol = socp::solve(prob, settings);
        st.inner_kkt.push_back(socp::check_kkt(prob, sol.x, sol.cone_duals, sol.eq_duals).max());
        if (sol.status != socp::Status::optimal) {
            st.status = Status::inner_failure;
            break;
        }
        CVec th_bar = emb.lift(sol.x.head(2 * n1));
        th_bar(n) = 1.0;
        for (Index k = 0; k < n; ++k) {
            const double a = std::abs(th_bar(k));
            if (a > 1.0) th_bar(k) /= a;
        }
        const double t_bar = sol.x(2 * n1) * st.t;

        CVec th_new;
        double t_new;
        if (t_bar > 0.0 && strictly_interior(pd, v, th_bar, t_bar, gamma_bar_w, cfg.boundary_margin)) {
            th_new = th_bar;
            t_new = t_bar;
        } else {
            th_new = cfg.epsilon * th_bar + (1.0 - cfg.epsilon) * st.theta_hat;
            t_new = cfg.epsilon * t_bar + (1.0 - cfg.epsilon) * st.t;
        }
        th_new(n) = 1.0;
        // Rounding in the inner solve can leave the model point marginally
        // outside; back off toward the current iterate until it is inside.
        for (int back = 0; back < 40; ++back) {
            if (t_new > 0.0 && domain_residual(pd, v, th_new, t_new, gamma_bar_w) <= 1e-12) break;
            th_new = 0.5 * (th_new + st.theta_hat);
            t_new = 0.5 * (t_new + st.t);
            th_new(n) = 1.0;
        }
        if (!(t_new > 0.0)) break;

        const double q_new = q_eval(pd, v, th_new, t_new);
        if (!(q_new < st.q_value)) {
            st.status = Status::converged;
            break;
        }
        const double decrease = (st.q_value - q_new) / std::abs(st.q_value);
        st.theta_hat = th_new;
        st.t = t_new;
        st.q_value = q_new;
        ++st.iteration;
        st.trace.push_back(q_new);
        st.rows.push_back({st.iteration, q_new, t_new, domain_residual(pd, v, th_new, t_new, gamma_bar_w)});
        if (decrease < cfg.descent_tol) {
            st.status = Status::converged;
            break;
        }
    }

    // The epigraph bound is tight at any minimizer; tightening can only lower q.
    const double tight = quad_phi(pd, st.theta_hat);
    if (tight > 0.0 && tight < st.t) {
        st.t = tight;
        st.q_value = q_eval(pd, v, st.theta_hat, st.t);
    }
    return st;
}

}  // namespace risshare::gld
