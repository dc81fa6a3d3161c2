// SPDX-License-Identifier: Apache-2.0
#include "risshare/beamform.hpp"

#include <cmath>
#include <stdexcept>

namespace risshare {

namespace {

constexpr double kActiveTol = 1e-6;

socp::Cone disc(const RMat& rows, double radius) {
    socp::Cone k;
    k.A = rows;
    k.b = RVec::Zero(rows.rows());
    k.g = RVec::Zero(rows.cols());
    k.d = radius;
    return k;
}

}  // namespace

socp::Problem beamform_problem(const ProblemData& pd, const ReflectVector& theta, double p_max_w,
                               const std::vector<double>& gamma_bar_w) {
    if (!(p_max_w > 0.0)) throw std::invalid_argument("beamformer: power budget must be positive");
    if (gamma_bar_w.size() != std::size_t(pd.j()))
        throw std::invalid_argument("beamformer: one threshold per PN is required");
    if (theta.n() != pd.n()) throw std::invalid_argument("beamformer: reflect vector has wrong length");

    const Index m = pd.m();
    const socp::ComplexEmbedding emb(m);
    const CVec a = pd.H_hat_s.adjoint() * theta.lifted();
    const double a_norm = a.norm();

    socp::Problem p;
    const RMat obj_rows = emb.conj_dot_rows(a_norm > 0.0 ? CVec(a / a_norm) : a);
    p.c = -obj_rows.row(0).transpose();
    p.cones.push_back(disc(RMat::Identity(2 * m, 2 * m), 1.0));

    std::vector<RMat> eq_rows{obj_rows.row(1)};
    std::vector<double> eq_rhs{0.0};
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        const double gb = gamma_bar_w[j];
        if (std::isinf(gb)) continue;
        if (gb < 0.0 || std::isnan(gb)) throw std::invalid_argument("beamformer: thresholds must be >= 0");
        const CVec aj = pd.H_hat_sj[j].adjoint() * theta.lifted();
        const double aj_norm = aj.norm();
        if (aj_norm == 0.0) continue;
        const RMat rows = emb.conj_dot_rows(aj / aj_norm);
        if (gb == 0.0) {
            eq_rows.push_back(rows);
            eq_rhs.push_back(0.0);
            eq_rhs.push_back(0.0);
            continue;
        }
        const double radius = std::sqrt(gb / p_max_w) / aj_norm;
        // |a_j^H u| <= ||u|| <= 1 already, so a radius of 1 or more is inactive.
        if (radius >= 1.0) continue;
        p.cones.push_back(disc(rows, radius));
    }
    Index n_eq = 0;
    for (const RMat& r : eq_rows) n_eq += r.rows();
    p.F.resize(n_eq, 2 * m);
    Index row = 0;
    for (const RMat& r : eq_rows) {
        p.F.middleRows(row, r.rows()) = r;
        row += r.rows();
    }
    p.h = RVec::Zero(n_eq);
    return p;
}

BeamformResult solve_beamformer(const ProblemData& pd, const ReflectVector& theta, double p_max_w,
                                const std::vector<double>& gamma_bar_w, const socp::Settings& settings) {
    const socp::Problem prob = beamform_problem(pd, theta, p_max_w, gamma_bar_w);
    const Index m = pd.m();
    const CVec a = pd.H_hat_s.adjoint() * theta.lifted();

    BeamformResult res;
    res.interference_active.assign(gamma_bar_w.size(), false);
    if (a.norm() == 0.0) {
        res.v.v = CVec::Zero(m);
        res.degenerate = true;
        return res;
    }

    const socp::Solution sol = socp::solve(prob, settings);
    res.status = sol.status;
    res.kkt_residual = sol.kkt_residual;
    CVec v = socp::ComplexEmbedding(m).lift(sol.x) * std::sqrt(p_max_w);
    if (!v.allFinite()) v.setZero();

    // Zero-threshold PNs: remove any leftover component along their channels.
    std::vector<CVec> nulls;
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j)
        if (gamma_bar_w[j] == 0.0) nulls.push_back(pd.H_hat_sj[j].adjoint() * theta.lifted());
    if (!nulls.empty()) {
        CMat A(m, Index(nulls.size()));
        for (std::size_t k = 0; k < nulls.size(); ++k) A.col(Index(k)) = nulls[k];
        v -= A * A.completeOrthogonalDecomposition().solve(v);
    }

    // Canonical phase: a^H v real and nonnegative.
    const cdouble av = a.dot(v);
    if (std::abs(av) > 0.0) v *= std::conj(av) / std::abs(av);

    // Pull back any rounding excess so every returned beam is feasible.
    const double pw = v.squaredNorm();
    if (pw > p_max_w) v *= std::sqrt(p_max_w / pw);
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        if (std::isinf(gamma_bar_w[j]) || gamma_bar_w[j] == 0.0) continue;
        const double g = std::norm(theta.lifted().dot(pd.H_hat_sj[j] * v));
        if (g > gamma_bar_w[j]) v *= std::sqrt(gamma_bar_w[j] / g);
    }

    res.v.v = v;
    res.objective = a.dot(v).real();
    res.power_active = v.squaredNorm() >= p_max_w * (1.0 - kActiveTol);
    for (std::size_t j = 0; j < gamma_bar_w.size(); ++j) {
        if (std::isinf(gamma_bar_w[j])) continue;
        const double g = std::norm(theta.lifted().dot(pd.H_hat_sj[j] * v));
        res.interference_active[j] = g >= gamma_bar_w[j] * (1.0 - kActiveTol);
    }
    return res;
}

}  // namespace risshare
