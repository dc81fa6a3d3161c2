// SPDX-License-Identifier: Apache-2.0
#include "risshare/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risshare {

namespace {

void check_dims(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v) {
    if (theta.n() != pd.n()) throw std::invalid_argument("metrics: reflect vector has wrong length");
    if (v.v.size() != pd.m()) throw std::invalid_argument("metrics: beam vector has wrong length");
}

}  // namespace

bool LinkReport::all_feasible() const {
    for (bool f : feasible)
        if (!f) return false;
    return true;
}

double rate_bpshz(double sir) { return std::log2(1.0 + sir); }

double su_signal_power(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v) {
    check_dims(pd, theta, v);
    return std::norm(theta.lifted().dot(pd.H_hat_s * v.v));
}

double su_interference_power(const ProblemData& pd, const ReflectVector& theta) {
    if (theta.n() != pd.n()) throw std::invalid_argument("metrics: reflect vector has wrong length");
    double s = 0.0;
    for (std::size_t k = 0; k < pd.h_tilde.size(); ++k)
        s += pd.p_pap_w[k] * std::norm(pd.h_tilde[k].dot(theta.lifted()));
    return s;
}

double su_denominator(const ProblemData& pd, const ReflectVector& theta) {
    if (theta.n() != pd.n()) throw std::invalid_argument("metrics: reflect vector has wrong length");
    // Through the factor keeps the value nonnegative to rounding.
    return (pd.phi_factor * theta.lifted()).squaredNorm();
}

SirValue su_sir(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v) {
    const double num = su_signal_power(pd, theta, v);
    const double den = su_denominator(pd, theta);
    if (den < SirValue::kDegenerateFloor) return {std::numeric_limits<double>::infinity(), true};
    return {num / den, false};
}

std::vector<double> pn_interference(const ProblemData& pd, const ReflectVector& theta,
                                    const BeamVector& v) {
    check_dims(pd, theta, v);
    std::vector<double> out;
    out.reserve(std::size_t(pd.j()));
    for (const CMat& h : pd.H_hat_sj) out.push_back(std::norm(theta.lifted().dot(h * v.v)));
    return out;
}

double pu_sinr(const ChannelSet& ch, const ReflectVector& theta, const BeamVector& v, Index j,
               double p_pap_w, double noise_w) {
    if (j < 0 || j >= ch.j()) throw std::out_of_range("pu_sinr: PN index out of range");
    if (theta.n() != ch.n() || v.v.size() != ch.m())
        throw std::invalid_argument("pu_sinr: dimension mismatch");
    const auto ju = std::size_t(j);
    const CVec phys = theta.physical();
    const cdouble own = ch.h_rj[ju].dot(phys.cwiseProduct(ch.h_pj_r[ju])) + ch.h_j[ju];
    const cdouble leak = ch.h_rj[ju].dot(phys.cwiseProduct(ch.H_sr * v.v)) + ch.h_sj[ju].dot(v.v);
    return p_pap_w * std::norm(own) / (std::norm(leak) + noise_w);
}

LinkReport link_report(const ProblemData& pd, const ReflectVector& theta, const BeamVector& v,
                       const std::vector<double>& gamma_bar_w) {
    if (gamma_bar_w.size() != std::size_t(pd.j()))
        throw std::invalid_argument("link_report: one threshold per PN is required");
    LinkReport r;
    const SirValue s = su_sir(pd, theta, v);
    r.sir = s.sir;
    r.degenerate = s.degenerate;
    r.rate_bpshz = rate_bpshz(s.sir);
    r.interference_w = pn_interference(pd, theta, v);
    for (std::size_t k = 0; k < gamma_bar_w.size(); ++k)
        r.feasible.push_back(within_threshold(r.interference_w[k], gamma_bar_w[k]));
    return r;
}

}  // namespace risshare
